#include "specklesim/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "specklesim/io.hpp"

namespace specklesim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, const std::string& key, int line) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing junk");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key, line, "expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& v, const std::string& key, int line) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing junk");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key, line, "expected an integer, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& v, const std::string& key, int line) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing junk");
    return static_cast<std::uint64_t>(x);
  } catch (const std::exception&) {
    throw ConfigError(key, line, "expected an unsigned integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& v, const std::string& key, int line) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key, line, "expected true/false, got '" + v + "'");
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

std::string fmt_q(double q) {
  if (q == 1.0) return "1";
  if (q == 0.5) return "1/2";
  if (std::abs(q - 2.0 / 3.0) < 1e-12) return "2/3";
  return fmt_double(q);
}

}  // namespace

double parse_q_value(const std::string& s, int line) {
  if (s == "1") return 1.0;
  if (s == "1/2") return 0.5;
  if (s == "2/3") return 2.0 / 3.0;
  return parse_double(s, "solver.q", line);
}

std::string estimator_name(EstimatorChoice c) {
  switch (c) {
    case EstimatorChoice::mean: return "mean";
    case EstimatorChoice::std_dev: return "std";
    case EstimatorChoice::both: return "both";
  }
  return "both";
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  bool na_ill_set = false;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", line, "expected 'key = value', got '" + trim(raw) + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("", line, "missing key before '='");

    if (key == "grid.n1") {
      cfg.grid.n1 = static_cast<int>(parse_int(value, key, line));
    } else if (key == "grid.n2") {
      cfg.grid.n2 = static_cast<int>(parse_int(value, key, line));
    } else if (key == "grid.pitch") {
      cfg.grid.pitch = parse_double(value, key, line);
    } else if (key == "target.kind") {
      if (value == "star") cfg.target_kind = TargetKind::star;
      else if (value == "file") cfg.target_kind = TargetKind::file;
      else throw ConfigError(key, line, "expected star|file, got '" + value + "'");
    } else if (key == "target.arms") {
      cfg.target_arms = static_cast<int>(parse_int(value, key, line));
    } else if (key == "target.file") {
      cfg.target_file = value;
    } else if (key == "psf.na") {
      cfg.psf_na = parse_double(value, key, line);
    } else if (key == "speckle.m") {
      cfg.speckle.m = static_cast<int>(parse_int(value, key, line));
    } else if (key == "speckle.na_ill") {
      cfg.speckle.na_ill = parse_double(value, key, line);
      na_ill_set = true;
    } else if (key == "speckle.kind") {
      if (value == "standard") cfg.speckle.kind = SpeckleSpec::Kind::standard;
      else if (value == "squared") cfg.speckle.kind = SpeckleSpec::Kind::squared;
      else throw ConfigError(key, line, "expected standard|squared, got '" + value + "'");
    } else if (key == "speckle.i0") {
      cfg.speckle.i0 = parse_double(value, key, line);
    } else if (key == "speckle.seed") {
      cfg.speckle.seed = parse_u64(value, key, line);
    } else if (key == "noise.snr_db") {
      if (value == "none") cfg.noise_snr_db.reset();
      else cfg.noise_snr_db = parse_double(value, key, line);
    } else if (key == "noise.photons") {
      if (value == "none") cfg.noise_photons.reset();
      else cfg.noise_photons = parse_double(value, key, line);
    } else if (key == "noise.seed") {
      cfg.noise_seed = parse_u64(value, key, line);
    } else if (key == "background.file") {
      cfg.background_file = (value == "none") ? "" : value;
    } else if (key == "background.fraction") {
      cfg.background_fraction = parse_double(value, key, line);
    } else if (key == "solver.p") {
      cfg.solver.p = static_cast<int>(parse_int(value, key, line));
    } else if (key == "solver.q") {
      cfg.solver.q = parse_q_value(value, line);
    } else if (key == "solver.mu_tv") {
      cfg.solver.mu_tv = parse_double(value, key, line);
    } else if (key == "solver.xi") {
      if (value == "auto") {
        cfg.solver.xi_auto = true;
        cfg.solver.xi = 0.0;
      } else {
        cfg.solver.xi_auto = false;
        cfg.solver.xi = parse_double(value, key, line);
        if (cfg.solver.xi < 0.0) throw ConfigError(key, line, "xi must be >= 0");
      }
    } else if (key == "solver.tau") {
      cfg.solver.tau = parse_double(value, key, line);
    } else if (key == "solver.sigma") {
      cfg.solver.sigma = parse_double(value, key, line);
    } else if (key == "solver.theta") {
      cfg.solver.theta = parse_double(value, key, line);
    } else if (key == "solver.max_iters") {
      cfg.solver.max_iters = static_cast<int>(parse_int(value, key, line));
    } else if (key == "solver.rel_tol") {
      cfg.solver.rel_tol = parse_double(value, key, line);
    } else if (key == "solver.log_every") {
      cfg.solver.log_every = static_cast<int>(parse_int(value, key, line));
    } else if (key == "estimator") {
      if (value == "mean") cfg.estimator = EstimatorChoice::mean;
      else if (value == "std") cfg.estimator = EstimatorChoice::std_dev;
      else if (value == "both") cfg.estimator = EstimatorChoice::both;
      else throw ConfigError(key, line, "expected mean|std|both, got '" + value + "'");
    } else if (key == "marginal.enabled") {
      cfg.marginal_enabled = parse_bool(value, key, line);
    } else if (key == "marginal.cap") {
      cfg.marginal_cap = static_cast<int>(parse_int(value, key, line));
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else {
      throw ConfigError(key, line, "unknown key");
    }
  }
  if (!na_ill_set) cfg.speckle.na_ill = cfg.psf_na;
  cfg.solver.i0 = cfg.speckle.i0;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("--config", 0, e.what());
  }
  return parse_config(text);
}

void ExperimentConfig::validate() const {
  try {
    grid.validate();
  } catch (const std::exception& e) {
    throw ConfigError("grid", 0, e.what());
  }
  if (target_kind == TargetKind::star) {
    if (target_arms < 2 || target_arms % 2 != 0)
      throw ConfigError("target.arms", 0, "must be an even integer >= 2");
  } else if (target_file.empty()) {
    throw ConfigError("target.file", 0, "required when target.kind = file");
  }
  if (!(psf_na > 0.0)) throw ConfigError("psf.na", 0, "must be > 0");
  try {
    speckle.validate();
  } catch (const std::exception& e) {
    throw ConfigError("speckle", 0, e.what());
  }
  NoiseSpec noise{noise_snr_db, noise_photons, noise_seed};
  try {
    noise.validate();
  } catch (const std::exception& e) {
    throw ConfigError("noise", 0, e.what());
  }
  if (estimator != EstimatorChoice::mean && speckle.m < 2)
    throw ConfigError("estimator", 0, "std estimator needs speckle.m >= 2");
  if (background_fraction < 0.0)
    throw ConfigError("background.fraction", 0, "must be >= 0");
  if (!background_file.empty() && background_fraction == 0.0)
    throw ConfigError("background.fraction", 0, "must be > 0 when background.file is set");
  SolverConfig s = solver;
  s.i0 = speckle.i0;
  try {
    s.validate(speckle.m);
  } catch (const std::exception& e) {
    throw ConfigError("solver", 0, e.what());
  }
  if (marginal_cap < 4) throw ConfigError("marginal.cap", 0, "must be >= 4");
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  out << "grid.n1 = " << grid.n1 << "\n";
  out << "grid.n2 = " << grid.n2 << "\n";
  out << "grid.pitch = " << fmt_double(grid.pitch) << "\n";
  out << "target.kind = " << (target_kind == TargetKind::star ? "star" : "file") << "\n";
  if (target_kind == TargetKind::star)
    out << "target.arms = " << target_arms << "\n";
  else
    out << "target.file = " << target_file << "\n";
  out << "psf.na = " << fmt_double(psf_na) << "\n";
  out << "speckle.m = " << speckle.m << "\n";
  out << "speckle.na_ill = " << fmt_double(speckle.na_ill) << "\n";
  out << "speckle.kind = "
      << (speckle.kind == SpeckleSpec::Kind::standard ? "standard" : "squared") << "\n";
  out << "speckle.i0 = " << fmt_double(speckle.i0) << "\n";
  out << "speckle.seed = " << speckle.seed << "\n";
  out << "noise.snr_db = " << (noise_snr_db ? fmt_double(*noise_snr_db) : "none") << "\n";
  out << "noise.photons = " << (noise_photons ? fmt_double(*noise_photons) : "none") << "\n";
  out << "noise.seed = " << noise_seed << "\n";
  out << "background.file = " << (background_file.empty() ? "none" : background_file) << "\n";
  out << "background.fraction = " << fmt_double(background_fraction) << "\n";
  out << "solver.p = " << solver.p << "\n";
  out << "solver.q = " << fmt_q(solver.q) << "\n";
  out << "solver.mu_tv = " << fmt_double(solver.mu_tv) << "\n";
  out << "solver.xi = " << (solver.xi_auto ? std::string("auto") : fmt_double(solver.xi)) << "\n";
  out << "solver.tau = " << fmt_double(solver.tau) << "\n";
  out << "solver.sigma = " << fmt_double(solver.sigma) << "\n";
  out << "solver.theta = " << fmt_double(solver.theta) << "\n";
  out << "solver.max_iters = " << solver.max_iters << "\n";
  out << "solver.rel_tol = " << fmt_double(solver.rel_tol) << "\n";
  out << "solver.log_every = " << solver.log_every << "\n";
  out << "estimator = " << estimator_name(estimator) << "\n";
  out << "marginal.enabled = " << (marginal_enabled ? "true" : "false") << "\n";
  out << "marginal.cap = " << marginal_cap << "\n";
  if (!output_dir.empty()) out << "output_dir = " << output_dir << "\n";
  return out.str();
}

}  // namespace specklesim
