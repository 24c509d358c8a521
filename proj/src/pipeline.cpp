#include "specklesim/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "specklesim/datagen.hpp"
#include "specklesim/estimate.hpp"
#include "specklesim/io.hpp"
#include "specklesim/marginal.hpp"
#include "specklesim/solver.hpp"

namespace specklesim {

namespace {

namespace fs = std::filesystem;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

std::string strip_f32(const std::string& path) {
  if (path.size() > 4 && path.compare(path.size() - 4, 4, ".f32") == 0)
    return path.substr(0, path.size() - 4);
  return path;
}

void write_image_outputs(const fs::path& dir, const std::string& name, const Image& img,
                         const std::string& role) {
  write_image_f32(dir / name, img, role);
  write_pgm16(dir / (name + ".pgm"), max_normalized(img));
}

std::map<std::string, std::string> read_sim_manifest(const fs::path& root) {
  const fs::path file = root / kSimDir / "manifest.txt";
  if (!fs::exists(file))
    throw std::runtime_error("missing simulation metadata: " + file.string() +
                             " (run simulate first)");
  return parse_manifest(read_text_file(file));
}

// The convolution has unit DC gain, so the clean-stack mean equals the mean of
// rho .* I over frames and pixels; used to scale the background without a
// second simulation pass.
double clean_signal_mean(const Image& rho, const ImageStack& speckles) {
  double acc = 0.0;
  const std::size_t n = rho.grid.size();
  for (int f = 0; f < speckles.m; ++f) {
    const double* s = speckles.frame(f);
    for (std::size_t i = 0; i < n; ++i) acc += rho.v[i] * s[i];
  }
  return acc / (static_cast<double>(n) * speckles.m);
}

Image load_target(const ExperimentConfig& cfg) {
  if (cfg.target_kind == TargetKind::star) return make_star(cfg.grid, cfg.target_arms);
  Image img = read_image_f32(strip_f32(cfg.target_file));
  if (!(img.grid == cfg.grid))
    throw ConfigError("target.file", 0, "target grid does not match grid.n1/n2/pitch");
  for (double& x : img.v) x = std::max(0.0, x);
  return img;
}

}  // namespace

void prepare_dir(const fs::path& dir, bool overwrite) {
  if (fs::exists(dir) && !fs::is_directory(dir))
    throw std::runtime_error("output path exists and is not a directory: " + dir.string());
  if (fs::exists(dir) && !fs::is_empty(dir)) {
    if (!overwrite)
      throw std::runtime_error("refusing to write into non-empty directory " + dir.string() +
                               " (pass --overwrite to replace it)");
    fs::remove_all(dir);
  }
  fs::create_directories(dir);
}

std::map<std::string, std::string> parse_manifest(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r\n");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r\n");
      return s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    if (!key.empty()) out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

void write_run_manifest(const fs::path& dir, const std::string& kind,
                        const ExperimentConfig& cfg,
                        const std::vector<std::pair<std::string, std::string>>& meta) {
  std::ostringstream out;
  out << "manifest.kind = " << kind << "\n";
  {
    std::istringstream cfg_lines(cfg.serialize());
    std::string line;
    while (std::getline(cfg_lines, line))
      if (!line.empty()) out << "config." << line << "\n";
  }
  for (const auto& [k, v] : meta) out << "meta." << k << " = " << v << "\n";
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().filename() != "manifest.txt")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files)
    out << "artifact." << f.filename().string() << " = " << fnv1a64_hex(f) << "\n";
  write_text_file(dir / "manifest.txt", out.str());
}

void run_simulate(const ExperimentConfig& cfg, const fs::path& root, bool overwrite) {
  cfg.validate();
  const fs::path dir = root / kSimDir;
  prepare_dir(dir, overwrite);

  const Image rho = load_target(cfg);
  const PsfModel psf = make_psf(cfg.grid, cfg.psf_na);
  const ImageStack speckles = gen_speckle(cfg.speckle, cfg.grid);

  Image background(cfg.grid);
  bool have_background = false;
  if (!cfg.background_file.empty()) {
    const Image raw = read_image_f32(strip_f32(cfg.background_file));
    if (!(raw.grid == cfg.grid))
      throw ConfigError("background.file", 0, "background grid does not match grid.n1/n2/pitch");
    background = scale_background(raw, cfg.background_fraction,
                                  clean_signal_mean(rho, speckles));
    have_background = true;
  }

  const NoiseSpec noise{cfg.noise_snr_db, cfg.noise_photons, cfg.noise_seed};
  double nu = 0.0;
  const ImageStack y =
      simulate(rho, speckles, psf, noise, have_background ? &background : nullptr, &nu);

  write_image_outputs(dir, "rho_true", rho, "ground_truth");
  if (have_background) write_image_outputs(dir, "background", background, "background");
  write_stack(dir, y, "y");

  const double xi_real =
      std::sqrt(static_cast<double>(y.grid.size()) * y.m) * nu;
  write_run_manifest(dir, "simulate", cfg,
                     {{"nu", fmt(nu)},
                      {"xi_real", fmt(xi_real)},
                      {"poisson", cfg.noise_photons ? "true" : "false"},
                      {"background", have_background ? "true" : "false"}});
}

void run_reconstruct(const ExperimentConfig& cfg, const fs::path& root, bool overwrite) {
  cfg.validate();
  const auto sim_meta = read_sim_manifest(root);
  const fs::path dir = root / kReconDir;
  prepare_dir(dir, overwrite);

  const ImageStack y = read_stack(root / kSimDir, "y");
  const PsfModel psf = make_psf(y.grid, cfg.psf_na);

  SolverConfig scfg = cfg.solver;
  scfg.i0 = cfg.speckle.i0;

  // xi = auto wants the Gaussian noise level: taken from the simulation
  // metadata when the noise was purely Gaussian, re-estimated from the stack
  // (via the smoothing residual) when a Poisson component is present.
  std::optional<double> nu;
  if (scfg.xi_auto) {
    const auto it_p = sim_meta.find("meta.poisson");
    const auto it_nu = sim_meta.find("meta.nu");
    const bool poisson = it_p != sim_meta.end() && it_p->second == "true";
    if (!poisson) {
      if (it_nu == sim_meta.end())
        throw std::runtime_error("simulation manifest lacks meta.nu (needed for solver.xi = auto)");
      nu = std::stod(it_nu->second);
    }
  }

  std::vector<std::array<double, 4>> log_rows;
  const ProgressFn progress = [&](int iter, double sp, double tv, double gap) {
    log_rows.push_back({static_cast<double>(iter), sp, tv, gap});
  };
  const PDState state = pd_solve(y, psf, scfg, nu, progress);

  {
    std::ostringstream log;
    log << "# xi = " << fmt(state.xi_used) << "\n";
    log << "# nu = " << fmt(state.nu_used) << "\n";
    log << "# stop_reason = " << state.stop_reason << "\n";
    log << "iter,sparsity_term,tv_term,feasibility_gap\n";
    char row[160];
    for (const auto& r : log_rows) {
      std::snprintf(row, sizeof(row), "%d,%.10g,%.10g,%.10g\n", static_cast<int>(r[0]), r[1],
                    r[2], r[3]);
      log << row;
    }
    write_text_file(dir / "solver_log.csv", log.str());
  }

  if (cfg.estimator != EstimatorChoice::std_dev)
    write_image_outputs(dir, "rho_mean", rho_from_mean(state.q_primal, scfg.i0), "estimate_mean");
  if (cfg.estimator != EstimatorChoice::mean)
    write_image_outputs(dir, "rho_std", rho_from_std(state.q_primal), "estimate_std");

  write_run_manifest(dir, "reconstruct", cfg,
                     {{"xi_used", fmt(state.xi_used)},
                      {"nu_used", fmt(state.nu_used)},
                      {"iters", std::to_string(state.iter)},
                      {"stop_reason", state.stop_reason},
                      {"feasibility_gap", fmt(state.feasibility_gap)},
                      {"objective", fmt(state.objective)}});
}

void run_evaluate(const ExperimentConfig& cfg, const fs::path& root, bool overwrite) {
  cfg.validate();
  const fs::path dir = root / kEvalDir;
  const fs::path sim = root / kSimDir;
  const fs::path recon = root / kReconDir;
  if (!fs::exists(sim / "rho_true.f32"))
    throw std::runtime_error("missing " + (sim / "rho_true.f32").string() + " (run simulate first)");
  prepare_dir(dir, overwrite);

  const Image truth = read_image_f32(sim / "rho_true");
  const bool have_background = fs::exists(sim / "background.f32");
  Image background(truth.grid);
  if (have_background) background = read_image_f32(sim / "background");

  std::vector<std::pair<std::string, std::string>> meta;
  int evaluated = 0;
  for (const std::string name : {"rho_mean", "rho_std"}) {
    if (!fs::exists(recon / (name + ".f32"))) continue;
    ++evaluated;
    const Image est = read_image_f32(recon / name);
    const std::string tag = name == "rho_mean" ? "mean" : "std";
    const RapsCurve raps = raps_error(est, truth);
    write_text_file(dir / ("raps_" + tag + ".csv"), raps.to_csv());
    meta.emplace_back("corr." + tag, fmt(pearson_correlation(est, truth)));
    double f_mean = 0.0;
    for (double v : raps.values) f_mean += v;
    if (!raps.values.empty()) f_mean /= static_cast<double>(raps.values.size());
    meta.emplace_back("raps_mean." + tag, fmt(f_mean));
    if (have_background)
      meta.emplace_back("corr_background." + tag, fmt(pearson_correlation(est, background)));
  }
  if (evaluated == 0)
    throw std::runtime_error("no reconstruction images found in " + recon.string());

  {
    std::ostringstream summary;
    for (const auto& [k, v] : meta) summary << k << " = " << v << "\n";
    write_text_file(dir / "summary.txt", summary.str());
  }
  write_run_manifest(dir, "evaluate", cfg, meta);
}

void run_marginal(const ExperimentConfig& cfg, const fs::path& root, bool overwrite) {
  cfg.validate();
  if (cfg.grid.size() > static_cast<std::size_t>(cfg.marginal_cap))
    throw ConfigError("marginal.cap", 0,
                      "grid has " + std::to_string(cfg.grid.size()) +
                          " pixels, above the dense-covariance cap " +
                          std::to_string(cfg.marginal_cap));
  const auto sim_meta = read_sim_manifest(root);
  const fs::path dir = root / kMarginalDir;
  prepare_dir(dir, overwrite);

  const ImageStack y = read_stack(root / kSimDir, "y");
  const PsfModel psf = make_psf(y.grid, cfg.psf_na);

  double nu = 0.0;
  if (const auto it = sim_meta.find("meta.nu"); it != sim_meta.end()) nu = std::stod(it->second);
  const bool poisson =
      sim_meta.count("meta.poisson") && sim_meta.at("meta.poisson") == "true";
  if (poisson || nu <= 0.0) nu = std::max(estimate_noise_std(y, psf), 1e-6 * cfg.speckle.i0);

  const CovModel cov = make_cov_model(psf, cfg.speckle.na_ill, cfg.speckle.i0, nu * nu);
  const Eigen::MatrixXd gamma_hat = empirical_covariance(y);

  Image rho0 = rho_from_mean(y, cfg.speckle.i0);
  for (double& x : rho0.v) x = std::max(0.0, x);

  const LbfgsResult fit = marginal_fit(cov, gamma_hat, rho0);
  write_image_outputs(dir, "rho_marginal", fit.x, "estimate_marginal");
  write_run_manifest(dir, "marginal", cfg,
                     {{"nu_used", fmt(nu)},
                      {"objective", fmt(fit.objective)},
                      {"iters", std::to_string(fit.iters)},
                      {"line_search_failed", fit.line_search_failed ? "true" : "false"}});
}

void run_pipeline(const ExperimentConfig& cfg, const fs::path& root, bool overwrite) {
  run_simulate(cfg, root, overwrite);
  run_reconstruct(cfg, root, overwrite);
  run_evaluate(cfg, root, overwrite);
  if (cfg.marginal_enabled) run_marginal(cfg, root, overwrite);
}

}  // namespace specklesim
