#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "specklesim/datagen.hpp"
#include "specklesim/grid.hpp"
#include "specklesim/solver.hpp"

namespace specklesim {

// Raised on malformed or inconsistent configuration; carries the offending
// field and (when known) the config-file line for diagnostics. The CLI maps
// this to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, int line, const std::string& what_arg)
      : std::runtime_error(format(field, line, what_arg)),
        field_(field),
        line_(line) {}

  const std::string& field() const { return field_; }
  int line() const { return line_; }  // 0 when not tied to a file line

 private:
  static std::string format(const std::string& field, int line,
                            const std::string& what_arg) {
    std::string msg = "config error";
    if (line > 0) msg += " (line " + std::to_string(line) + ")";
    if (!field.empty()) msg += " [" + field + "]";
    msg += ": " + what_arg;
    return msg;
  }
  std::string field_;
  int line_;
};

enum class TargetKind { star, file };
enum class EstimatorChoice { mean, std_dev, both };

// Full experiment description: flat key = value text with dotted section
// prefixes (e.g. "solver.tau = 0.35"); '#' starts a comment. Unknown keys are
// rejected with a line diagnostic.
struct ExperimentConfig {
  Grid grid{128, 128, 0.05};

  TargetKind target_kind = TargetKind::star;
  int target_arms = 40;
  std::string target_file;  // used when target_kind == file

  double psf_na = 1.49;

  SpeckleSpec speckle{.m = 100,
                      .na_ill = 1.49,
                      .i0 = 1.0,
                      .kind = SpeckleSpec::Kind::standard,
                      .seed = 0};  // na_ill defaults to psf.na unless set explicitly

  std::optional<double> noise_snr_db = 40.0;
  std::optional<double> noise_photons;
  std::uint64_t noise_seed = 1000003;

  std::string background_file;   // empty = no background
  double background_fraction = 0.0;

  SolverConfig solver{};

  EstimatorChoice estimator = EstimatorChoice::both;

  bool marginal_enabled = false;
  int marginal_cap = 1024;

  std::string output_dir;

  // Cross-field consistency; throws ConfigError.
  void validate() const;

  // Canonical echo of every field, parseable by parse_config.
  std::string serialize() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// "1", "1/2", "2/3" or a decimal literal; throws ConfigError on junk.
double parse_q_value(const std::string& s, int line);

std::string estimator_name(EstimatorChoice c);

}  // namespace specklesim
