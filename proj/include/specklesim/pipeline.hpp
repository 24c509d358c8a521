#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "specklesim/config.hpp"

namespace specklesim {

// Each stage owns one subdirectory of the run root and refuses to write into
// it when non-empty unless `overwrite` is set.
inline constexpr const char* kSimDir = "sim";
inline constexpr const char* kReconDir = "recon";
inline constexpr const char* kEvalDir = "eval";
inline constexpr const char* kMarginalDir = "marginal";

// Creates dir (and parents); if it already exists non-empty, throws unless
// overwrite, in which case the contents are removed first.
void prepare_dir(const std::filesystem::path& dir, bool overwrite);

// Flat "key = value" manifest reader (comments '#', blank lines skipped).
std::map<std::string, std::string> parse_manifest(const std::string& text);

// Writes <dir>/manifest.txt: run kind, canonical config echo ("config." prefix),
// extra metadata pairs, and an FNV-1a hash per artifact file in dir.
void write_run_manifest(const std::filesystem::path& dir, const std::string& kind,
                        const ExperimentConfig& cfg,
                        const std::vector<std::pair<std::string, std::string>>& meta);

// simulate: writes rho_true, the measurement stack y_*, optional background,
// and a manifest holding the Gaussian noise std (meta.nu) and the matching
// exact discrepancy radius (meta.xi_real).
void run_simulate(const ExperimentConfig& cfg, const std::filesystem::path& root,
                  bool overwrite);

// reconstruct: reads <root>/sim, runs the primal-dual solver, writes the
// requested estimator images and solver_log.csv (xi recorded in the header).
void run_reconstruct(const ExperimentConfig& cfg, const std::filesystem::path& root,
                     bool overwrite);

// evaluate: RAPS curve CSV + key=value summary (Pearson correlations, and
// background correlations when the simulation included a background).
void run_evaluate(const ExperimentConfig& cfg, const std::filesystem::path& root,
                  bool overwrite);

// marginal: covariance-matching fit on the simulated stack (grid must not
// exceed marginal.cap pixels).
void run_marginal(const ExperimentConfig& cfg, const std::filesystem::path& root,
                  bool overwrite);

// simulate + reconstruct + evaluate (+ marginal when enabled).
void run_pipeline(const ExperimentConfig& cfg, const std::filesystem::path& root,
                  bool overwrite);

}  // namespace specklesim
