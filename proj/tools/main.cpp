// speckle_sim: synthetic blind speckle-illumination experiments end to end —
// simulate measurement stacks, reconstruct by constrained group-sparse
// primal-dual splitting, evaluate against ground truth, and (at desk scale)
// fit the covariance-matching marginal estimator.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "specklesim/config.hpp"
#include "specklesim/pipeline.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool overwrite = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* cfg = cmd->add_option("--config", args.config_path, "experiment config file (key = value)");
  if (config_required) cfg->required();
  cmd->add_option("--out", args.out_dir, "run output directory");
  cmd->add_option("--seed", args.seed,
                  "override config seeds (speckle.seed = seed, noise.seed = seed + 1000003)");
  cmd->add_flag("--overwrite", args.overwrite, "replace non-empty stage directories");
}

specklesim::ExperimentConfig resolve_config(const CommonArgs& args) {
  specklesim::ExperimentConfig cfg = args.config_path.empty()
                                         ? specklesim::ExperimentConfig{}
                                         : specklesim::load_config(args.config_path);
  if (args.seed) {
    cfg.speckle.seed = *args.seed;
    cfg.noise_seed = *args.seed + 1000003ull;
  }
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
  if (cfg.output_dir.empty())
    throw specklesim::ConfigError("--out", 0, "no output directory (set --out or output_dir)");
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"blind speckle-illumination super-resolution toolbox"};
  app.require_subcommand(1);

  // Serial implementation: the env var contract only caps parallelism, and a
  // cap of >= 1 is always honored; reject nonsense values for early feedback.
  if (const char* threads = std::getenv("SPECKLE_SIM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(threads, &end, 10);
    if (end == threads || *end != '\0' || v < 1) {
      std::fprintf(stderr, "error: SPECKLE_SIM_THREADS must be a positive integer, got '%s'\n",
                   threads);
      return 1;
    }
  }

  CommonArgs sim_args, rec_args, eval_args, marg_args, pipe_args;
  auto* sim = app.add_subcommand("simulate", "generate target, speckle stack, noisy measurements");
  add_common(sim, sim_args, true);
  auto* rec = app.add_subcommand("reconstruct", "solve the constrained inverse problem on a simulated stack");
  add_common(rec, rec_args, true);
  auto* eval = app.add_subcommand("evaluate", "RAPS curves and correlations against ground truth");
  add_common(eval, eval_args, true);
  auto* marg = app.add_subcommand("marginal", "covariance-matching estimator (desk-scale grids)");
  add_common(marg, marg_args, true);
  auto* pipe = app.add_subcommand("pipeline", "simulate + reconstruct + evaluate (+ marginal when enabled)");
  add_common(pipe, pipe_args, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      const auto cfg = resolve_config(sim_args);
      specklesim::run_simulate(cfg, cfg.output_dir, sim_args.overwrite);
    } else if (rec->parsed()) {
      const auto cfg = resolve_config(rec_args);
      specklesim::run_reconstruct(cfg, cfg.output_dir, rec_args.overwrite);
    } else if (eval->parsed()) {
      const auto cfg = resolve_config(eval_args);
      specklesim::run_evaluate(cfg, cfg.output_dir, eval_args.overwrite);
    } else if (marg->parsed()) {
      const auto cfg = resolve_config(marg_args);
      specklesim::run_marginal(cfg, cfg.output_dir, marg_args.overwrite);
    } else if (pipe->parsed()) {
      const auto cfg = resolve_config(pipe_args);
      specklesim::run_pipeline(cfg, cfg.output_dir, pipe_args.overwrite);
    }
  } catch (const specklesim::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
