#pragma once

#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "specklesim/operators.hpp"

namespace specklesim {

// Configuration of the constrained group-sparse reconstruction
//   min ||q||_{G,p,q}^q + mu_tv*||D q||_{G,2,1}  s.t.  ||H q - y|| <= xi.
struct SolverConfig {
  int p = 2;
  double q = 1.0;
  double mu_tv = 0.0;
  double xi = 0.0;
  bool xi_auto = true;  // xi = sqrt(M*N)*nu from the supplied/estimated noise std
  double tau = 0.35;
  double sigma = 1.0;
  double theta = 1.0;
  int max_iters = 2000;
  double rel_tol = 1e-6;
  double i0 = 1.0;
  int log_every = 25;

  bool valid_pq() const {
    return (p == 1 && q == 1.0) || (p == 2 && (q == 1.0 || q == 0.5 || std::abs(q - 2.0 / 3.0) < 1e-12));
  }
  // Throws on invalid (p,q), theta, or (for q = 1) a step-size product that
  // violates the convergence bound; returns a warning string for q < 1.
  std::string validate(int m) const;
};

// Primal and dual iterates of the splitting algorithm plus diagnostics.
struct PDState {
  ImageStack q_primal;  // reconstructed stack
  ImageStack d_dual;    // dual of the sparsity term
  GradField p_dual;     // dual of the TV term (zero-size when mu_tv = 0)
  ImageStack r_dual;    // dual of the data-fit ball
  int iter = 0;
  double feasibility_gap = 0.0;  // ||H q - y||_F at the returned iterate
  double sparsity_term = 0.0;
  double tv_term = 0.0;
  double objective = 0.0;  // sparsity_term + tv_term
  double xi_used = 0.0;
  double nu_used = 0.0;
  std::string stop_reason;
  std::string warnings;
  // (iter, value) samples at log points plus every iterate of the final
  // window; residual is the combined fixed-point step size over all variables.
  std::vector<std::pair<int, double>> objective_history;
  std::vector<std::pair<int, double>> residual_history;
};

using ProgressFn =
    std::function<void(int iter, double sparsity_term, double tv_term, double feasibility_gap)>;

// Gaussian-equivalent noise std estimated as the empirical standard deviation
// of (Y - smoothed Y), with H as the smoother. Used for xi = auto when the
// true noise level is unknown (e.g. Poisson-only noise).
double estimate_noise_std(const ImageStack& y, const PsfModel& psf);

// Primal-dual splitting for the constrained program. All prox steps go
// through the prox module via Moreau conjugation; iterates start at zero.
// When nu is supplied and xi_auto is set, xi = sqrt(M*N)*nu; without nu the
// noise std is estimated from the stack.
PDState pd_solve(const ImageStack& y, const PsfModel& psf, const SolverConfig& cfg,
                 std::optional<double> nu = std::nullopt, const ProgressFn& progress = nullptr);

// (sparsity_term, tv_term, feasibility_gap) of a state, recomputed fresh.
std::tuple<double, double, double> objective_value(const PDState& state, const SolverConfig& cfg,
                                                   const ImageStack& y, const PsfModel& psf);

enum class StopDecision { continue_run, converged, budget };
StopDecision stopping_check(double rel_change, int iter, const SolverConfig& cfg);

}  // namespace specklesim
