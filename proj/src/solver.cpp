#include "specklesim/solver.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "specklesim/prox.hpp"

namespace specklesim {

namespace {

constexpr double kFeasibleSlack = 1.05;  // feasibility margin for best-iterate tracking

double stack_sparsity(const ImageStack& q, int p, double qexp, std::vector<double>& norms) {
  const std::size_t n = q.grid.size();
  if (p == 1) {
    double s = 0.0;
    for (double x : q.v) s += std::abs(x);
    return s;
  }
  norms.assign(n, 0.0);
  for (int f = 0; f < q.m; ++f) {
    const double* fr = q.frame(f);
    for (std::size_t i = 0; i < n; ++i) norms[i] += fr[i] * fr[i];
  }
  double s = 0.0;
  if (qexp == 1.0) {
    for (std::size_t i = 0; i < n; ++i) s += std::sqrt(norms[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) s += std::pow(std::sqrt(norms[i]), qexp);
  }
  return s;
}

double stack_tv(const ImageStack& q, double i0, double mu) {
  if (mu == 0.0) return 0.0;
  const GradField g = op_C(op_A(q, i0));
  double s = 0.0;
  for (std::size_t i = 0; i < g.gx.v.size(); ++i) s += std::hypot(g.gx.v[i], g.gy.v[i]);
  return mu * s;
}

double stack_gap(const Convolver& conv, const ImageStack& q, const ImageStack& y,
                 std::vector<double>& scratch) {
  const std::size_t n = q.grid.size();
  scratch.resize(n);
  double s = 0.0;
  for (int f = 0; f < q.m; ++f) {
    conv.apply(q.frame(f), scratch.data(), false);
    const double* yf = y.frame(f);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = scratch[i] - yf[i];
      s += d * d;
    }
  }
  return std::sqrt(s);
}

}  // namespace

std::string SolverConfig::validate(int m) const {
  if (!valid_pq())
    throw std::invalid_argument("SolverConfig: (p, q) must be one of (1,1), (2,1), (2,1/2), (2,2/3)");
  if (!(theta > 0.0 && theta < 2.0))
    throw std::invalid_argument("SolverConfig: theta must lie in (0, 2)");
  if (!(tau > 0.0 && sigma > 0.0))
    throw std::invalid_argument("SolverConfig: tau and sigma must be > 0");
  if (mu_tv < 0.0) throw std::invalid_argument("SolverConfig: mu_tv must be >= 0");
  if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
  if (!(i0 > 0.0)) throw std::invalid_argument("SolverConfig: i0 must be > 0");
  const double bound = (mu_tv > 0.0) ? step_size_bound(m, i0) : 2.0;
  if (q == 1.0) {
    if (tau * sigma * bound > 1.0 + 1e-12)
      throw std::invalid_argument("SolverConfig: tau*sigma exceeds 1/||I + D*D + H*H||; convergence not guaranteed");
    return {};
  }
  if (tau * sigma * bound > 1.0 + 1e-12)
    return "warning: tau*sigma exceeds the q = 1 convergence bound (no guarantee for q < 1 anyway)\n";
  return {};
}

double estimate_noise_std(const ImageStack& y, const PsfModel& psf) {
  check_same_grid(y.grid, psf.grid, "estimate_noise_std");
  Convolver conv(psf);
  const std::size_t n = y.grid.size();
  std::vector<double> smooth(n);
  double s = 0.0;
  for (int f = 0; f < y.m; ++f) {
    conv.apply(y.frame(f), smooth.data(), false);
    const double* yf = y.frame(f);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = yf[i] - smooth[i];
      s += r * r;
    }
  }
  return std::sqrt(s / static_cast<double>(y.v.size()));
}

StopDecision stopping_check(double rel_change, int iter, const SolverConfig& cfg) {
  if (iter >= cfg.max_iters) return StopDecision::budget;
  if (iter >= 1 && rel_change < cfg.rel_tol) return StopDecision::converged;
  return StopDecision::continue_run;
}

std::tuple<double, double, double> objective_value(const PDState& state, const SolverConfig& cfg,
                                                   const ImageStack& y, const PsfModel& psf) {
  std::vector<double> norms;
  const double sp = stack_sparsity(state.q_primal, cfg.p, cfg.q, norms);
  const double tv = stack_tv(state.q_primal, cfg.i0, cfg.mu_tv);
  Convolver conv(psf);
  std::vector<double> scratch;
  const double gap = stack_gap(conv, state.q_primal, y, scratch);
  return {sp, tv, gap};
}

PDState pd_solve(const ImageStack& y, const PsfModel& psf, const SolverConfig& cfg,
                 std::optional<double> nu, const ProgressFn& progress) {
  check_same_grid(y.grid, psf.grid, "pd_solve");
  for (double x : y.v)
    if (!std::isfinite(x)) throw std::invalid_argument("pd_solve: non-finite input");
  const int m = y.m;
  const std::size_t n = y.grid.size();
  const std::size_t total = y.v.size();

  PDState state;
  state.warnings = cfg.validate(m);

  double nu_used = nu.value_or(-1.0);
  double xi = cfg.xi;
  if (cfg.xi_auto) {
    if (nu_used < 0.0) nu_used = estimate_noise_std(y, psf);
    xi = std::sqrt(static_cast<double>(total)) * nu_used;
  }
  if (xi < 0.0) throw std::invalid_argument("pd_solve: xi must be >= 0");
  state.xi_used = xi;
  state.nu_used = std::max(nu_used, 0.0);

  const bool with_tv = cfg.mu_tv > 0.0;
  const double tau = cfg.tau, sigma = cfg.sigma, theta = cfg.theta;
  const double a_scale = 1.0 / (static_cast<double>(m) * cfg.i0);

  Convolver conv(psf);
  ImageStack q(y.grid, m), d(y.grid, m), r(y.grid, m);
  ImageStack qbar(y.grid, m), t(y.grid, m), vbuf(y.grid, m);
  Image px(y.grid), py(y.grid);
  Image at_sum(y.grid), divg(y.grid);
  std::vector<double> frame_scratch(n), norms(n);

  const bool track_best = cfg.q < 1.0;
  ImageStack best_q;
  double best_obj = std::numeric_limits<double>::infinity();
  bool have_best = false;

  double last_gap = norm2(y.v);  // gap at the zero initialization
  int iter = 0;
  while (true) {
    // q step: qbar = q - tau*(d + D*p + H*r); t = 2*qbar - q.
    if (with_tv) {
      GradField pg{px, py};
      divg = op_C_adjoint(pg);
      for (std::size_t i = 0; i < n; ++i) divg.v[i] *= a_scale;
    }
    if (with_tv)
      for (std::size_t i = 0; i < n; ++i) at_sum.v[i] = 0.0;
    for (int f = 0; f < m; ++f) {
      conv.apply(r.frame(f), frame_scratch.data(), true);
      const double* qf = q.frame(f);
      const double* df = d.frame(f);
      double* qb = qbar.frame(f);
      double* tf = t.frame(f);
      if (with_tv) {
        for (std::size_t i = 0; i < n; ++i) {
          const double v = qf[i] - tau * (df[i] + divg.v[i] + frame_scratch[i]);
          qb[i] = v;
          tf[i] = 2.0 * v - qf[i];
          at_sum.v[i] += tf[i];
        }
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          const double v = qf[i] - tau * (df[i] + frame_scratch[i]);
          qb[i] = v;
          tf[i] = 2.0 * v - qf[i];
        }
      }
    }

    // d step: dbar = prox_{sigma g1*}(d + sigma*t), then relaxation.
    for (std::size_t i = 0; i < total; ++i) vbuf.v[i] = d.v[i] + sigma * t.v[i];
    conj_prox_rows_inplace(vbuf.v.data(), m, n, sigma, cfg.p, cfg.q, norms);
    double res2 = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
      const double nd = theta * vbuf.v[i] + (1.0 - theta) * d.v[i];
      const double delta = nd - d.v[i];
      res2 += delta * delta;
      d.v[i] = nd;
    }

    // p step (TV dual): pbar = prox_{sigma g2*}(p + sigma*D t).
    if (with_tv) {
      for (std::size_t i = 0; i < n; ++i) at_sum.v[i] *= a_scale;
      GradField g = op_C(at_sum);
      for (std::size_t i = 0; i < n; ++i) {
        g.gx.v[i] = px.v[i] + sigma * g.gx.v[i];
        g.gy.v[i] = py.v[i] + sigma * g.gy.v[i];
      }
      conj_prox_pairs_inplace(g.gx.v.data(), g.gy.v.data(), n, sigma, cfg.mu_tv);
      for (std::size_t i = 0; i < n; ++i) {
        const double nx = theta * g.gx.v[i] + (1.0 - theta) * px.v[i];
        const double ny = theta * g.gy.v[i] + (1.0 - theta) * py.v[i];
        const double dx = nx - px.v[i], dy = ny - py.v[i];
        res2 += dx * dx + dy * dy;
        px.v[i] = nx;
        py.v[i] = ny;
      }
    }

    // r step: rbar = prox_{sigma g3*}(r + sigma*H t).
    for (int f = 0; f < m; ++f) {
      conv.apply(t.frame(f), frame_scratch.data(), false);
      const double* rf = r.frame(f);
      double* vf = vbuf.frame(f);
      for (std::size_t i = 0; i < n; ++i) vf[i] = rf[i] + sigma * frame_scratch[i];
    }
    conj_prox_ball_inplace(vbuf.v.data(), y.v.data(), total, sigma, xi);
    for (std::size_t i = 0; i < total; ++i) {
      const double nr = theta * vbuf.v[i] + (1.0 - theta) * r.v[i];
      const double delta = nr - r.v[i];
      res2 += delta * delta;
      r.v[i] = nr;
    }

    // q relaxation. Stationarity is the combined relaxed step over every
    // primal and dual variable, relative to the current state norm — the
    // primal alone is blind to dual movement (it stays exactly zero through
    // the first iteration from the zero start).
    double dq2 = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
      const double nq = theta * qbar.v[i] + (1.0 - theta) * q.v[i];
      const double delta = nq - q.v[i];
      dq2 += delta * delta;
      q.v[i] = nq;
    }
    res2 += dq2;
    double sn2 = 0.0;
    for (std::size_t i = 0; i < total; ++i)
      sn2 += q.v[i] * q.v[i] + d.v[i] * d.v[i] + r.v[i] * r.v[i];
    if (with_tv)
      for (std::size_t i = 0; i < n; ++i) sn2 += px.v[i] * px.v[i] + py.v[i] * py.v[i];
    ++iter;
    const double rel_change =
        std::sqrt(res2) / std::max(std::sqrt(sn2), std::numeric_limits<double>::epsilon());

    const double sp = stack_sparsity(q, cfg.p, cfg.q, norms);
    const double tv = stack_tv(q, cfg.i0, cfg.mu_tv);
    state.objective_history.emplace_back(iter, sp + tv);
    state.residual_history.emplace_back(iter, std::sqrt(res2));

    const bool log_point = (iter % cfg.log_every == 0) || iter == cfg.max_iters;
    if (log_point) {
      last_gap = stack_gap(conv, q, y, frame_scratch);
      if (progress) progress(iter, sp, tv, last_gap);
      if (track_best && last_gap <= kFeasibleSlack * std::max(xi, 0.0) + 1e-300 &&
          sp + tv < best_obj) {
        best_obj = sp + tv;
        best_q = q;
        have_best = true;
      }
    }

    const StopDecision decision = stopping_check(rel_change, iter, cfg);
    if (decision == StopDecision::converged) {
      state.stop_reason = "converged";
      break;
    }
    if (decision == StopDecision::budget) {
      state.stop_reason = "budget";
      break;
    }
  }

  state.iter = iter;
  state.q_primal = std::move(q);
  if (track_best && have_best) {
    state.q_primal = std::move(best_q);
    state.stop_reason += " (best feasible iterate by objective)";
  }
  state.d_dual = std::move(d);
  state.r_dual = std::move(r);
  if (with_tv) state.p_dual = GradField{std::move(px), std::move(py)};
  state.sparsity_term = stack_sparsity(state.q_primal, cfg.p, cfg.q, norms);
  state.tv_term = stack_tv(state.q_primal, cfg.i0, cfg.mu_tv);
  state.objective = state.sparsity_term + state.tv_term;
  state.feasibility_gap = stack_gap(conv, state.q_primal, y, frame_scratch);
  return state;
}

}  // namespace specklesim
