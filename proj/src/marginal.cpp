#include "specklesim/marginal.hpp"

#include <cmath>
#include <complex>
#include <deque>

#include "specklesim/fft.hpp"

namespace specklesim {

namespace {

void check_cap(const Grid& grid, const char* where) {
  if (grid.size() > static_cast<std::size_t>(kCovGridCap))
    throw std::invalid_argument(std::string(where) + ": grid exceeds the N <= " +
                                std::to_string(kCovGridCap) + " marginal-estimator cap");
}

}  // namespace

Eigen::MatrixXd speckle_covariance(const Grid& grid, double na_ill, double i0) {
  grid.validate();
  check_cap(grid, "speckle_covariance");
  if (!(na_ill > 0.0) || !(i0 > 0.0))
    throw std::invalid_argument("speckle_covariance: na_ill and i0 must be > 0");
  const int n1 = grid.n1, n2 = grid.n2;
  const std::size_t n = grid.size();

  // Normalized field autocorrelation gamma = DFT of the pupil disk mask.
  Fft2D fft(n1, n2);
  std::vector<std::complex<double>> mask(n, 0.0), gam(n);
  const double rad2 = na_ill * grid.pitch * na_ill * grid.pitch;
  for (int i = 0; i < n1; ++i) {
    const double fi = fft_freq(i, n1);
    for (int j = 0; j < n2; ++j) {
      const double fj = fft_freq(j, n2);
      if (fi * fi + fj * fj <= rad2) mask[static_cast<std::size_t>(i) * n2 + j] = 1.0;
    }
  }
  fft.inverse_c2c(mask.data(), gam.data());
  const double g0 = gam[0].real();
  if (!(g0 > 0.0)) throw std::runtime_error("speckle_covariance: empty pupil disk");

  Eigen::MatrixXd gamma_s(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    const int ai = static_cast<int>(a) / n2, aj = static_cast<int>(a) % n2;
    for (std::size_t b = 0; b < n; ++b) {
      const int bi = static_cast<int>(b) / n2, bj = static_cast<int>(b) % n2;
      const int di = (ai - bi + n1) % n1;
      const int dj = (aj - bj + n2) % n2;
      const double g = gam[static_cast<std::size_t>(di) * n2 + dj].real() / g0;
      gamma_s(a, b) = i0 * i0 * g * g;
    }
  }
  return gamma_s;
}

Eigen::MatrixXd dense_h(const PsfModel& psf) {
  check_cap(psf.grid, "dense_h");
  const int n1 = psf.grid.n1, n2 = psf.grid.n2;
  const std::size_t n = psf.grid.size();
  // Kernel of the normalized-OTF convolution: inverse transform of otf.
  Fft2D fft(n1, n2);
  std::vector<double> delta(n, 0.0), kern(n);
  delta[0] = 1.0;
  std::vector<std::complex<double>> spec(fft.spec_size());
  fft.forward_r2c(delta.data(), spec.data());
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= psf.otf[i];
  fft.inverse_c2r(spec.data(), kern.data());

  Eigen::MatrixXd h(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    const int ai = static_cast<int>(a) / n2, aj = static_cast<int>(a) % n2;
    for (std::size_t b = 0; b < n; ++b) {
      const int bi = static_cast<int>(b) / n2, bj = static_cast<int>(b) % n2;
      const int di = (ai - bi + n1) % n1;
      const int dj = (aj - bj + n2) % n2;
      h(a, b) = kern[static_cast<std::size_t>(di) * n2 + dj];
    }
  }
  return h;
}

CovModel make_cov_model(const PsfModel& psf, double na_ill, double i0, double noise_var) {
  if (noise_var < 0.0) throw std::invalid_argument("make_cov_model: noise_var must be >= 0");
  CovModel cov;
  cov.grid = psf.grid;
  cov.i0 = i0;
  cov.noise_var = noise_var;
  cov.gamma_s = speckle_covariance(psf.grid, na_ill, i0);
  cov.h = dense_h(psf);
  return cov;
}

Eigen::MatrixXd empirical_covariance(const ImageStack& y) {
  check_cap(y.grid, "empirical_covariance");
  const std::size_t n = y.grid.size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  for (int f = 0; f < y.m; ++f) {
    const double* fr = y.frame(f);
    for (std::size_t i = 0; i < n; ++i) mean(i) += fr[i];
  }
  mean /= static_cast<double>(y.m);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd c(n);
  for (int f = 0; f < y.m; ++f) {
    const double* fr = y.frame(f);
    for (std::size_t i = 0; i < n; ++i) c(i) = fr[i] - mean(i);
    cov.noalias() += c * c.transpose();
  }
  cov /= static_cast<double>(y.m);
  return cov;
}

namespace {

struct GammaY {
  Eigen::MatrixXd gamma_y;
  Eigen::LLT<Eigen::MatrixXd> llt;
};

GammaY build_gamma_y(const Image& rho, const CovModel& cov) {
  check_same_grid(rho.grid, cov.grid, "marginal");
  const std::size_t n = cov.grid.size();
  for (double x : rho.v)
    if (x < 0.0) throw std::invalid_argument("marginal: rho must be >= 0");
  Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(rho.v.data(), n);
  const Eigen::MatrixXd hd = cov.h * r.asDiagonal();
  GammaY out;
  out.gamma_y = hd * cov.gamma_s * hd.transpose();
  out.gamma_y.diagonal().array() += cov.noise_var;
  out.llt.compute(out.gamma_y);
  if (out.llt.info() != Eigen::Success)
    throw std::runtime_error("marginal: Gamma_y is not positive definite (noise_var > 0 required)");
  return out;
}

}  // namespace

double marginal_eval(const Image& rho, const CovModel& cov, const Eigen::MatrixXd& gamma_hat,
                     Image* grad_out) {
  const std::size_t n = cov.grid.size();
  if (gamma_hat.rows() != static_cast<Eigen::Index>(n) ||
      gamma_hat.cols() != static_cast<Eigen::Index>(n))
    throw std::invalid_argument("marginal: gamma_hat size mismatch");
  GammaY gy = build_gamma_y(rho, cov);
  double logdet = 0.0;
  const auto& l = gy.llt.matrixLLT();
  for (std::size_t i = 0; i < n; ++i) logdet += std::log(l(i, i));
  logdet *= 2.0;
  const Eigen::MatrixXd solved = gy.llt.solve(gamma_hat);
  const double objective = 0.5 * logdet + 0.5 * solved.trace();
  if (grad_out) {
    const Eigen::MatrixXd omega = gy.llt.solve(cov.h);  // Gamma_y^{-1} H
    const Eigen::MatrixXd b =
        omega.transpose() * (gy.gamma_y - gamma_hat) * omega;  // N x N
    Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(rho.v.data(), n);
    Eigen::VectorXd g = b.cwiseProduct(cov.gamma_s) * r;
    grad_out->grid = cov.grid;
    grad_out->v.assign(g.data(), g.data() + n);
  }
  return objective;
}

double marginal_objective(const Image& rho, const CovModel& cov,
                          const Eigen::MatrixXd& gamma_hat) {
  return marginal_eval(rho, cov, gamma_hat, nullptr);
}

Image marginal_gradient(const Image& rho, const CovModel& cov, const Eigen::MatrixXd& gamma_hat) {
  Image grad;
  marginal_eval(rho, cov, gamma_hat, &grad);
  return grad;
}

LbfgsResult lbfgs_minimize(const ObjGradFn& fg, const Image& x0, const LbfgsOpts& opts) {
  const std::size_t n = x0.v.size();
  Image x = x0;
  for (double& v : x.v) v = std::max(v, 0.0);
  Image grad(x.grid);
  double fx = fg(x, &grad);

  LbfgsResult result;
  result.x = x;
  result.objective = fx;
  result.history.push_back(fx);

  std::deque<std::vector<double>> s_list, y_list;
  std::deque<double> rho_list;
  std::vector<double> dir(n);
  Image x_trial(x.grid), g_trial(x.grid);

  for (int it = 0; it < opts.max_iters; ++it) {
    const double gnorm = norm2(grad.v);
    if (gnorm <= opts.grad_tol) break;

    // Two-loop recursion for dir = -H * grad.
    dir = grad.v;
    std::vector<double> alpha(s_list.size());
    for (std::size_t k = s_list.size(); k-- > 0;) {
      alpha[k] = rho_list[k] * dot(s_list[k], dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] -= alpha[k] * y_list[k][i];
    }
    if (!s_list.empty()) {
      const auto& s = s_list.back();
      const auto& yv = y_list.back();
      const double gamma = dot(s, yv) / dot(yv, yv);
      for (double& v : dir) v *= gamma;
    }
    for (std::size_t k = 0; k < s_list.size(); ++k) {
      const double beta = rho_list[k] * dot(y_list[k], dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] += (alpha[k] - beta) * s_list[k][i];
    }
    for (double& v : dir) v = -v;

    double descent = dot(grad.v, dir);
    if (!(descent < 0.0)) {
      // Not a descent direction: reset memory, fall back to steepest descent.
      s_list.clear();
      y_list.clear();
      rho_list.clear();
      for (std::size_t i = 0; i < n; ++i) dir[i] = -grad.v[i];
      descent = -gnorm * gnorm;
    }

    // Backtracking line search with projection to rho >= 0.
    double step = 1.0;
    bool accepted = false;
    double f_trial = fx;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      for (std::size_t i = 0; i < n; ++i) x_trial.v[i] = std::max(x.v[i] + step * dir[i], 0.0);
      f_trial = fg(x_trial, &g_trial);
      if (f_trial <= fx + opts.c1 * step * descent) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      result.line_search_failed = true;
      break;
    }

    std::vector<double> s_vec(n), y_vec(n);
    for (std::size_t i = 0; i < n; ++i) {
      s_vec[i] = x_trial.v[i] - x.v[i];
      y_vec[i] = g_trial.v[i] - grad.v[i];
    }
    const double sy = dot(s_vec, y_vec);
    if (sy > 1e-12 * norm2(s_vec) * norm2(y_vec)) {
      s_list.push_back(std::move(s_vec));
      y_list.push_back(std::move(y_vec));
      rho_list.push_back(1.0 / sy);
      if (static_cast<int>(s_list.size()) > opts.memory) {
        s_list.pop_front();
        y_list.pop_front();
        rho_list.pop_front();
      }
    }

    const double prev = fx;
    x = x_trial;
    grad = g_trial;
    fx = f_trial;
    result.iters = it + 1;
    result.history.push_back(fx);
    if (fx < result.objective) {
      result.objective = fx;
      result.x = x;
    }
    if (std::abs(prev - fx) <= opts.rel_obj_tol * std::max(1.0, std::abs(prev))) break;
  }
  return result;
}

LbfgsResult marginal_fit(const CovModel& cov, const Eigen::MatrixXd& gamma_hat,
                         const Image& rho0, const LbfgsOpts& opts) {
  return lbfgs_minimize(
      [&](const Image& rho, Image* grad) { return marginal_eval(rho, cov, gamma_hat, grad); },
      rho0, opts);
}

}  // namespace specklesim
