#pragma once

#include <Eigen/Dense>
#include <functional>

#include "specklesim/psf.hpp"

namespace specklesim {

// Second-order statistics of the measurement model for the covariance-matching
// estimator: Gamma_y(rho) = H diag(rho) Gamma_s diag(rho) H^T + noise_var*I.
// Dense matrices limited to N <= kCovGridCap pixels (the O(N^3) cost is only
// accepted at desk scale).
inline constexpr int kCovGridCap = 1024;

struct CovModel {
  Grid grid;
  double i0 = 1.0;
  double noise_var = 0.0;
  Eigen::MatrixXd gamma_s;  // N x N speckle covariance
  Eigen::MatrixXd h;        // N x N dense convolution matrix (normalized OTF)
};

// Speckle covariance Gamma_s(i,j) = i0^2 * |gamma(delta_ij)|^2 with gamma the
// normalized field autocorrelation of the disk pupil of radius na_ill*k0 and
// delta_ij the periodic pixel separation.
Eigen::MatrixXd speckle_covariance(const Grid& grid, double na_ill, double i0);

// Dense matrix of the periodic convolution with the normalized OTF.
Eigen::MatrixXd dense_h(const PsfModel& psf);

CovModel make_cov_model(const PsfModel& psf, double na_ill, double i0, double noise_var);

// Centered empirical covariance (1/M) * sum (y_m - y_bar)(y_m - y_bar)^T.
Eigen::MatrixXd empirical_covariance(const ImageStack& y);

// KL-style covariance-matching criterion (constant convention K = 0):
//   D_R(rho) = 0.5*log|Gamma_y| + 0.5*Tr(Gamma_y^{-1} Gamma_hat).
double marginal_objective(const Image& rho, const CovModel& cov,
                          const Eigen::MatrixXd& gamma_hat);

// Analytic gradient ((Omega^T (Gamma_y - Gamma_hat) Omega) o Gamma_s) rho,
// Omega = Gamma_y^{-1} H.
Image marginal_gradient(const Image& rho, const CovModel& cov, const Eigen::MatrixXd& gamma_hat);

// Objective and (optionally) gradient sharing one factorization of Gamma_y.
double marginal_eval(const Image& rho, const CovModel& cov, const Eigen::MatrixXd& gamma_hat,
                     Image* grad_out);

struct LbfgsOpts {
  int max_iters = 200;
  int memory = 10;
  double c1 = 1e-4;  // sufficient-decrease constant
  int max_backtracks = 40;
  double grad_tol = 1e-8;
  double rel_obj_tol = 1e-12;
};

struct LbfgsResult {
  Image x;
  double objective = 0.0;
  int iters = 0;
  bool line_search_failed = false;
  std::vector<double> history;  // objective at accepted iterates
};

// Limited-memory quasi-Newton with Armijo backtracking; negative entries are
// projected to zero between iterations and the best iterate is returned.
using ObjGradFn = std::function<double(const Image&, Image*)>;
LbfgsResult lbfgs_minimize(const ObjGradFn& fg, const Image& x0, const LbfgsOpts& opts = {});

// Convenience driver: fit rho by minimizing the marginal criterion from a
// flat initial guess.
LbfgsResult marginal_fit(const CovModel& cov, const Eigen::MatrixXd& gamma_hat,
                         const Image& rho0, const LbfgsOpts& opts = {});

}  // namespace specklesim
