#include "specklesim/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace specklesim {

namespace {

void check_lambda(double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("prox: lambda must be >= 0");
}

constexpr double kTwoThirds = 2.0 / 3.0;

bool is_half(double q) { return q == 0.5; }
bool is_two_thirds(double q) { return std::abs(q - kTwoThirds) < 1e-12; }

}  // namespace

double soft_threshold(double x, double lambda) {
  const double a = std::abs(x) - lambda;
  return a > 0.0 ? std::copysign(a, x) : 0.0;
}

double group_shrink_factor_l21(double nrm, double lambda) {
  if (nrm > lambda) return 1.0 - lambda / nrm;
  return 0.0;
}

double group_shrink_factor_l2q(double nrm, double lambda, double q) {
  if (lambda == 0.0) return 1.0;
  if (is_half(q)) {
    // Threshold (3/2)*lambda^(2/3); above it the prox is
    //   16*nrm^(3/2)*omega / (3*sqrt(3)*lambda + 16*nrm^(3/2)*omega) * x
    // with omega = cos^3(pi/3 - psi/3), psi = arccos((lambda/4)*(3/nrm)^(3/2)).
    const double threshold = 1.5 * std::pow(lambda, kTwoThirds);
    if (nrm <= threshold) return 0.0;
    const double arg = std::clamp(lambda / 4.0 * std::pow(3.0 / nrm, 1.5), -1.0, 1.0);
    const double psi = std::acos(arg);
    const double c = std::cos(std::numbers::pi / 3.0 - psi / 3.0);
    const double omega = c * c * c;
    const double s = 16.0 * std::pow(nrm, 1.5) * omega;
    return s / (3.0 * std::sqrt(3.0) * lambda + s);
  }
  if (is_two_thirds(q)) {
    // Threshold 2*(2*lambda/3)^(3/4); above it the prox is
    //   3*eta^4 / (2*lambda + 3*eta^4) * x
    // with eta = (a + sqrt(2*nrm/a - a^2))/2,
    //      a = (2/sqrt(3)) * (2*lambda)^(1/4) * sqrt(cosh(phi/3)),
    //      phi = arccosh(27*nrm^2 / (16*(2*lambda)^(3/2))).
    const double threshold = 2.0 * std::pow(2.0 * lambda / 3.0, 0.75);
    if (nrm <= threshold) return 0.0;
    const double arg = std::max(1.0, 27.0 * nrm * nrm / (16.0 * std::pow(2.0 * lambda, 1.5)));
    const double phi = std::acosh(arg);
    const double a = 2.0 / std::sqrt(3.0) * std::pow(2.0 * lambda, 0.25) *
                     std::sqrt(std::cosh(phi / 3.0));
    const double disc = std::max(0.0, 2.0 * nrm / a - a * a);
    const double eta = (a + std::sqrt(disc)) / 2.0;
    const double e4 = eta * eta * eta * eta;
    return 3.0 * e4 / (2.0 * lambda + 3.0 * e4);
  }
  throw std::invalid_argument("group_shrink_factor_l2q: q must be 1/2 or 2/3");
}

double group_shrink_factor(double nrm, double lambda, int p, double q) {
  if (p == 2 && q == 1.0) return group_shrink_factor_l21(nrm, lambda);
  if (p == 2) return group_shrink_factor_l2q(nrm, lambda, q);
  throw std::invalid_argument("group_shrink_factor: unsupported (p, q)");
}

GroupedVector prox_l11(const GroupedVector& x, double lambda) {
  check_lambda(lambda);
  GroupedVector out = x;
  for (double& v : out.values) v = soft_threshold(v, lambda);
  return out;
}

namespace {

GroupedVector prox_group_l2_common(const GroupedVector& x, double lambda, double q) {
  GroupedVector out = x;
  const std::size_t g = x.group_size;
  for (std::size_t k = 0; k < x.group_count(); ++k) {
    double* grp = out.values.data() + k * g;
    double s = 0.0;
    for (std::size_t i = 0; i < g; ++i) s += grp[i] * grp[i];
    const double nrm = std::sqrt(s);
    const double f = (q == 1.0) ? group_shrink_factor_l21(nrm, lambda)
                                : group_shrink_factor_l2q(nrm, lambda, q);
    for (std::size_t i = 0; i < g; ++i) grp[i] *= f;
  }
  return out;
}

}  // namespace

GroupedVector prox_group_l21(const GroupedVector& x, double lambda) {
  check_lambda(lambda);
  return prox_group_l2_common(x, lambda, 1.0);
}

GroupedVector prox_group_l2q(const GroupedVector& x, double lambda, double q) {
  check_lambda(lambda);
  if (!is_half(q) && !is_two_thirds(q))
    throw std::invalid_argument("prox_group_l2q: q must be 1/2 or 2/3");
  return prox_group_l2_common(x, lambda, q);
}

GroupedVector prox_lpq(const GroupedVector& x, double lambda, int p, double q) {
  if (p == 1 && q == 1.0) return prox_l11(x, lambda);
  if (p == 2 && q == 1.0) return prox_group_l21(x, lambda);
  if (p == 2) return prox_group_l2q(x, lambda, q);
  throw std::invalid_argument("prox_lpq: unsupported (p, q)");
}

GroupedVector moreau_conjugate_prox(const ProxFn& prox_f, const GroupedVector& x, double sigma,
                                    GroupedVector* inner_out) {
  if (!(sigma > 0.0)) throw std::invalid_argument("moreau_conjugate_prox: sigma must be > 0");
  GroupedVector scaled = x;
  for (double& v : scaled.values) v /= sigma;
  GroupedVector inner = prox_f(scaled, 1.0 / sigma);
  if (inner.values.size() != x.values.size())
    throw std::invalid_argument("moreau_conjugate_prox: prox_f changed the size");
  GroupedVector out = x;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= sigma * inner.values[i];
  if (inner_out) *inner_out = std::move(inner);
  return out;
}

std::vector<double> project_l2_ball(const std::vector<double>& x, const std::vector<double>& y,
                                    double xi) {
  if (x.size() != y.size()) throw std::invalid_argument("project_l2_ball: shape mismatch");
  if (xi < 0.0) throw std::invalid_argument("project_l2_ball: xi must be >= 0");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  const double dist = std::sqrt(s);
  if (dist <= xi) return x;
  if (dist == 0.0) return y;  // xi == 0 and x == y
  std::vector<double> out(x.size());
  const double f = xi / dist;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = y[i] + f * (x[i] - y[i]);
  return out;
}

void conj_prox_rows_inplace(double* v, int m, std::size_t n, double sigma, int p, double q,
                            std::vector<double>& norm_scratch) {
  if (p == 1) {
    // prox_{sigma g1*}(v) = v - sigma*soft(v/sigma, 1/sigma), element-wise.
    const std::size_t total = static_cast<std::size_t>(m) * n;
    for (std::size_t i = 0; i < total; ++i)
      v[i] -= sigma * soft_threshold(v[i] / sigma, 1.0 / sigma);
    return;
  }
  // Row l2 norms of v/sigma, accumulated frame by frame (fixed order).
  norm_scratch.assign(n, 0.0);
  for (int f = 0; f < m; ++f) {
    const double* fr = v + static_cast<std::size_t>(f) * n;
    for (std::size_t i = 0; i < n; ++i) norm_scratch[i] += fr[i] * fr[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double nrm = std::sqrt(norm_scratch[i]) / sigma;
    const double f = group_shrink_factor(nrm, 1.0 / sigma, p, q);
    // v - sigma * (v/sigma) * f = v * (1 - f)
    norm_scratch[i] = 1.0 - f;
  }
  for (int f = 0; f < m; ++f) {
    double* fr = v + static_cast<std::size_t>(f) * n;
    for (std::size_t i = 0; i < n; ++i) fr[i] *= norm_scratch[i];
  }
}

void conj_prox_pairs_inplace(double* wx, double* wy, std::size_t n, double sigma, double mu) {
  if (!(sigma > 0.0)) throw std::invalid_argument("conj_prox_pairs_inplace: sigma must be > 0");
  // w - sigma*prox_{(1/sigma) g2}(w/sigma) projects each pair onto ||.|| <= mu.
  for (std::size_t i = 0; i < n; ++i) {
    const double nrm = std::hypot(wx[i], wy[i]);
    if (nrm > mu) {
      const double f = mu / nrm;
      wx[i] *= f;
      wy[i] *= f;
    }
  }
}

void conj_prox_ball_inplace(double* w, const double* y, std::size_t n, double sigma, double xi) {
  if (!(sigma > 0.0)) throw std::invalid_argument("conj_prox_ball_inplace: sigma must be > 0");
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] -= sigma * y[i];
    s += w[i] * w[i];
  }
  const double nrm = std::sqrt(s);
  const double thr = sigma * xi;
  if (nrm <= thr) {
    for (std::size_t i = 0; i < n; ++i) w[i] = 0.0;
    return;
  }
  const double f = 1.0 - thr / nrm;
  for (std::size_t i = 0; i < n; ++i) w[i] *= f;
}

}  // namespace specklesim
