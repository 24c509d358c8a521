#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace specklesim {

// Flat vector partitioned into contiguous groups of equal size. Groups are
// independent subproblems for all the group proximal operators below.
struct GroupedVector {
  std::vector<double> values;
  std::size_t group_size = 1;

  GroupedVector() = default;
  GroupedVector(std::vector<double> vals, std::size_t gsize)
      : values(std::move(vals)), group_size(gsize) {
    if (gsize == 0 || values.size() % gsize != 0)
      throw std::invalid_argument("GroupedVector: length not divisible by group size");
  }
  std::size_t group_count() const { return values.size() / group_size; }
};

// Scalar/group kernels. All prox operators use the convention
//   prox(x, lambda) = argmin_d f(d) + ||d - x||^2 / (2*lambda).

// Soft threshold: sign(x) * max(|x| - lambda, 0).
double soft_threshold(double x, double lambda);

// Multiplier t such that prox of the group is t * x_G, given nrm = ||x_G||_2.
// For f = ||.||_2 (the (2,1) pair): max(1 - lambda/nrm, 0).
double group_shrink_factor_l21(double nrm, double lambda);
// For f = ||.||_2^q with q in {1/2, 2/3}: hard threshold plus the closed-form
// shrink factor (0 at and below the threshold).
double group_shrink_factor_l2q(double nrm, double lambda, double q);
// Dispatch over the supported (p, q) pairs; p = 1 has no group factor and is
// handled element-wise by the callers.
double group_shrink_factor(double nrm, double lambda, int p, double q);

// Group prox operators on GroupedVector.
GroupedVector prox_l11(const GroupedVector& x, double lambda);
GroupedVector prox_group_l21(const GroupedVector& x, double lambda);
GroupedVector prox_group_l2q(const GroupedVector& x, double lambda, double q);
// Dispatch over (p, q) in {(1,1), (2,1), (2,1/2), (2,2/3)}.
GroupedVector prox_lpq(const GroupedVector& x, double lambda, int p, double q);

// Moreau conjugation: prox of sigma*f^* evaluated via the prox of f,
//   prox_{sigma f*}(x) = x - sigma * prox_f(x / sigma, 1/sigma).
// If inner_out is non-null it receives prox_f(x/sigma, 1/sigma), so callers
// can verify the identity prox_{sigma f*}(x) + sigma*inner - x = 0 exactly as
// computed.
using ProxFn = std::function<GroupedVector(const GroupedVector&, double)>;
GroupedVector moreau_conjugate_prox(const ProxFn& prox_f, const GroupedVector& x, double sigma,
                                    GroupedVector* inner_out = nullptr);

// Projection onto the l2 ball of radius xi centered at y.
std::vector<double> project_l2_ball(const std::vector<double>& x, const std::vector<double>& y,
                                    double xi);

// ---- in-place kernels for the solver hot path -------------------------------
// These are the Moreau-conjugate prox steps of Algorithm updates, specialized
// to the stack layouts, sharing the scalar kernels above.

// v <- prox of sigma*g1^* at v, where g1 = ||.||_{G,p,q}^q over pixel rows
// (fixed pixel across the m frames). norm_scratch must have n entries.
void conj_prox_rows_inplace(double* v, int m, std::size_t n, double sigma, int p, double q,
                            std::vector<double>& norm_scratch);

// (wx, wy) <- prox of sigma*g2^* at (wx, wy), where g2 = mu * ||.||_{G,2,1}
// over per-pixel gradient pairs. Equivalent to projecting each pair onto the
// radius-mu disk.
void conj_prox_pairs_inplace(double* wx, double* wy, std::size_t n, double sigma, double mu);

// w <- prox of sigma*g3^* at w, where g3 is the indicator of the xi-ball
// around y: w <- (w - sigma*y) * max(1 - sigma*xi/||w - sigma*y||, 0).
void conj_prox_ball_inplace(double* w, const double* y, std::size_t n, double sigma, double xi);

}  // namespace specklesim
