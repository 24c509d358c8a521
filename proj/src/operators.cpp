#include "specklesim/operators.hpp"

#include <cmath>
#include <random>

namespace specklesim {

Convolver::Convolver(const PsfModel& psf)
    : psf_(psf), fft_(psf.grid.n1, psf.grid.n2), spec_(fft_.spec_size()) {
  if (psf_.otf.size() != fft_.spec_size())
    throw std::invalid_argument("Convolver: OTF size does not match grid");
}

void Convolver::apply(const double* in, double* out, bool adjoint) const {
  std::lock_guard<std::mutex> lock(scratch_mu_);
  fft_.forward_r2c(in, spec_.data());
  if (adjoint) {
    for (std::size_t i = 0; i < spec_.size(); ++i) spec_[i] *= std::conj(psf_.otf[i]);
  } else {
    for (std::size_t i = 0; i < spec_.size(); ++i) spec_[i] *= psf_.otf[i];
  }
  fft_.inverse_c2r(spec_.data(), out);
}

void Convolver::convolve(const Image& x, Image& out) const {
  check_same_grid(x.grid, grid(), "convolve");
  out.grid = grid();
  out.v.resize(grid().size());
  apply(x.v.data(), out.v.data(), false);
}

void Convolver::adjoint(const Image& x, Image& out) const {
  check_same_grid(x.grid, grid(), "adjoint_convolve");
  out.grid = grid();
  out.v.resize(grid().size());
  apply(x.v.data(), out.v.data(), true);
}

void Convolver::convolve_stack(const ImageStack& q, ImageStack& out) const {
  check_same_grid(q.grid, grid(), "stack_convolve");
  out.grid = q.grid;
  out.m = q.m;
  out.v.resize(q.v.size());
  for (int f = 0; f < q.m; ++f) apply(q.frame(f), out.frame(f), false);
}

void Convolver::adjoint_stack(const ImageStack& q, ImageStack& out) const {
  check_same_grid(q.grid, grid(), "stack_adjoint_convolve");
  out.grid = q.grid;
  out.m = q.m;
  out.v.resize(q.v.size());
  for (int f = 0; f < q.m; ++f) apply(q.frame(f), out.frame(f), true);
}

Image convolve(const PsfModel& psf, const Image& x) {
  Image out;
  Convolver(psf).convolve(x, out);
  return out;
}

Image adjoint_convolve(const PsfModel& psf, const Image& x) {
  Image out;
  Convolver(psf).adjoint(x, out);
  return out;
}

ImageStack stack_convolve(const PsfModel& psf, const ImageStack& q) {
  ImageStack out;
  Convolver(psf).convolve_stack(q, out);
  return out;
}

ImageStack stack_adjoint_convolve(const PsfModel& psf, const ImageStack& q) {
  ImageStack out;
  Convolver(psf).adjoint_stack(q, out);
  return out;
}

Image op_A(const ImageStack& q, double i0) {
  if (!(i0 > 0.0)) throw std::invalid_argument("op_A: i0 must be > 0");
  Image out(q.grid);
  const std::size_t n = q.grid.size();
  for (int f = 0; f < q.m; ++f) {
    const double* src = q.frame(f);
    for (std::size_t i = 0; i < n; ++i) out.v[i] += src[i];
  }
  const double scale = 1.0 / (static_cast<double>(q.m) * i0);
  for (std::size_t i = 0; i < n; ++i) out.v[i] *= scale;
  return out;
}

ImageStack op_A_adjoint(const Image& x, int m, double i0) {
  if (!(i0 > 0.0)) throw std::invalid_argument("op_A_adjoint: i0 must be > 0");
  if (m < 1) throw std::invalid_argument("op_A_adjoint: m must be >= 1");
  ImageStack out(x.grid, m);
  const std::size_t n = x.grid.size();
  const double scale = 1.0 / (static_cast<double>(m) * i0);
  for (int f = 0; f < m; ++f) {
    double* dst = out.frame(f);
    for (std::size_t i = 0; i < n; ++i) dst[i] = x.v[i] * scale;
  }
  return out;
}

GradField op_C(const Image& x) {
  GradField g{Image(x.grid), Image(x.grid)};
  const int n1 = x.grid.n1, n2 = x.grid.n2;
  for (int i = 0; i < n1; ++i) {
    const int in = (i + 1 == n1) ? 0 : i + 1;
    for (int j = 0; j < n2; ++j) {
      const int jn = (j + 1 == n2) ? 0 : j + 1;
      g.gx.at(i, j) = x.at(i, jn) - x.at(i, j);
      g.gy.at(i, j) = x.at(in, j) - x.at(i, j);
    }
  }
  return g;
}

Image op_C_adjoint(const GradField& g) {
  check_same_grid(g.gx.grid, g.gy.grid, "op_C_adjoint");
  Image out(g.gx.grid);
  const int n1 = out.grid.n1, n2 = out.grid.n2;
  for (int i = 0; i < n1; ++i) {
    const int ip = (i == 0) ? n1 - 1 : i - 1;
    for (int j = 0; j < n2; ++j) {
      const int jp = (j == 0) ? n2 - 1 : j - 1;
      out.at(i, j) = (g.gx.at(i, jp) - g.gx.at(i, j)) + (g.gy.at(ip, j) - g.gy.at(i, j));
    }
  }
  return out;
}

GradField op_D(const ImageStack& q, double i0) { return op_C(op_A(q, i0)); }

ImageStack op_D_adjoint(const GradField& g, int m, double i0) {
  return op_A_adjoint(op_C_adjoint(g), m, i0);
}

double step_size_bound(int m, double i0) {
  if (m < 1) throw std::invalid_argument("step_size_bound: m must be >= 1");
  if (!(i0 > 0.0)) throw std::invalid_argument("step_size_bound: i0 must be > 0");
  return 2.0 + 8.0 / (static_cast<double>(m) * i0);
}

namespace {

void fill_gaussian(std::vector<double>& v, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (double& x : v) x = dist(rng);
}

}  // namespace

double power_iteration_norm(const PsfModel& psf, int m, double i0, int iters,
                            std::uint64_t seed) {
  Convolver conv(psf);
  ImageStack v(psf.grid, m);
  fill_gaussian(v.v, seed);
  ImageStack hv, hhv;
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    // K v = v + D*(D v) + H*(H v)
    ImageStack kv = op_D_adjoint(op_D(v, i0), m, i0);
    conv.convolve_stack(v, hv);
    conv.adjoint_stack(hv, hhv);
    for (std::size_t i = 0; i < kv.v.size(); ++i) kv.v[i] += v.v[i] + hhv.v[i];
    lambda = norm2(kv.v);
    if (lambda == 0.0) return 0.0;
    for (std::size_t i = 0; i < kv.v.size(); ++i) kv.v[i] /= lambda;
    v = std::move(kv);
  }
  return lambda;
}

double power_iteration_c_norm_sq(const Grid& grid, int iters, std::uint64_t seed) {
  Image v(grid);
  fill_gaussian(v.v, seed);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    Image w = op_C_adjoint(op_C(v));
    lambda = norm2(w.v);
    if (lambda == 0.0) return 0.0;
    for (double& x : w.v) x /= lambda;
    v = std::move(w);
  }
  return lambda;  // largest eigenvalue of C*C = ||C||^2
}

}  // namespace specklesim
