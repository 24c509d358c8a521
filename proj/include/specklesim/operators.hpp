#pragma once

#include <complex>
#include <cstdint>
#include <mutex>
#include <vector>

#include "specklesim/fft.hpp"
#include "specklesim/psf.hpp"

namespace specklesim {

// Spectral convolution by the (normalized) OTF of a PsfModel under periodic
// boundary conditions. Holds the FFT plans and scratch, so repeated
// applications (the solver hot path) do not re-plan.
class Convolver {
 public:
  explicit Convolver(const PsfModel& psf);

  const Grid& grid() const { return psf_.grid; }

  // out = H in (adjoint: conjugate spectrum). In-place allowed (out == in).
  void apply(const double* in, double* out, bool adjoint) const;

  void convolve(const Image& x, Image& out) const;
  void adjoint(const Image& x, Image& out) const;
  void convolve_stack(const ImageStack& q, ImageStack& out) const;
  void adjoint_stack(const ImageStack& q, ImageStack& out) const;

 private:
  PsfModel psf_;
  Fft2D fft_;
  mutable std::vector<std::complex<double>> spec_;
  mutable std::mutex scratch_mu_;
};

// One-shot convenience wrappers (these plan on every call; use Convolver in
// loops).
Image convolve(const PsfModel& psf, const Image& x);
Image adjoint_convolve(const PsfModel& psf, const Image& x);
ImageStack stack_convolve(const PsfModel& psf, const ImageStack& q);
ImageStack stack_adjoint_convolve(const PsfModel& psf, const ImageStack& q);

// Averaging operator: (1/(m*i0)) * sum of frames, and its adjoint, which
// replicates x/(m*i0) into m frames.
Image op_A(const ImageStack& q, double i0);
ImageStack op_A_adjoint(const Image& x, int m, double i0);

// Periodic first-order forward differences and their adjoint (negative
// discrete divergence).
GradField op_C(const Image& x);
Image op_C_adjoint(const GradField& g);

// Composite D = C o A acting on stacks, used by the TV term.
GradField op_D(const ImageStack& q, double i0);
ImageStack op_D_adjoint(const GradField& g, int m, double i0);

// Bound on ||I + D*D + H*H||: 2 + 8/(m*i0). The primal-dual steps must
// satisfy tau*sigma <= 1/bound.
double step_size_bound(int m, double i0);

// Power-iteration estimate of ||I + D*D + H*H|| on m-frame stacks.
double power_iteration_norm(const PsfModel& psf, int m, double i0, int iters,
                            std::uint64_t seed);

// Power-iteration estimate of ||C||^2 on images.
double power_iteration_c_norm_sq(const Grid& grid, int iters, std::uint64_t seed);

}  // namespace specklesim
