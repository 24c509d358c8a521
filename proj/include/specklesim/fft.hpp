#pragma once

#include <complex>
#include <mutex>

#include "specklesim/grid.hpp"

struct fftw_plan_s;

namespace specklesim {

// Thin wrapper over FFTW double-precision 2D transforms.
//
// Plans are created with FFTW_ESTIMATE and executed against internally
// allocated, consistently aligned buffers; inputs/outputs are copied in and
// out. This keeps results bit-reproducible across runs regardless of caller
// buffer alignment. Methods serialize on an internal mutex, so a single
// instance is safe to share between threads.
class Fft2D {
 public:
  Fft2D(int n1, int n2);
  ~Fft2D();
  Fft2D(const Fft2D&) = delete;
  Fft2D& operator=(const Fft2D&) = delete;

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  // Number of retained columns of the half-plane real-to-complex spectrum.
  int nc() const { return n2_ / 2 + 1; }
  std::size_t spec_size() const { return static_cast<std::size_t>(n1_) * nc(); }

  // out: n1 x nc half-plane spectrum.
  void forward_r2c(const double* in, std::complex<double>* out) const;
  // Inverse of forward_r2c including the 1/(n1*n2) normalization.
  void inverse_c2r(const std::complex<double>* in, double* out) const;

  // Full-plane complex transforms (n1 x n2); inverse includes 1/(n1*n2).
  void forward_c2c(const std::complex<double>* in, std::complex<double>* out) const;
  void inverse_c2c(const std::complex<double>* in, std::complex<double>* out) const;

 private:
  int n1_, n2_;
  double* rbuf_;
  std::complex<double>* cbuf_;   // r2c/c2r spectrum buffer
  std::complex<double>* zin_;    // c2c buffers
  std::complex<double>* zout_;
  fftw_plan_s* plan_r2c_;
  fftw_plan_s* plan_c2r_;
  fftw_plan_s* plan_c2c_fwd_;
  fftw_plan_s* plan_c2c_inv_;
  mutable std::mutex mu_;
};

// Signed DFT frequency of sample k out of n, in cycles per sample.
inline double fft_freq(int k, int n) {
  return (k <= n / 2 ? k : k - n) / static_cast<double>(n);
}

}  // namespace specklesim
