#include "specklesim/fft.hpp"

#include <fftw3.h>

#include <cstring>

namespace specklesim {

Fft2D::Fft2D(int n1, int n2) : n1_(n1), n2_(n2) {
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("Fft2D: invalid dimensions");
  const std::size_t nreal = static_cast<std::size_t>(n1) * n2;
  const std::size_t nspec = spec_size();
  rbuf_ = fftw_alloc_real(nreal);
  cbuf_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(nspec));
  zin_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(nreal));
  zout_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(nreal));
  if (!rbuf_ || !cbuf_ || !zin_ || !zout_) throw std::bad_alloc();
  plan_r2c_ = fftw_plan_dft_r2c_2d(n1, n2, rbuf_, reinterpret_cast<fftw_complex*>(cbuf_),
                                   FFTW_ESTIMATE);
  plan_c2r_ = fftw_plan_dft_c2r_2d(n1, n2, reinterpret_cast<fftw_complex*>(cbuf_), rbuf_,
                                   FFTW_ESTIMATE);
  plan_c2c_fwd_ = fftw_plan_dft_2d(n1, n2, reinterpret_cast<fftw_complex*>(zin_),
                                   reinterpret_cast<fftw_complex*>(zout_), FFTW_FORWARD,
                                   FFTW_ESTIMATE);
  plan_c2c_inv_ = fftw_plan_dft_2d(n1, n2, reinterpret_cast<fftw_complex*>(zin_),
                                   reinterpret_cast<fftw_complex*>(zout_), FFTW_BACKWARD,
                                   FFTW_ESTIMATE);
  if (!plan_r2c_ || !plan_c2r_ || !plan_c2c_fwd_ || !plan_c2c_inv_)
    throw std::runtime_error("Fft2D: plan creation failed");
}

Fft2D::~Fft2D() {
  fftw_destroy_plan(plan_r2c_);
  fftw_destroy_plan(plan_c2r_);
  fftw_destroy_plan(plan_c2c_fwd_);
  fftw_destroy_plan(plan_c2c_inv_);
  fftw_free(rbuf_);
  fftw_free(cbuf_);
  fftw_free(zin_);
  fftw_free(zout_);
}

void Fft2D::forward_r2c(const double* in, std::complex<double>* out) const {
  std::lock_guard<std::mutex> lock(mu_);
  std::memcpy(rbuf_, in, sizeof(double) * n1_ * n2_);
  fftw_execute(plan_r2c_);
  std::memcpy(out, cbuf_, sizeof(std::complex<double>) * spec_size());
}

void Fft2D::inverse_c2r(const std::complex<double>* in, double* out) const {
  std::lock_guard<std::mutex> lock(mu_);
  std::memcpy(cbuf_, in, sizeof(std::complex<double>) * spec_size());
  fftw_execute(plan_c2r_);
  const double scale = 1.0 / (static_cast<double>(n1_) * n2_);
  const std::size_t n = static_cast<std::size_t>(n1_) * n2_;
  for (std::size_t i = 0; i < n; ++i) out[i] = rbuf_[i] * scale;
}

void Fft2D::forward_c2c(const std::complex<double>* in, std::complex<double>* out) const {
  std::lock_guard<std::mutex> lock(mu_);
  const std::size_t n = static_cast<std::size_t>(n1_) * n2_;
  std::memcpy(zin_, in, sizeof(std::complex<double>) * n);
  fftw_execute(plan_c2c_fwd_);
  std::memcpy(out, zout_, sizeof(std::complex<double>) * n);
}

void Fft2D::inverse_c2c(const std::complex<double>* in, std::complex<double>* out) const {
  std::lock_guard<std::mutex> lock(mu_);
  const std::size_t n = static_cast<std::size_t>(n1_) * n2_;
  std::memcpy(zin_, in, sizeof(std::complex<double>) * n);
  fftw_execute(plan_c2c_inv_);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = zout_[i] * scale;
}

}  // namespace specklesim
