#pragma once

#include <complex>
#include <vector>

#include "specklesim/grid.hpp"

namespace specklesim {

// Airy point spread function and its transfer function on a periodic grid.
//
// `psf` holds the raw samples of h (wrap-around origin: peak at index (0,0)),
// `psf_sum` their sum (equal to the zero-frequency value of the raw spectrum).
// `otf` is the half-plane real-to-complex spectrum of psf divided by its
// zero-frequency value, so the convolution operator has unit operator norm.
struct PsfModel {
  Grid grid;
  double na = 0.0;
  double k0 = 0.0;
  Image psf;
  double psf_sum = 0.0;
  std::vector<std::complex<double>> otf;  // grid.n1 x (grid.n2/2 + 1), row-major

  std::size_t otf_cols() const { return static_cast<std::size_t>(grid.n2 / 2 + 1); }
};

// Airy intensity profile h(r) = (J1(na*k0*r)/(k0*r))^2 * k0^2/pi, with the
// analytic r -> 0 limit (na/2)^2 * k0^2/pi. r is in units of lambda, k0 = 2*pi.
double airy_psf(double r, double na, double k0);

// Samples the Airy PSF on the grid (periodic wrap distances) and computes the
// normalized OTF.
PsfModel make_psf(const Grid& grid, double na);

// First zero of the Bessel function J1, where the Airy profile vanishes.
inline constexpr double kBesselJ1FirstZero = 3.8317059702075123;

}  // namespace specklesim
