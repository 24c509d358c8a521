#pragma once

#include <string>
#include <vector>

#include "specklesim/psf.hpp"

namespace specklesim {

// Normalized radially averaged power spectrum of the reconstruction error:
// per annular frequency bin, sum |rho_hat_spec - rho_star_spec|^2 divided by
// sum |rho_star_spec|^2. Radii are bin centers in cycles per lambda.
struct RapsCurve {
  std::vector<double> radii;
  std::vector<double> values;
  std::vector<long> counts;

  std::string to_csv() const;  // header "r_cycles_per_lambda,f,count"
};

// rho = mean over frames / i0.
Image rho_from_mean(const ImageStack& q, double i0);

// Pixel-wise population standard deviation over frames (defined up to a
// global positive scale; use max_normalized for comparisons).
Image rho_from_std(const ImageStack& q);

// Image scaled so its maximum is 1 (all-zero input returned unchanged).
Image max_normalized(const Image& x);

// Spectral division conj(otf) * Y / (|otf|^2 + 1/snr_power).
Image wiener_deconvolve(const Image& y_bar, const PsfModel& psf, double snr_power);

// Eq-style normalized RAPS of errors; DC excluded, bins of one DFT sample,
// bins with negligible denominator dropped.
RapsCurve raps_error(const Image& rho_hat, const Image& rho_star);

// Pearson correlation coefficient of two images.
double pearson_correlation(const Image& a, const Image& b);

}  // namespace specklesim
