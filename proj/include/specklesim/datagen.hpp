#pragma once

#include <cstdint>
#include <optional>

#include "specklesim/operators.hpp"
#include "specklesim/psf.hpp"

namespace specklesim {

// Speckle illumination ensemble description.
struct SpeckleSpec {
  enum class Kind { standard, squared };
  int m = 1;
  double na_ill = 1.49;
  double i0 = 1.0;
  Kind kind = Kind::standard;
  std::uint64_t seed = 0;

  void validate() const {
    if (m < 1) throw std::invalid_argument("SpeckleSpec: m must be >= 1");
    if (!(na_ill > 0.0)) throw std::invalid_argument("SpeckleSpec: na_ill must be > 0");
    if (!(i0 > 0.0)) throw std::invalid_argument("SpeckleSpec: i0 must be > 0");
  }
};

// Measurement noise description. Either component may be absent.
struct NoiseSpec {
  std::optional<double> gaussian_snr_db;
  std::optional<double> photons_per_pixel;
  std::uint64_t seed = 0;

  void validate() const {
    if (photons_per_pixel && *photons_per_pixel < 1.0)
      throw std::invalid_argument("NoiseSpec: photons_per_pixel must be >= 1");
  }
};

// Angular profile of the star target: 0.5*(1 + cos(arms * theta)).
double star_profile(double theta, int arms);

// Star-like target sampled from star_profile about the grid center, values in
// [0, 1] with maximum 1 along the theta = 0 ray.
Image make_star(const Grid& grid, int arms = 40);

// Radius (in units of lambda) where the star's arm period equals the
// conventional resolution limit lambda/(2*na): arms/(4*pi*na).
double star_conventional_radius(int arms, double na);

// Fully developed speckle stack: per frame, i.i.d. circular complex Gaussian
// field filtered to the pupil disk of radius na_ill*k0, squared magnitude,
// normalized to ensemble mean i0 (squared kind: the square of the standard
// intensity, renormalized to mean i0). Frame f uses seed + f.
ImageStack gen_speckle(const SpeckleSpec& spec, const Grid& grid);

// y_m = H(rho .* I_m) (+ Poisson) (+ Gaussian) (+ background). If nu_out is
// non-null it receives the Gaussian noise standard deviation used (0 when no
// Gaussian component is requested).
ImageStack simulate(const Image& rho, const ImageStack& speckles, const PsfModel& psf,
                    const NoiseSpec& noise, const Image* background = nullptr,
                    double* nu_out = nullptr);

// Scales a raw background image so its mean is `fraction` times `signal_mean`.
Image scale_background(const Image& raw, double fraction, double signal_mean);

}  // namespace specklesim
