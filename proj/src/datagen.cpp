#include "specklesim/datagen.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "specklesim/fft.hpp"

namespace specklesim {

double star_profile(double theta, int arms) {
  return 0.5 * (1.0 + std::cos(arms * theta));
}

Image make_star(const Grid& grid, int arms) {
  grid.validate();
  if (arms < 2 || arms % 2 != 0)
    throw std::invalid_argument("make_star: arms must be even and >= 2");
  Image out(grid);
  const double c1 = grid.n1 / 2.0;
  const double c2 = grid.n2 / 2.0;
  for (int i = 0; i < grid.n1; ++i) {
    for (int j = 0; j < grid.n2; ++j) {
      const double theta = std::atan2(i - c1, j - c2);
      out.at(i, j) = star_profile(theta, arms);
    }
  }
  return out;
}

double star_conventional_radius(int arms, double na) {
  // Arm period at radius r is 2*pi*r/arms; equate with lambda/(2*na).
  return arms / (4.0 * std::numbers::pi * na);
}

ImageStack gen_speckle(const SpeckleSpec& spec, const Grid& grid) {
  spec.validate();
  grid.validate();
  const int n1 = grid.n1, n2 = grid.n2;
  const std::size_t n = grid.size();
  Fft2D fft(n1, n2);

  // Pupil disk in DFT frequency units (cycles per sample): radius na_ill*pitch.
  std::vector<unsigned char> mask(n, 0);
  const double rad2 = spec.na_ill * grid.pitch * spec.na_ill * grid.pitch;
  std::size_t npass = 0;
  for (int i = 0; i < n1; ++i) {
    const double fi = fft_freq(i, n1);
    for (int j = 0; j < n2; ++j) {
      const double fj = fft_freq(j, n2);
      if (fi * fi + fj * fj <= rad2) {
        mask[static_cast<std::size_t>(i) * n2 + j] = 1;
        ++npass;
      }
    }
  }
  if (npass == 0) throw std::runtime_error("gen_speckle: pupil disk excludes every DFT sample");

  // Field w has E|w|^2 = 2, so the filtered intensity has ensemble mean
  // 2*npass/N; scale to i0 analytically.
  const double standard_scale = spec.i0 * static_cast<double>(n) / (2.0 * npass);
  ImageStack out(grid, spec.m);
  std::vector<std::complex<double>> w(n), ws(n);
  for (int f = 0; f < spec.m; ++f) {
    std::mt19937_64 rng(spec.seed + static_cast<std::uint64_t>(f));
    std::normal_distribution<double> dist(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double re = dist(rng);
      const double im = dist(rng);
      w[i] = {re, im};
    }
    fft.forward_c2c(w.data(), ws.data());
    for (std::size_t i = 0; i < n; ++i)
      if (!mask[i]) ws[i] = 0.0;
    fft.inverse_c2c(ws.data(), w.data());
    double* dst = out.frame(f);
    for (std::size_t i = 0; i < n; ++i) dst[i] = std::norm(w[i]) * standard_scale;
  }
  if (spec.kind == SpeckleSpec::Kind::squared) {
    // Square the unit-mean standard intensity, then renormalize using the
    // ensemble second moment E[I^2] = 2 of exponential intensity.
    const double inv_i0 = 1.0 / spec.i0;
    const double scale = spec.i0 / 2.0;
    for (double& x : out.v) {
      const double s = x * inv_i0;
      x = s * s * scale;
    }
  }
  return out;
}

ImageStack simulate(const Image& rho, const ImageStack& speckles, const PsfModel& psf,
                    const NoiseSpec& noise, const Image* background, double* nu_out) {
  noise.validate();
  check_same_grid(rho.grid, speckles.grid, "simulate");
  check_same_grid(rho.grid, psf.grid, "simulate");
  if (background) check_same_grid(rho.grid, background->grid, "simulate");
  for (double x : rho.v)
    if (x < 0.0) throw std::invalid_argument("simulate: rho must be >= 0");
  if (speckles.m < 1) throw std::invalid_argument("simulate: empty stack");

  const std::size_t n = rho.grid.size();
  ImageStack y(rho.grid, speckles.m);
  Convolver conv(psf);
  std::vector<double> q(n);
  for (int f = 0; f < speckles.m; ++f) {
    const double* s = speckles.frame(f);
    for (std::size_t i = 0; i < n; ++i) q[i] = rho.v[i] * s[i];
    conv.apply(q.data(), y.frame(f), false);
  }

  double nu = 0.0;
  const bool want_poisson = noise.photons_per_pixel.has_value();
  const bool want_gauss = noise.gaussian_snr_db.has_value();
  if (want_gauss) {
    double power = 0.0;
    for (double x : y.v) power += x * x;
    power /= static_cast<double>(y.v.size());
    nu = std::sqrt(power * std::pow(10.0, -(*noise.gaussian_snr_db) / 10.0));
  }
  if (want_poisson) {
    double mean = 0.0;
    for (double x : y.v) mean += x;
    mean /= static_cast<double>(y.v.size());
    if (!(mean > 0.0)) throw std::invalid_argument("simulate: clean stack mean must be > 0 for Poisson noise");
    const double scale = *noise.photons_per_pixel / mean;
    for (int f = 0; f < speckles.m; ++f) {
      std::mt19937_64 rng(noise.seed + static_cast<std::uint64_t>(f));
      double* dst = y.frame(f);
      for (std::size_t i = 0; i < n; ++i) {
        const double lam = std::max(0.0, dst[i] * scale);
        std::poisson_distribution<long> pois(lam);
        dst[i] = (lam > 0.0 ? static_cast<double>(pois(rng)) : 0.0) / scale;
      }
      if (want_gauss) {
        std::normal_distribution<double> gauss(0.0, nu);
        for (std::size_t i = 0; i < n; ++i) dst[i] += gauss(rng);
      }
    }
  } else if (want_gauss) {
    for (int f = 0; f < speckles.m; ++f) {
      std::mt19937_64 rng(noise.seed + static_cast<std::uint64_t>(f));
      std::normal_distribution<double> gauss(0.0, nu);
      double* dst = y.frame(f);
      for (std::size_t i = 0; i < n; ++i) dst[i] += gauss(rng);
    }
  }
  if (background) {
    for (int f = 0; f < speckles.m; ++f) {
      double* dst = y.frame(f);
      for (std::size_t i = 0; i < n; ++i) dst[i] += background->v[i];
    }
  }
  if (nu_out) *nu_out = nu;
  return y;
}

Image scale_background(const Image& raw, double fraction, double signal_mean) {
  if (!(fraction >= 0.0)) throw std::invalid_argument("scale_background: fraction must be >= 0");
  double mean = 0.0;
  for (double x : raw.v) mean += x;
  mean /= static_cast<double>(raw.v.size());
  if (!(mean > 0.0)) throw std::invalid_argument("scale_background: raw background mean must be > 0");
  Image out = raw;
  const double s = fraction * signal_mean / mean;
  for (double& x : out.v) x *= s;
  return out;
}

}  // namespace specklesim
