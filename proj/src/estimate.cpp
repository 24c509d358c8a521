#include "specklesim/estimate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>

#include "specklesim/fft.hpp"

namespace specklesim {

std::string RapsCurve::to_csv() const {
  std::string out = "r_cycles_per_lambda,f,count\n";
  char line[96];
  for (std::size_t i = 0; i < radii.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.10g,%.10g,%ld\n", radii[i], values[i], counts[i]);
    out += line;
  }
  return out;
}

Image rho_from_mean(const ImageStack& q, double i0) {
  if (!(i0 > 0.0)) throw std::invalid_argument("rho_from_mean: i0 must be > 0");
  Image out(q.grid);
  const std::size_t n = q.grid.size();
  for (int f = 0; f < q.m; ++f) {
    const double* fr = q.frame(f);
    for (std::size_t i = 0; i < n; ++i) out.v[i] += fr[i];
  }
  const double scale = 1.0 / (static_cast<double>(q.m) * i0);
  for (std::size_t i = 0; i < n; ++i) out.v[i] *= scale;
  return out;
}

Image rho_from_std(const ImageStack& q) {
  if (q.m < 2) throw std::invalid_argument("rho_from_std: need at least 2 frames");
  const std::size_t n = q.grid.size();
  Image mean(q.grid);
  for (int f = 0; f < q.m; ++f) {
    const double* fr = q.frame(f);
    for (std::size_t i = 0; i < n; ++i) mean.v[i] += fr[i];
  }
  const double inv_m = 1.0 / static_cast<double>(q.m);
  for (std::size_t i = 0; i < n; ++i) mean.v[i] *= inv_m;
  Image out(q.grid);
  for (int f = 0; f < q.m; ++f) {
    const double* fr = q.frame(f);
    for (std::size_t i = 0; i < n; ++i) {
      const double dlt = fr[i] - mean.v[i];
      out.v[i] += dlt * dlt;
    }
  }
  for (std::size_t i = 0; i < n; ++i) out.v[i] = std::sqrt(out.v[i] * inv_m);
  return out;
}

Image max_normalized(const Image& x) {
  double mx = 0.0;
  for (double v : x.v) mx = std::max(mx, v);
  if (mx == 0.0) return x;
  Image out = x;
  for (double& v : out.v) v /= mx;
  return out;
}

Image wiener_deconvolve(const Image& y_bar, const PsfModel& psf, double snr_power) {
  check_same_grid(y_bar.grid, psf.grid, "wiener_deconvolve");
  if (!(snr_power > 0.0)) throw std::invalid_argument("wiener_deconvolve: snr_power must be > 0");
  Fft2D fft(y_bar.grid.n1, y_bar.grid.n2);
  std::vector<std::complex<double>> spec(fft.spec_size());
  fft.forward_r2c(y_bar.v.data(), spec.data());
  const double inv_snr = 1.0 / snr_power;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const std::complex<double> h = psf.otf[i];
    spec[i] = std::conj(h) * spec[i] / (std::norm(h) + inv_snr);
  }
  Image out(y_bar.grid);
  fft.inverse_c2r(spec.data(), out.v.data());
  return out;
}

RapsCurve raps_error(const Image& rho_hat, const Image& rho_star) {
  check_same_grid(rho_hat.grid, rho_star.grid, "raps_error");
  double den_total = 0.0;
  for (double v : rho_star.v) den_total += std::abs(v);
  if (den_total == 0.0) throw std::invalid_argument("raps_error: rho_star is identically zero");

  const Grid& grid = rho_hat.grid;
  const int n1 = grid.n1, n2 = grid.n2;
  const std::size_t n = grid.size();
  Fft2D fft(n1, n2);
  std::vector<std::complex<double>> a(n), ahat(n), b(n), bhat(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = rho_hat.v[i];
    b[i] = rho_star.v[i];
  }
  fft.forward_c2c(a.data(), ahat.data());
  fft.forward_c2c(b.data(), bhat.data());

  // Bin width = one DFT sample of the first dimension, 1/(n1*pitch) cycles/lambda.
  const double dnu = 1.0 / (n1 * grid.pitch);
  std::map<long, std::array<double, 2>> bins;  // bin -> {num, den}
  std::map<long, long> counts;
  for (int i = 0; i < n1; ++i) {
    const double f1 = fft_freq(i, n1) / grid.pitch;
    for (int j = 0; j < n2; ++j) {
      if (i == 0 && j == 0) continue;  // DC excluded
      const double f2 = fft_freq(j, n2) / grid.pitch;
      const double nu = std::hypot(f1, f2);
      const long bin = std::lround(nu / dnu);
      if (bin == 0) continue;
      const std::size_t idx = static_cast<std::size_t>(i) * n2 + j;
      auto& acc = bins[bin];
      acc[0] += std::norm(ahat[idx] - bhat[idx]);
      acc[1] += std::norm(bhat[idx]);
      counts[bin] += 1;
    }
  }
  double max_den = 0.0;
  for (const auto& [bin, acc] : bins) max_den = std::max(max_den, acc[1]);
  RapsCurve curve;
  for (const auto& [bin, acc] : bins) {
    if (acc[1] <= 1e-12 * max_den) continue;  // denominator negligible: drop
    curve.radii.push_back(bin * dnu);
    curve.values.push_back(acc[0] / acc[1]);
    curve.counts.push_back(counts[bin]);
  }
  return curve;
}

double pearson_correlation(const Image& a, const Image& b) {
  check_same_grid(a.grid, b.grid, "pearson_correlation");
  const std::size_t n = a.grid.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a.v[i];
    mb += b.v[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a.v[i] - ma, db = b.v[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace specklesim
