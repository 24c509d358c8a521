#include "specklesim/psf.hpp"

#include <cmath>
#include <numbers>

#include "specklesim/fft.hpp"

namespace specklesim {

double airy_psf(double r, double na, double k0) {
  const double pref = k0 * k0 / std::numbers::pi;
  if (r == 0.0) {
    const double h0 = na / 2.0;
    return h0 * h0 * pref;
  }
  const double z = na * k0 * r;
  const double j = std::cyl_bessel_j(1.0, z) / (k0 * r);
  return j * j * pref;
}

PsfModel make_psf(const Grid& grid, double na) {
  grid.validate();
  if (!(na > 0.0)) throw std::invalid_argument("make_psf: na must be > 0");
  PsfModel model;
  model.grid = grid;
  model.na = na;
  model.k0 = 2.0 * std::numbers::pi;
  model.psf = Image(grid);
  for (int i = 0; i < grid.n1; ++i) {
    const int wi = std::min(i, grid.n1 - i);  // periodic wrap distance
    for (int j = 0; j < grid.n2; ++j) {
      const int wj = std::min(j, grid.n2 - j);
      const double r = std::hypot(wi * grid.pitch, wj * grid.pitch);
      model.psf.at(i, j) = airy_psf(r, na, model.k0);
    }
  }
  double sum = 0.0;
  for (double x : model.psf.v) sum += x;
  model.psf_sum = sum;

  Fft2D fft(grid.n1, grid.n2);
  model.otf.resize(fft.spec_size());
  fft.forward_r2c(model.psf.v.data(), model.otf.data());
  const double dc = model.otf[0].real();
  if (!(dc > 0.0)) throw std::runtime_error("make_psf: non-positive zero-frequency response");
  for (auto& c : model.otf) c /= dc;
  return model;
}

}  // namespace specklesim
