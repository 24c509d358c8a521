#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace specklesim {

// Discretization of the field of view. Pixel pitch is expressed in units of
// the emission wavelength, so frequencies come out in cycles per wavelength.
struct Grid {
  int n1 = 0;      // rows
  int n2 = 0;      // cols
  double pitch = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(n1) * n2; }
  bool operator==(const Grid&) const = default;

  void validate() const {
    if (n1 < 2 || n2 < 2) throw std::invalid_argument("Grid: n1, n2 must be >= 2");
    if (!(pitch > 0.0)) throw std::invalid_argument("Grid: pitch must be > 0");
  }
};

// Real-valued 2D field stored row-major.
struct Image {
  Grid grid;
  std::vector<double> v;

  Image() = default;
  explicit Image(const Grid& g) : grid(g), v(g.size(), 0.0) {}

  double& at(int i, int j) { return v[static_cast<std::size_t>(i) * grid.n2 + j]; }
  double at(int i, int j) const { return v[static_cast<std::size_t>(i) * grid.n2 + j]; }
};

// M frames on a common grid, frame-major contiguous storage.
struct ImageStack {
  Grid grid;
  int m = 0;
  std::vector<double> v;

  ImageStack() = default;
  ImageStack(const Grid& g, int frames)
      : grid(g), m(frames), v(g.size() * static_cast<std::size_t>(frames), 0.0) {
    if (frames < 1) throw std::invalid_argument("ImageStack: m must be >= 1");
  }

  double* frame(int k) { return v.data() + static_cast<std::size_t>(k) * grid.size(); }
  const double* frame(int k) const { return v.data() + static_cast<std::size_t>(k) * grid.size(); }

  Image frame_image(int k) const {
    Image out(grid);
    const double* f = frame(k);
    for (std::size_t i = 0; i < grid.size(); ++i) out.v[i] = f[i];
    return out;
  }
};

// Per-pixel horizontal/vertical finite differences of an image.
struct GradField {
  Image gx;  // along columns
  Image gy;  // along rows
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const std::vector<double>& a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

inline void check_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

}  // namespace specklesim
