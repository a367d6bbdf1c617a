// Flat-torus grids and the spectral calculus on them: complex scalar fields
// on an N^{2n} lattice over [0,1)^{2n}, Fourier derivatives along real and
// complex axes, 2/3-rule band truncation, and grid means. All torus-backed
// geometry is built from these primitives.
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "zcrit/errors.hpp"

namespace zcrit {

using Cx = std::complex<double>;
using Field = std::vector<Cx>;

// An N-per-axis grid on the 2n-dimensional unit torus. Axes are ordered
// (x_1, y_1, ..., x_n, y_n); z_a = x_a + i y_a.
struct TorusGrid {
  int n = 1;  // complex dimension, 1 or 2
  int N = 0;  // points per axis

  TorusGrid() = default;
  TorusGrid(int n_, int N_);

  int axes() const { return 2 * n; }
  std::size_t size() const {
    std::size_t s = 1;
    for (int a = 0; a < axes(); ++a) s *= static_cast<std::size_t>(N);
    return s;
  }
  // Row-major index of the lattice point with per-axis coordinates c.
  std::size_t index(const std::vector<int>& coords) const;
  // Coordinate of grid node j along the given axis, in [0, 1).
  double coordinate(std::size_t flat, int axis) const;

  Field zero_field() const { return Field(size(), Cx(0.0, 0.0)); }
  Field constant_field(Cx value) const { return Field(size(), value); }
  // Field from a function of the 2n real coordinates.
  template <class F>
  Field sample(F&& f) const {
    Field out(size());
    std::vector<double> x(axes());
    for (std::size_t j = 0; j < out.size(); ++j) {
      for (int a = 0; a < axes(); ++a) x[a] = coordinate(j, a);
      out[j] = f(x);
    }
    return out;
  }
};

// Derivative along a real axis (0 = x_1, 1 = y_1, ...), spectral accuracy.
Field derivative(const TorusGrid& grid, const Field& f, int axis);
// Holomorphic and antiholomorphic derivatives along complex axis a in [0, n):
// d/dz_a = (d/dx_a - i d/dy_a)/2 and d/dzbar_a = (d/dx_a + i d/dy_a)/2.
Field dz(const TorusGrid& grid, const Field& f, int a);
Field dzbar(const TorusGrid& grid, const Field& f, int a);

// Zero every Fourier mode with any |k| > N/3 (2/3 dealiasing rule).
Field truncate_band(const TorusGrid& grid, const Field& f);
// Largest Fourier magnitude outside the given band |k|_inf <= band.
double band_residual(const TorusGrid& grid, const Field& f, int band);

// (1 - sigma * flat Laplacian)^{-1}: divides each Fourier mode by
// 1 + sigma * 4 pi^2 |k|^2. Used as the semi-implicit damping step of
// dissipative flows; the multiplier is real and even, so real fields stay
// real.
Field laplace_resolvent(const TorusGrid& grid, const Field& f, double sigma);

// Pointwise helpers.
Field multiply(const Field& a, const Field& b);
Field add(const Field& a, const Field& b);
Field subtract(const Field& a, const Field& b);
Field scale(const Field& a, Cx s);
Field conjugate(const Field& a);
Cx mean(const Field& a);
double max_abs(const Field& a);

}  // namespace zcrit
