// Lobatto-grid calculus for invariant sphere metrics. The differentiation
// matrix follows the standard barycentric construction with the negative-sum
// diagonal; quadrature weights are the closed-form Clenshaw-Curtis set for an
// even order, exact on polynomials up to the grid order.
#include "zcrit/cp1.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>

#include "zcrit/errors.hpp"

namespace zcrit {

namespace {

constexpr double kPi = std::numbers::pi;

using Cx = std::complex<double>;

}  // namespace

ProfileGrid::ProfileGrid(int order_) : order(order_) {
  if (order < 8 || order % 2 != 0) {
    throw ConfigError("profile grid order must be even and at least 8, got " +
                      std::to_string(order));
  }
  const int m = order;
  const std::size_t count = static_cast<std::size_t>(m) + 1;
  x.resize(count);
  for (int j = 0; j <= m; ++j) x[j] = std::cos(kPi * j / m);
  x[0] = 1.0;
  x[static_cast<std::size_t>(m)] = -1.0;
  if (m % 4 == 0) x[static_cast<std::size_t>(m) / 2] = 0.0;

  weights.assign(count, 0.0);
  weights[0] = 1.0 / (static_cast<double>(m) * m - 1.0);
  weights[count - 1] = weights[0];
  for (int j = 1; j < m; ++j) {
    double theta = kPi * j / m;
    double v = 1.0 - std::cos(m * theta) / (static_cast<double>(m) * m - 1.0);
    for (int k = 1; k <= m / 2 - 1; ++k) {
      v -= 2.0 * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
    }
    weights[j] = 2.0 * v / m;
  }

  diff.assign(count * count, 0.0);
  auto node_scale = [m](int i) { return (i == 0 || i == m) ? 2.0 : 1.0; };
  for (int i = 0; i <= m; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j <= m; ++j) {
      if (i == j) continue;
      double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      double d = node_scale(i) / node_scale(j) * sign / (x[i] - x[j]);
      diff[static_cast<std::size_t>(i) * count + j] = d;
      row_sum += d;
    }
    diff[static_cast<std::size_t>(i) * count + i] = -row_sum;
  }
}

RealProfile profile_derivative(const ProfileGrid& grid, const RealProfile& f) {
  const std::size_t count = grid.count();
  RealProfile out(count, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      acc += grid.diff[i * count + j] * f[j];
    }
    out[i] = acc;
  }
  return out;
}

double profile_integral(const ProfileGrid& grid, const RealProfile& f) {
  double acc = 0.0;
  for (std::size_t j = 0; j < grid.count(); ++j) acc += grid.weights[j] * f[j];
  return acc;
}

double profile_max_abs(const RealProfile& f) {
  double worst = 0.0;
  for (double v : f) worst = std::max(worst, std::abs(v));
  return worst;
}

double profile_max_abs(const ComplexProfile& f) {
  double worst = 0.0;
  for (const Cx& v : f) worst = std::max(worst, std::abs(v));
  return worst;
}

SphereGeometry sphere_from_profile(const ProfileGrid& grid,
                                   const RealProfile& correction) {
  if (correction.size() != grid.count()) {
    throw ConfigError("sphere profile has " +
                      std::to_string(correction.size()) + " samples, grid has " +
                      std::to_string(grid.count()) + " nodes");
  }
  SphereGeometry geom{grid, correction, {}, {}, {}};
  RealProfile vpp = profile_derivative(grid, profile_derivative(grid, correction));
  const std::size_t count = grid.count();
  geom.denom.resize(count);
  geom.w.resize(count);
  std::ostringstream bad;
  int bad_count = 0;
  for (std::size_t j = 0; j < count; ++j) {
    double one_minus = 1.0 - grid.x[j] * grid.x[j];
    geom.denom[j] = 1.0 + one_minus * vpp[j];
    if (geom.denom[j] <= 0.0) {
      if (bad_count < 3) bad << " x=" << grid.x[j];
      ++bad_count;
    }
    geom.w[j] = one_minus / (geom.denom[j] > 0.0 ? geom.denom[j] : 1.0);
  }
  if (bad_count > 0) {
    throw NotPositive("sphere metric degenerates at " +
                      std::to_string(bad_count) + " node(s):" + bad.str());
  }
  RealProfile wpp = profile_derivative(grid, profile_derivative(grid, geom.w));
  geom.scalar.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    geom.scalar[j] = -wpp[j] / (4.0 * kPi);
  }
  return geom;
}

SphereGeometry round_sphere(const ProfileGrid& grid) {
  return sphere_from_profile(grid, RealProfile(grid.count(), 0.0));
}

double sphere_integral(const SphereGeometry& geom, const RealProfile& f) {
  return 2.0 * kPi * profile_integral(geom.grid, f);
}

double sphere_area(const SphereGeometry& geom) {
  return 2.0 * kPi *
         profile_integral(geom.grid, RealProfile(geom.grid.count(), 1.0));
}

double sphere_average_scalar(const SphereGeometry& geom) {
  return sphere_integral(geom, geom.scalar) / sphere_area(geom);
}

HamiltonianAction hamiltonian_for_field(const SphereGeometry& geom,
                                        const std::string& generator) {
  if (generator != "rotation") {
    throw NoHamiltonianAction("unknown generator '" + generator +
                              "'; invariant sphere metrics only carry the "
                              "'rotation' action");
  }
  HamiltonianAction action;
  action.generator = generator;
  action.hamiltonian = geom.grid.x;  // already mean-zero against the area form
  // dh + iota_v omega = (h' - 1) dx in these coordinates.
  RealProfile hp = profile_derivative(geom.grid, action.hamiltonian);
  double worst = 0.0;
  for (double v : hp) worst = std::max(worst, std::abs(v - 1.0));
  action.closure_defect = worst;
  return action;
}

ComplexProfile rotation_curvature_contraction(const SphereGeometry& geom) {
  const ProfileGrid& grid = geom.grid;
  const std::size_t count = grid.count();
  // q = (w/2) * d/dx(log of the coordinate-chart metric potential); the pole
  // pieces -2/(1-x^2) are absorbed into -1/D in closed form, so q is smooth
  // through the poles: q = -1/D - w v'' + w'/2.
  RealProfile vpp = profile_derivative(grid, profile_derivative(grid, geom.correction));
  RealProfile wp = profile_derivative(grid, geom.w);
  RealProfile q(count);
  for (std::size_t j = 0; j < count; ++j) {
    q[j] = -1.0 / geom.denom[j] - geom.w[j] * vpp[j] + 0.5 * wp[j];
  }
  RealProfile qp = profile_derivative(grid, q);
  ComplexProfile out(count);
  for (std::size_t j = 0; j < count; ++j) {
    out[j] = Cx(0.0, -0.5 * geom.w[j] * qp[j]);
  }
  return out;
}

ComplexProfile hessian_endo_derivative(const SphereGeometry& geom,
                                       const RealProfile& h) {
  const ProfileGrid& grid = geom.grid;
  const std::size_t count = grid.count();
  RealProfile hp = profile_derivative(grid, h);
  RealProfile inner(count);
  for (std::size_t j = 0; j < count; ++j) inner[j] = 0.5 * geom.w[j] * hp[j];
  RealProfile step = profile_derivative(grid, profile_derivative(grid, inner));
  ComplexProfile out(count);
  for (std::size_t j = 0; j < count; ++j) {
    out[j] = Cx(0.0, -0.5 * geom.w[j] * step[j]);
  }
  return out;
}

}  // namespace zcrit
