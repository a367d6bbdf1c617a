// Rotation-invariant sphere geometries in action-angle coordinates: the
// moment interval is x in [-1,1] with angle period 2 pi, the area form is
// dx wedge dtheta (total area 4 pi), and the metric is encoded by a smooth
// correction v to the round symplectic potential. All calculus happens on a
// Chebyshev-Lobatto grid with barycentric differentiation and Clenshaw-Curtis
// quadrature.
#pragma once

#include <complex>
#include <string>
#include <vector>

namespace zcrit {

using ComplexProfile = std::vector<std::complex<double>>;
using RealProfile = std::vector<double>;

struct ProfileGrid {
  int order = 0;                // polynomial order M; M+1 nodes
  std::vector<double> x;        // nodes cos(pi j / M), descending from 1 to -1
  std::vector<double> weights;  // Clenshaw-Curtis weights for [-1, 1]
  std::vector<double> diff;     // (M+1)x(M+1) differentiation matrix, row-major

  explicit ProfileGrid(int order_);
  std::size_t count() const { return x.size(); }
};

RealProfile profile_derivative(const ProfileGrid& grid, const RealProfile& f);
double profile_integral(const ProfileGrid& grid, const RealProfile& f);
double profile_max_abs(const RealProfile& f);
double profile_max_abs(const ComplexProfile& f);

// Sphere metric from a correction profile v: the second derivative enters
// through D = 1 + (1 - x^2) v'', the inverse Hessian profile is
// w = (1 - x^2)/D, and the scalar curvature is -w''/(4 pi) (normalized so
// that the first character form integrates to 2 and the round value is
// 1/(2 pi), the topological average).
struct SphereGeometry {
  ProfileGrid grid;
  RealProfile correction;  // v at the nodes
  RealProfile denom;       // D = 1 + (1 - x^2) v''
  RealProfile w;           // (1 - x^2)/D, vanishing at the poles
  RealProfile scalar;      // -w''/(4 pi)
};

SphereGeometry sphere_from_profile(const ProfileGrid& grid,
                                   const RealProfile& correction);
SphereGeometry round_sphere(const ProfileGrid& grid);

// Integral of a profile against the area form: 2 pi * \int f dx.
double sphere_integral(const SphereGeometry& geom, const RealProfile& f);
double sphere_area(const SphereGeometry& geom);       // always 4 pi
double sphere_average_scalar(const SphereGeometry& geom);

// Hamiltonian data of the rotation action: h = x in these coordinates, with
// the closure defect sup|dh + iota_v omega| recorded from the grid derivative.
struct HamiltonianAction {
  std::string generator;
  RealProfile hamiltonian;
  double closure_defect = 0.0;
};

HamiltonianAction hamiltonian_for_field(const SphereGeometry& geom,
                                        const std::string& generator);

// Two independent routes to the contracted curvature identity. The rotation
// route evaluates the contraction of the rotation field with the tangent
// curvature through the pole-safe decomposition of the metric potential
// slope (-1/D - w v'' + w'/2, all poles cancelled in closed form). The
// Hessian route differentiates the endomorphism built from an arbitrary
// Hamiltonian candidate h, cascading bare derivatives of w. For the true
// Hamiltonian h = x both return the same multiple of w''.
ComplexProfile rotation_curvature_contraction(const SphereGeometry& geom);
ComplexProfile hessian_endo_derivative(const SphereGeometry& geom,
                                       const RealProfile& h);

}  // namespace zcrit
