// Rotation-invariant product families of sphere metrics over an annulus in
// the disc. The total space carries a relatively Kahler form
// omega = (round fibre form) + i ddbar Phi for an invariant potential
// Phi(t, x), with t = |b|^2 the squared base radius and x the round moment
// coordinate on the fibre. Fibre integration of the charge-term densities
// produces a closed (1,1)-form W(t) dt ∧ dtheta on the base, and the fibre
// integral of the hamiltonian against the phase-rotated density gives the
// scalar pairing sigma(t); the moment map identity for the diagonal rotation
// action reduces to sigma'(t) = W(t), which the checker verifies by radial
// finite differences with Richardson extrapolation.
#pragma once

#include <functional>

#include "zcrit/charge.hpp"
#include "zcrit/cp1.hpp"
#include "zcrit/report.hpp"

namespace zcrit {

// Family data: the relative potential as a closure over the radial window.
// The potential must be smooth on [t_min, t_max] x [-1, 1]; radial
// derivatives are taken by central differences of width base_step, so
// evaluation points stay base_step away from the window ends.
struct ProductFamily {
  ProfileGrid grid;
  std::function<double(double, double)> potential;  // Phi(t, x)
  double t_min = 0.0;
  double t_max = 0.0;
  double base_step = 1e-3;
};

ProductFamily make_product_family(
    const ProfileGrid& grid, std::function<double(double, double)> potential,
    double t_min, double t_max, double base_step = 1e-3);

// One fibre of the family on the symplectic profile backend. The fibre
// Kahler form is transported to action-angle coordinates by the exact
// per-fibre Legendre transform of the potential; round_coordinate stores the
// preimage of each grid node under the fibre moment map
// m(x) = x + (1/2)(1 - x^2) Phi_x, and hamiltonian stores the mean-zero
// family hamiltonian h = m + t Phi_t of the diagonal rotation action at the
// nodes. bridge_defect records the sup residual of the moment map inversion.
struct FamilyFibre {
  double t = 0.0;
  SphereGeometry geometry;
  RealProfile round_coordinate;
  RealProfile hamiltonian;
  double bridge_defect = 0.0;
};

FamilyFibre family_fibre(const ProductFamily& family, double t);

// <sigma(t), v>: fibre integral of the family hamiltonian against
// Im(e^{-i phi} z~) of the fibre metric. drop_potential_shift replaces the
// hamiltonian by the bare fibre coordinate (no t Phi_t shift); this breaks
// the moment map identity whenever the potential couples base and fibre and
// serves as the falsification control.
double family_sigma(const ProductFamily& family, double t,
                    const CentralChargeSpec& spec,
                    bool drop_potential_shift = false);

// W(t): the coefficient of the fibre-integrated charge density form against
// dt ∧ dtheta on the base. Each degree-1 charge term contributes its
// (1/(j+1)) omega^{j+1} ∧ (character block) fibre integral; the total is
// rotated by the fibre phase and the imaginary part is returned.
double family_omega_coefficient(const ProductFamily& family, double t,
                                const CentralChargeSpec& spec);

// Scalar-curvature specialization: sigma_S(t) = \int h (S^ - S(omega_b)) and
// the matching base form (S^/2) \int omega^2 - \int rho ∧ omega, assembled
// from the same fibre densities. The general pipeline with the csck charge
// equals -(4 pi / |Z|) times these values.
double family_scalar_sigma(const ProductFamily& family, double t,
                           bool drop_potential_shift = false);
double family_scalar_omega_coefficient(const ProductFamily& family, double t);

struct FamilyMomentOptions {
  int radial_samples = 5;    // radial nodes between the window margins
  double step = 1e-2;        // coarse radial step; the fine pass halves it
  double tolerance = 1e-4;   // relative gate on |sigma' - W|
  bool drop_potential_shift = false;
};

// Verifies d<sigma, v> + iota_v Omega = 0 in the radial reduction
// sigma'(t) = W(t) at interior radial nodes. sigma'(t) comes from central
// differences of the fibre-integral pairing at two step sizes with
// Richardson extrapolation; W(t) comes from the independent density
// assembly. The report also carries the closure defect of dh + iota_v omega
// in both the fibre and radial directions, the observed extrapolation
// order, and the size of the potential shift t Phi_t (nonvacuity witness).
VerificationReport check_family_moment_map(const ProductFamily& family,
                                           const CentralChargeSpec& spec,
                                           FamilyMomentOptions options = {});

}  // namespace zcrit
