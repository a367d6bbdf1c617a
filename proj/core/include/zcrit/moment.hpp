// Identity checks on the sphere profile backend: equivariant closedness of
// (form, hamiltonian) pairs, the curvature/moment-map contraction identity,
// and constancy of the scalar-curvature pairing across metric families. Each
// check returns a VerificationReport and each has a falsifiable failure mode
// exercised by corrupted inputs.
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "zcrit/bundle.hpp"
#include "zcrit/cp1.hpp"
#include "zcrit/report.hpp"
#include "zcrit/rng.hpp"

namespace zcrit {

// Rotation-invariant equivariant form on the sphere: a 2-form written as
// (volume part) dx ∧ dθ plus a degree-0 hamiltonian part attached to the
// named generator.
struct EquivariantSample {
  RealProfile volume_part;
  RealProfile hamiltonian;
  std::string generator = "rotation";
};

// The Kahler form with its rotation hamiltonian: volume part 1, hamiltonian x.
EquivariantSample equivariant_kahler_sample(const SphereGeometry& geom);

// Equivariant wedge of two samples on a one-dimensional fibre: the 2-form
// parts annihilate each other, so the product is (h1 u2 + u1 h2, h1 h2).
EquivariantSample equivariant_wedge(const ProfileGrid& grid,
                                    const EquivariantSample& a,
                                    const EquivariantSample& b);

// d(alpha(v)) + iota_v(alpha(v)) = 0: on the invariant profile slice the
// defect is the 1-form coefficient h' - u.
VerificationReport check_equivariant_closed(const SphereGeometry& geom,
                                            const EquivariantSample& sample,
                                            double tolerance = 1e-10);

// iota_v R + D_End(g^{-1} i dbar d h) = 0 for the rotation field, compared
// through the two independent pole-safe routes of the profile backend.
VerificationReport check_curvature_moment_map(const SphereGeometry& geom,
                                              const HamiltonianAction& action,
                                              double tolerance = 1e-6);

// Pairing sigma(b) = \int h (S^ - S(omega_b)) omega_b per family member.
// drop_average removes the S^ term; on the sphere this cannot move any value
// because \int h omega_b vanishes identically for the rotation hamiltonian,
// so falsification has to corrupt the hamiltonian instead.
std::vector<double> futaki_values(const std::vector<SphereGeometry>& family,
                                  const HamiltonianAction& action,
                                  bool drop_average = false);

// All family values must agree pairwise and vanish.
VerificationReport check_futaki_constancy(
    const std::vector<SphereGeometry>& family, const HamiltonianAction& action,
    double tolerance = 1e-8);

// Random admissible invariant sphere metric: a seeded polynomial profile
// perturbation with denominators bounded away from zero.
SphereGeometry seeded_sphere(const ProfileGrid& grid, std::uint64_t seed);

// Finite-difference verification of the derivative identity behind the
// bundle moment map: d/dt|_0 <nu(A + t a), e> = -Omega_Z(v_e, a), with v_e
// the infinitesimal gauge tangent of e at A. Central differences at two
// step sizes, Richardson-extrapolated; the observed convergence order is
// recorded in the report and gated alongside the relative mismatch.
struct BundleMomentOptions {
  double step = 0.05;       // coarse step; the fine pass halves it
  double tolerance = 1e-6;  // relative mismatch gate
};

VerificationReport check_bundle_moment_map(
    std::shared_ptr<const BundleModel> model, const ConnectionState& conn,
    const MatrixField& e, const EndForm& tangent,
    const CentralChargeSpec& spec, BundleMomentOptions options = {});

// Contraction of the universal curvature with a gauge generator along an
// orbit slice versus the covariant derivative of the pointwise moment map
// value <mu, e> = -e: the Richardson-extrapolated orbit derivative of the
// connection under exp(t e) must match -D_End(-e) = d e + [a, e].
VerificationReport check_equivariant_chern_weil_bundle(
    std::shared_ptr<const BundleModel> model, const ConnectionState& conn,
    const MatrixField& e, double tolerance = 1e-8, double step = 0.02);

}  // namespace zcrit
