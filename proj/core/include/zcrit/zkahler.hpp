// The central-charge density operator on Kahler metrics: per-term character
// quotients, the endomorphism entering the adjoint correction, the correction
// itself (with an independent Laplacian closed form for first-character-only
// terms), the assembled density Z~ whose volume integral recovers the charge,
// and the imaginary-part residual against the topological phase. The constant
// scalar curvature equation appears as the special case fixed by the csck
// builtin charge.
#pragma once

#include <vector>

#include "zcrit/charge.hpp"
#include "zcrit/cp1.hpp"
#include "zcrit/kgeom.hpp"

namespace zcrit {

struct ZKahlerEvaluation {
  Field z_tilde;        // complex function on the manifold
  double phase_used;    // phase of the topological charge
  Field residual;       // Im(e^{-i phase} z_tilde), real values
  struct TermBreakdown {
    ManifoldChargeTerm term;
    Field chern_weil;   // (omega^j wedge product of character forms)/omega^n
    Field correction;   // adjoint correction, integrates to zero
  };
  std::vector<TermBreakdown> per_term;
};

// (omega^j ∧ ch~_{k_1} ∧ ... ∧ ch~_{k_r}) / omega^n as a function.
Field chern_weil_term(const TorusGeometry& geom, const ManifoldChargeTerm& term);

// l~_m: the m-th character factor (1-based) replaced by its degree-lowered
// endomorphism representative with one extra omega, divided by omega^n.
// Requires k_m >= 1.
MatrixField ell_endomorphism(const TorusGeometry& geom,
                             const ManifoldChargeTerm& term, int m);

// -(1/2pi) sum_m d* dbar* (l~_m flat); integrates to zero against omega^n.
Field correction_term(const TorusGeometry& geom, const ManifoldChargeTerm& term);

// Independent code path for terms whose character factors are all first
// powers: -(1/2pi)((n-j)/(2(j+1))) Delta((omega^{j+1} ∧ Ric^{n-j-1})/omega^n).
// The constant carries the extra 1/2 from d* acting on a holomorphic
// differential, half the full Laplacian.
Field correction_term_closed_form(const TorusGeometry& geom,
                                  const ManifoldChargeTerm& term);

// Full evaluation on a torus backend. The topological charge and phase come
// from the matching torus intersection table.
ZKahlerEvaluation z_tilde_manifold(const TorusGeometry& geom,
                                   const CentralChargeSpec& spec);

// S^ - S(omega). The charge-pipeline residual for the csck builtin equals
// -(volume/(n |Z|)) times this field; the sign and factor are documented
// rather than normalized away.
Field csck_residual(const TorusGeometry& geom);

// Sphere-profile variants. Degree-1 manifold terms are either the volume term
// (constant 1) or carry one first character factor (the scalar curvature
// profile); corrections vanish identically there, so the density is exact.
// The topological data is the geometric sphere table with total area 4 pi.
ModelTopology topology_sphere_geometric();
ComplexProfile z_tilde_profile(const SphereGeometry& geom,
                               const CentralChargeSpec& spec);
RealProfile z_residual_profile(const SphereGeometry& geom,
                               const CentralChargeSpec& spec);
RealProfile csck_residual_profile(const SphereGeometry& geom);

}  // namespace zcrit
