// Unitary connections on model Hermitian bundles over torus backends:
// curvature over a central constant-curvature reference, the central-charge
// density on connections, Hermitian Yang-Mills and deformed equation
// residuals, the pairing on tangent directions of the connection space, the
// gauge action, and a dissipative line-bundle solver. No multiplication in
// this module is band-truncated, so the spectral integration-by-parts
// identities behind the pairing and moment checks hold at roundoff.
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "zcrit/charge.hpp"
#include "zcrit/kgeom.hpp"

namespace zcrit {

struct BundleModel {
  TorusGeometry geometry;
  int rank = 1;
  long long degree = 0;
  // Central harmonic reference: -2 pi i (deg/(rank n!)) omega_0 Id, where
  // omega_0 is the flat Kahler form of the grid. Central means every gauge
  // bracket with it vanishes, so covariant operations never need its
  // (non-periodic) potential.
  EndForm reference_curvature;
  ModelTopology topology;
};

// Validates rank in {1, 2} and builds the reference data.
std::shared_ptr<const BundleModel> make_bundle_model(TorusGeometry geometry,
                                                     int rank,
                                                     long long degree);

// Immutable connection: reference plus a skew-Hermitian-valued 1-form.
struct ConnectionState {
  std::shared_ptr<const BundleModel> model;
  EndForm perturbation;
};

// Checks shape (pure 1-form, matching rank/grid) and pointwise
// skew-Hermitianity before wrapping.
ConnectionState make_connection(std::shared_ptr<const BundleModel> model,
                                EndForm perturbation);
ConnectionState zero_connection(std::shared_ptr<const BundleModel> model);

// ds - dbar s for a real potential s: the skew-Hermitian line-bundle tangent
// whose curvature contribution is -2 d dbar s.
EndForm potential_tangent(const BundleModel& model, const Field& s);

// Hermitian conjugate of an endomorphism-valued form: entry transpose,
// matrix conjugation, and dz <-> dzbar on the form part.
EndForm hermitian_adjoint(const EndForm& a);
// sup-norm of a + a^dagger; zero for skew-Hermitian-valued forms.
double skew_defect(const EndForm& a);

// F_A = F_ref + d a + a wedge a; the (2,0) and (0,2) parts are carried along
// (perturbations need not be integrable).
EndForm curvature(const ConnectionState& conn);

// Sum over charge terms of rho_j omega^j wedge (1/k!)((i/2pi) F)^k wedge
// theta_d, with theta represented by its coefficient times the flat omega_0^d.
EndForm z_tilde_bundle(const ConnectionState& conn,
                       const CentralChargeSpec& spec);
// Integral of the trace; equals the charge value topologically.
Cx z_tilde_trace_integral(const ConnectionState& conn,
                          const CentralChargeSpec& spec);

// Hermitian endomorphism field (B - B^dagger)/(2i) applied to
// e^{-i phase} times the omega^n coefficient of the density.
MatrixField z_critical_residual(const ConnectionState& conn,
                                const CentralChargeSpec& spec);

// (i/2pi) Lambda_omega F_A - lambda Id with the slope from the topology
// table. Hermitian as computed (i times a skew-Hermitian contraction).
MatrixField hym_residual(const ConnectionState& conn);

// Im(e^{-i psi} (omega Id - F_A/2pi)^n / omega^n) with psi = phase + n pi/2,
// the phase of the n-fold expansion; equals n! times the critical residual
// of the exponential bundle charge (two code paths).
MatrixField dhym_residual(const ConnectionState& conn);

// The pairing on tangent directions at a connection:
// (1/4pi) Re[e^{-i phase} sum_terms rho (1/k!) (i/2pi)
//   sum_{p+q=k-1} \int omega^j tr(a Psi^p b Psi^q) theta], Psi = (i/2pi) F.
double omega_Z_pairing(const ConnectionState& conn, const EndForm& a,
                       const EndForm& b, const CentralChargeSpec& spec);
// Independent code path for the slope charge: -(1/8pi^2) \int tr(a wedge b)
// wedge omega^{n-1}.
double omega_pairing_hym_path(const ConnectionState& conn, const EndForm& a,
                              const EndForm& b);

struct GaugeElement {
  int rank = 1;
  MatrixField unitary;  // pointwise unitary matrix field
  MatrixField algebra;  // generating skew-Hermitian field when exponentiated
};

// Pointwise exponential of a skew-Hermitian matrix field (ranks 1 and 2).
GaugeElement gauge_from_algebra(const TorusGrid& grid, int rank,
                                const MatrixField& e);

// f . A = f^{-1} A f + f^{-1} d f on the perturbation; the central reference
// is fixed by conjugation.
ConnectionState gauge_act(const GaugeElement& f, const ConnectionState& conn);

// v_e = D_A e = d e + [a, e]: the tangent generated by a gauge direction.
EndForm infinitesimal_gauge(const MatrixField& e, const ConnectionState& conn);

// <nu(A), e> = (i/4pi) \int tr(e . residual) omega^n, the pairing whose
// directional derivative the finite-dimensional checks compare against the
// omega_Z pairing.
double moment_pairing(const ConnectionState& conn, const MatrixField& e,
                      const CentralChargeSpec& spec);

struct FlowControls {
  int max_iterations = 400;
  double step = 1.0;
  double target = 1e-10;
  bool throw_on_max_iterations = true;
};

struct FlowSample {
  int iteration = 0;
  double residual_sup = 0.0;
  double trace_drift = 0.0;  // |\int tr z~ - Z|
};

struct SolveResult {
  ConnectionState state;
  Field potential;
  std::vector<FlowSample> trace;
  bool converged = false;
};

// Dissipative flow d s/dt = -residual(s) for line bundles (n <= 2) with a
// semi-implicit spectral damping of the Laplacian symbol. Throws
// NonConvergence at the iteration cap (when enabled) and PhaseCollapse if
// the topological charge of the bundle vanishes.
SolveResult solve_dhym_line_bundle(std::shared_ptr<const BundleModel> model,
                                   const Field& initial_potential,
                                   const FlowControls& controls);

}  // namespace zcrit
