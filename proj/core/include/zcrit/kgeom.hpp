// Kahler geometry on torus grids: metrics from potentials, Chern connection
// and curvature, Chern-Weil character forms, the metric Laplacian, flats and
// weak-form adjoints, and volume integrals. Index conventions are pinned by
// oracles in the tests: G[a][b] = g(d/dz_a, d/dz_b-bar), omega = i sum G[a][b]
// dz^a dzbar^b, and inverse contractions go through conj(G^{-1}).
#pragma once

#include <string>
#include <vector>

#include "zcrit/tensorfield.hpp"
#include "zcrit/torus.hpp"

namespace zcrit {

// n x n matrix of scalar fields, row-major; entry (i, j) at index i * n + j.
using MatrixField = std::vector<Field>;

struct TorusGeometry {
  TorusGrid grid;
  Field potential;    // real Kahler potential phi
  MatrixField g;      // metric components G[a][b] = delta/2 + d_a dbar_b phi
  MatrixField g_inv;  // pointwise inverse of G
  Field det_g;        // det G
  Field density;      // rho = 2^n det G; omega^n = n! rho dV
  Field log_det;      // log det G

  const Field& metric(int a, int b) const { return g[a * grid.n + b]; }
  const Field& inverse(int a, int b) const { return g_inv[a * grid.n + b]; }
};

// Build the metric g0 + Hessian(phi) and its derived fields. Throws
// NotPositive (listing offending grid points) when the metric degenerates.
TorusGeometry metric_from_potential(const TorusGrid& grid, const Field& phi);

// Kahler form omega = i sum G[a][b] dz^a wedge dzbar^b and its powers.
TensorField kahler_form(const TorusGeometry& geom);
TensorField kahler_power(const TorusGeometry& geom, int power);

// Chern connection matrices Theta_c = (G^T)^{-1} (d_c G)^T as an End-valued
// (1,0)-form, and the curvature R = dbar Theta as an End-valued (1,1)-form.
EndForm chern_connection(const TorusGeometry& geom);
EndForm curvature_tensor(const TorusGeometry& geom);

// Entrywise Dolbeault operators on End-valued forms.
EndForm end_partial(const EndForm& a);
EndForm end_partial_bar(const EndForm& a);

// Chern-Weil representative tr((1/k!) ((i/2pi) R)^k) as a (k,k)-form.
TensorField chern_weil_form(const TorusGeometry& geom, int k);

// Ricci form: trace route (i/2pi) tr R; the log-det route
// -(i/2pi) d dbar log det G cross-checks it in the tests.
TensorField ricci_form(const TorusGeometry& geom);
TensorField ricci_form_from_log_det(const TorusGeometry& geom);

// Contraction of a (1,1)-form against omega: Lambda beta = -i tr(B G^{-1})
// with B the coefficient matrix; flat oracle Lambda(b dz dzbar) = -2 i b.
Field lambda_contract(const TorusGeometry& geom, const TensorField& beta);

// Scalar curvature S = Lambda(Ricci), real part of the contraction.
Field scalar_curvature(const TorusGeometry& geom);

// Full metric Laplacian (-d* d on functions, sign so that flat-torus modes
// give Delta cos(2 pi x) = -4 pi^2 cos(2 pi x)); acts on complex fields.
Field laplacian(const TorusGeometry& geom, const Field& f);

// Flat of an endomorphism A: T[b][c] = sum_a G[a][b] A[a][c], the two-index
// tensor fed to the weak-form adjoints.
MatrixField flat_map(const TorusGeometry& geom, const MatrixField& endo);

// Antisymmetrization of a flat tensor into a (1,1)-form with components
// -T[d][c] on dz^c dzbar^d; flat_map of the identity gives +i omega.
TensorField antisym_form(const TorusGeometry& geom, const MatrixField& flat);

// Weak-form adjoints. dbar_star maps a flat tensor to a (1,0)-form (vector of
// n fields); d_star_one_form maps a (1,0)-form to a function; the composite
// is the correction operator d* dbar* used by the manifold charge density.
std::vector<Field> dbar_star(const TorusGeometry& geom, const MatrixField& t);
Field d_star_one_form(const TorusGeometry& geom, const std::vector<Field>& v);
Field adjoint_d_star_dbar_star(const TorusGeometry& geom, const MatrixField& t);

// Hermitian L2 pairings used in the adjointness tests, integrated against
// omega^n: one_form_pairing<v,u> = sum v_c conj(u_a) ginv-pattern; the tensor
// pairing matches it through dbar.
Cx one_form_inner(const TorusGeometry& geom, const std::vector<Field>& v,
                  const std::vector<Field>& u);
Cx flat_tensor_inner(const TorusGeometry& geom, const MatrixField& s,
                     const MatrixField& t);

// dbar of a (1,0)-form as a flat-tensor slot pattern: (dbar u)[d][c] = dbar_d u_c.
MatrixField dbar_one_form(const TorusGeometry& geom, const std::vector<Field>& u);

// Endomorphism g^{-1} i dbar d h entering the curvature Hamiltonian identity;
// for real h it is skew-adjoint with tr(i H) = -(1/2) Delta h.
MatrixField endo_from_hessian(const TorusGeometry& geom, const Field& h);

// Pointwise trace of a product of endomorphisms, sum_ab A[a][b] B[b][a].
Field endo_trace_product(const TorusGrid& grid, const MatrixField& a,
                         const MatrixField& b);

// Integral of a function against the volume form omega^n (= n! rho dV).
Cx volume_integral(const TorusGeometry& geom, const Field& f);

// Flat tori carry no Hamiltonian holomorphic isometries: the request always
// fails, naming the generator. The sphere backend provides the real thing.
[[noreturn]] void hamiltonian_for_field(const TorusGeometry& geom,
                                        const std::string& generator);

}  // namespace zcrit
