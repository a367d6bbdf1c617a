// Central-charge density operator. Terms are assembled as top-degree form
// quotients against omega^n; the adjoint correction runs through the weak-form
// d* dbar* chain, with a Laplacian closed form as an independent path for
// first-power character terms. Quotients divide pointwise and are never
// band-truncated, matching the split multiplication policy of the metric
// pipeline.
#include "zcrit/zkahler.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "zcrit/errors.hpp"

namespace zcrit {

namespace {

Field divide_fields(const Field& a, const Field& b) {
  Field out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] / b[i];
  return out;
}

int term_degree(const ManifoldChargeTerm& term) {
  int total = term.alpha_power;
  for (int k : term.chern_powers) total += k;
  return total;
}

void check_term_degree(const TorusGeometry& geom,
                       const ManifoldChargeTerm& term) {
  if (term.alpha_power < 0)
    throw DegreeMismatch("manifold term has negative alpha power");
  for (int k : term.chern_powers)
    if (k < 1) throw DegreeMismatch("manifold term has Chern entry below 1");
  if (term_degree(term) != geom.grid.n)
    throw DegreeMismatch("manifold term of degree " +
                         std::to_string(term_degree(term)) +
                         " does not match complex dimension " +
                         std::to_string(geom.grid.n));
}

// Top coefficient of omega^n, the reference volume density n! * rho.
Field top_volume(const TorusGeometry& geom) {
  return top_coefficient(kahler_power(geom, geom.grid.n));
}

}  // namespace

Field chern_weil_term(const TorusGeometry& geom,
                      const ManifoldChargeTerm& term) {
  check_term_degree(geom, term);
  TensorField acc = kahler_power(geom, term.alpha_power);
  for (int k : term.chern_powers)
    acc = wedge(acc, chern_weil_form(geom, k), true);
  return divide_fields(top_coefficient(acc), top_volume(geom));
}

MatrixField ell_endomorphism(const TorusGeometry& geom,
                             const ManifoldChargeTerm& term, int m) {
  check_term_degree(geom, term);
  const int r = static_cast<int>(term.chern_powers.size());
  if (m < 1 || m > r)
    throw DegreeMismatch("character factor index " + std::to_string(m) +
                         " outside 1.." + std::to_string(r));
  const int km = term.chern_powers[static_cast<std::size_t>(m - 1)];
  const int n = geom.grid.n;

  // Scalar part: one extra omega and every other character factor.
  TensorField weight = kahler_power(geom, term.alpha_power + 1);
  for (int i = 0; i < r; ++i) {
    if (i == m - 1) continue;
    weight = wedge(weight, chern_weil_form(geom, term.chern_powers[i]), true);
  }

  // Endomorphism part: (1/(k_m-1)!) ((i/2pi) R)^{k_m-1}.
  EndForm power = end_identity(geom.grid, n);
  if (km > 1) {
    const EndForm scaled = end_scale(
        curvature_tensor(geom), Cx(0.0, 1.0 / (2.0 * std::numbers::pi)));
    for (int p = 1; p < km; ++p) power = end_wedge(power, scaled, true);
    double fact = 1.0;
    for (int p = 2; p < km; ++p) fact *= p;
    power = end_scale(power, Cx(1.0 / fact, 0.0));
  }

  const Field volume = top_volume(geom);
  const Cx front(1.0 / (term.alpha_power + 1.0), 0.0);
  // MatrixField is row-major n*n; build entry (a,b) from the wedge top part.
  MatrixField entries;
  entries.reserve(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const TensorField entry = wedge(weight, power.at(a, b), true);
      entries.push_back(
          scale(divide_fields(top_coefficient(entry), volume), front));
    }
  }
  return entries;
}

Field correction_term(const TorusGeometry& geom,
                      const ManifoldChargeTerm& term) {
  check_term_degree(geom, term);
  Field out = geom.grid.zero_field();
  const int r = static_cast<int>(term.chern_powers.size());
  for (int m = 1; m <= r; ++m) {
    const MatrixField ell = ell_endomorphism(geom, term, m);
    const Field piece = adjoint_d_star_dbar_star(geom, flat_map(geom, ell));
    out = add(out, piece);
  }
  return scale(out, Cx(-1.0 / (2.0 * std::numbers::pi), 0.0));
}

Field correction_term_closed_form(const TorusGeometry& geom,
                                  const ManifoldChargeTerm& term) {
  check_term_degree(geom, term);
  for (int k : term.chern_powers)
    if (k != 1)
      throw DegreeMismatch(
          "closed-form correction requires first-power character factors");
  const int r = static_cast<int>(term.chern_powers.size());
  if (r == 0) return geom.grid.zero_field();

  TensorField acc = kahler_power(geom, term.alpha_power + 1);
  const TensorField ricci = chern_weil_form(geom, 1);
  for (int i = 0; i < r - 1; ++i) acc = wedge(acc, ricci, true);
  const Field f = divide_fields(top_coefficient(acc), top_volume(geom));
  const double constant =
      -static_cast<double>(r) /
      (4.0 * std::numbers::pi * (term.alpha_power + 1.0));
  return scale(laplacian(geom, f), Cx(constant, 0.0));
}

ZKahlerEvaluation z_tilde_manifold(const TorusGeometry& geom,
                                   const CentralChargeSpec& spec) {
  if (spec.kind != ChargeKind::Manifold)
    throw DegreeMismatch(
        "bundle charge passed to the manifold density operator");
  if (spec.dimension != geom.grid.n)
    throw DegreeMismatch("charge of dimension " +
                         std::to_string(spec.dimension) +
                         " does not match complex dimension " +
                         std::to_string(geom.grid.n));

  const ModelTopology topo = topology_torus(geom.grid.n);
  const double phi = phase(evaluate_charge(spec, topo));

  ZKahlerEvaluation eval;
  eval.phase_used = phi;
  eval.z_tilde = geom.grid.zero_field();
  for (const ManifoldChargeTerm& term : spec.manifold_terms) {
    ZKahlerEvaluation::TermBreakdown part;
    part.term = term;
    part.chern_weil = chern_weil_term(geom, term);
    part.correction = correction_term(geom, term);
    const Cx coeff = term.coefficient.to_complex();
    eval.z_tilde = add(
        eval.z_tilde, scale(add(part.chern_weil, part.correction), coeff));
    eval.per_term.push_back(std::move(part));
  }

  const Cx rotate = std::exp(Cx(0.0, -phi));
  eval.residual = Field(geom.grid.size());
  for (std::size_t i = 0; i < eval.residual.size(); ++i)
    eval.residual[i] = Cx((rotate * eval.z_tilde[i]).imag(), 0.0);
  return eval;
}

Field csck_residual(const TorusGeometry& geom) {
  const double average = average_scalar(topology_torus(geom.grid.n));
  const Field s = scalar_curvature(geom);
  Field out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    out[i] = Cx(average - s[i].real(), 0.0);
  return out;
}

ModelTopology topology_sphere_geometric() {
  return topology_cp1(ExactScalar(GaussianRational(4), 1));
}

namespace {

void check_sphere_spec(const CentralChargeSpec& spec) {
  if (spec.kind != ChargeKind::Manifold)
    throw DegreeMismatch(
        "bundle charge passed to the manifold density operator");
  if (spec.dimension != 1)
    throw DegreeMismatch("charge of dimension " +
                         std::to_string(spec.dimension) +
                         " does not match the sphere");
}

}  // namespace

ComplexProfile z_tilde_profile(const SphereGeometry& geom,
                               const CentralChargeSpec& spec) {
  check_sphere_spec(spec);
  const std::size_t count = geom.grid.count();
  ComplexProfile out(count, Cx(0.0, 0.0));
  for (const ManifoldChargeTerm& term : spec.manifold_terms) {
    const Cx coeff = term.coefficient.to_complex();
    if (term.alpha_power == 1) {
      for (std::size_t i = 0; i < count; ++i) out[i] += coeff;
    } else {
      // Degree rule leaves alpha^0 ch_1: the density is the scalar curvature
      // and the adjoint correction vanishes identically (the endomorphism is
      // the identity, whose flat is the Kahler form contraction).
      for (std::size_t i = 0; i < count; ++i)
        out[i] += coeff * geom.scalar[i];
    }
  }
  return out;
}

RealProfile z_residual_profile(const SphereGeometry& geom,
                               const CentralChargeSpec& spec) {
  const double phi =
      phase(evaluate_charge(spec, topology_sphere_geometric()));
  const ComplexProfile z = z_tilde_profile(geom, spec);
  const Cx rotate = std::exp(Cx(0.0, -phi));
  RealProfile out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = (rotate * z[i]).imag();
  return out;
}

RealProfile csck_residual_profile(const SphereGeometry& geom) {
  const double average = average_scalar(topology_sphere_geometric());
  RealProfile out(geom.grid.count());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = average - geom.scalar[i];
  return out;
}

}  // namespace zcrit
