// Frozen hand-computed charge values on the flat models, the phase branch,
// slope scalars, and construction-time validation. Every numeric oracle here
// was derived independently on paper before the implementation existed.
#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "zcrit/charge.hpp"

using namespace zcrit;

namespace {

GaussianRational gr(long long re, long long im) {
  return {Rational(re), Rational(im)};
}

ExactScalar exact(long long re, long long im) { return ExactScalar(gr(re, im)); }

}  // namespace

TEST_SUITE("charge") {

TEST_CASE("csck charge freezes to -2 + i on the unit-volume sphere table") {
  auto charge = builtin_charge("csck", 1);
  auto z = evaluate_charge(charge, topology_cp1(ExactScalar::one()));
  CHECK(z == exact(-2, 1));
  CHECK(phase(z) ==
        doctest::Approx(std::numbers::pi - std::atan(0.5)).epsilon(1e-15));
}

TEST_CASE("csck charge on the geometric sphere keeps 4 pi i - 2 exact") {
  auto sphere = topology_cp1(ExactScalar(GaussianRational(4), 1));
  auto z = evaluate_charge(builtin_charge("csck", 1), sphere);
  auto v = z.to_complex();
  CHECK(v.real() == -2.0);
  CHECK(v.imag() == 4.0 * std::numbers::pi);
  CHECK((z - (ExactScalar(gr(0, 4), 1) + exact(-2, 0))).is_zero());
}

TEST_CASE("csck charge is purely imaginary on flat tori") {
  CHECK(evaluate_charge(builtin_charge("csck", 1), topology_torus(1)) ==
        exact(0, 1));
  CHECK(evaluate_charge(builtin_charge("csck", 2), topology_torus(2)) ==
        exact(0, 2));
}

TEST_CASE("dhym charge freezes to -i on the trivial line bundle over t2") {
  auto topo = topology_torus_bundle(1, 1, 0);
  auto z = evaluate_charge(builtin_charge("dhym", 1), topo);
  CHECK(z == exact(0, -1));
  CHECK(phase(z) == doctest::Approx(-std::numbers::pi / 2).epsilon(1e-15));
}

TEST_CASE("dhym charge frozen values on t4 line bundles") {
  // Trivial bundle: only the alpha^2 term survives, Z = -(1/2) * 2 = -1.
  auto z0 = evaluate_charge(builtin_charge("dhym", 2),
                            topology_torus_bundle(2, 1, 0));
  CHECK(z0 == exact(-1, 0));
  CHECK(phase(z0) == std::numbers::pi);
  // Degree 2: slope density 1, Z = 1 - 2i - 1 = -2i.
  auto z2 = evaluate_charge(builtin_charge("dhym", 2),
                            topology_torus_bundle(2, 1, 2));
  CHECK(z2 == exact(0, -2));
}

TEST_CASE("dhym expansion carries the derived coefficients in dimension 2") {
  auto charge = builtin_charge("dhym", 2);
  REQUIRE(charge.bundle_terms.size() == 3);
  CHECK(charge.bundle_terms[0].coefficient == gr(1, 0));
  CHECK(charge.bundle_terms[0].alpha_power == 0);
  CHECK(charge.bundle_terms[0].chern_degree == 2);
  CHECK(charge.bundle_terms[1].coefficient == gr(0, -1));
  CHECK(charge.bundle_terms[1].alpha_power == 1);
  CHECK(charge.bundle_terms[1].chern_degree == 1);
  CHECK(charge.bundle_terms[2].coefficient ==
        GaussianRational(Rational(-1, 2)));
  CHECK(charge.bundle_terms[2].alpha_power == 2);
  CHECK(charge.bundle_terms[2].chern_degree == 0);
}

TEST_CASE("exp charge freezes to -2 on the flat 4-torus") {
  auto z = evaluate_charge(builtin_charge("exp", 2), topology_torus(2));
  CHECK(z == exact(-2, 0));
  CHECK(phase(z) == std::numbers::pi);
}

TEST_CASE("hym charge freezes to -3 + 4i on the rank-2 degree-3 t4 bundle") {
  auto topo = topology_torus_bundle(2, 2, 3);
  auto z = evaluate_charge(builtin_charge("hym", 2), topo);
  CHECK(z == exact(-3, 4));
  CHECK(phase(z) ==
        doctest::Approx(std::numbers::pi - std::atan(4.0 / 3.0)).epsilon(1e-15));
}

TEST_CASE("charges built purely from vanishing curvature integrals are exactly zero") {
  auto curvature_only =
      CentralChargeSpec::manifold(1, {{GaussianRational(1), 0, {1}}});
  auto z = evaluate_charge(curvature_only, topology_torus(1));
  CHECK(z.is_zero());
  CHECK_THROWS_AS(phase(z), ZeroCharge);

  auto mixed = CentralChargeSpec::manifold(
      2, {{gr(3, -7), 0, {1, 1}}, {gr(2, 5), 1, {1}}, {gr(0, 0), 2, {}}});
  CHECK(evaluate_charge(mixed, topology_torus(2)).is_zero());
}

TEST_CASE("phase uses the (-pi, pi] branch with +pi on the negative reals") {
  CHECK(phase(exact(1, 0)) == 0.0);
  CHECK(phase(exact(-1, 0)) == std::numbers::pi);
  CHECK(phase(exact(-5, 0)) == std::numbers::pi);
  CHECK(phase(exact(0, -1)) ==
        doctest::Approx(-std::numbers::pi / 2).epsilon(1e-15));
  CHECK(phase(exact(0, 1)) ==
        doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
  CHECK_THROWS_AS(phase(ExactScalar::zero()), ZeroCharge);
}

TEST_CASE("average scalar matches hand values") {
  CHECK(average_scalar(topology_cp1(ExactScalar::one())) == doctest::Approx(2.0));
  CHECK(average_scalar(topology_cp1(ExactScalar(GaussianRational(4), 1))) ==
        doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-15));
  CHECK(average_scalar(topology_torus(2)) == 0.0);
  ModelTopology empty;
  empty.name = "empty";
  empty.dimension = 1;
  CHECK_THROWS_AS(average_scalar(empty), NotPositive);
}

TEST_CASE("hym slope matches hand values") {
  CHECK(hym_slope(topology_torus_bundle(1, 1, 1)) == doctest::Approx(1.0));
  CHECK(hym_slope(topology_torus_bundle(2, 2, 3)) == doctest::Approx(3.0));
  CHECK(hym_slope(topology_torus_bundle(2, 1, 0)) == 0.0);
  CHECK_THROWS_AS(hym_slope(topology_torus(1)), ConfigError);
}

TEST_CASE("bundle tables keep the degree pairing as an invariant") {
  // \int ch_1(E) alpha^{n-1} recovers the declared degree on every model.
  auto t2 = topology_torus_bundle(1, 2, 5);
  CHECK(t2.bundle_integral(0, 1) == exact(5, 0));
  auto t4 = topology_torus_bundle(2, 2, 3);
  CHECK(t4.bundle_integral(1, 1) == exact(3, 0));
  auto cp1 = topology_cp1_bundle(ExactScalar::one(), 1, 4);
  CHECK(cp1.bundle_integral(0, 1) == exact(4, 0));
}

TEST_CASE("theta classes scale bundle terms through their graded pieces") {
  auto with_theta = CentralChargeSpec::bundle(
      2, {{GaussianRational(1), 0, 1, 1}},
      {GaussianRational(1), GaussianRational(3)});
  auto topo = topology_torus_bundle(2, 1, 2);
  CHECK(evaluate_charge(with_theta, topo) == exact(6, 0));
  // Default trivial theta has no degree-1 piece, so the same term vanishes.
  auto trivial_theta =
      CentralChargeSpec::bundle(2, {{GaussianRational(1), 0, 1, 1}});
  CHECK(evaluate_charge(trivial_theta, topo).is_zero());
}

TEST_CASE("evaluation is linear in terms and coefficients") {
  auto topo = topology_cp1(ExactScalar(GaussianRational(4), 1));
  std::vector<ManifoldChargeTerm> a = {{gr(2, 1), 1, {}}};
  std::vector<ManifoldChargeTerm> b = {{gr(0, -3), 0, {1}}};
  auto za = evaluate_charge(CentralChargeSpec::manifold(1, a), topo);
  auto zb = evaluate_charge(CentralChargeSpec::manifold(1, b), topo);
  std::vector<ManifoldChargeTerm> both = {a[0], b[0]};
  auto zab = evaluate_charge(CentralChargeSpec::manifold(1, both), topo);
  CHECK(zab == za + zb);

  std::vector<ManifoldChargeTerm> doubled = {{gr(4, 2), 1, {}}};
  auto z2 = evaluate_charge(CentralChargeSpec::manifold(1, doubled), topo);
  CHECK(z2 == za * GaussianRational(2));
}

TEST_CASE("multi-index lookup is order-insensitive") {
  ModelTopology topo = topology_torus(2);
  topo.manifold_integrals[{0, {1, 1}}] = exact(7, 0);
  auto forward =
      evaluate_charge(CentralChargeSpec::manifold(2, {{gr(1, 0), 0, {1, 1}}}), topo);
  CHECK(forward == exact(7, 0));
  CHECK(topo.manifold_integral(0, {1, 1}) == exact(7, 0));
}

TEST_CASE("degree rule is enforced at construction") {
  CHECK_THROWS_AS(
      CentralChargeSpec::manifold(1, {{GaussianRational(1), 1, {1}}}),
      DegreeMismatch);
  CHECK_THROWS_AS(
      CentralChargeSpec::manifold(2, {{GaussianRational(1), 1, {0}}}),
      DegreeMismatch);
  CHECK_THROWS_AS(CentralChargeSpec::bundle(2, {{GaussianRational(1), 1, 2, 0}}),
                  DegreeMismatch);
  CHECK_THROWS_AS(CentralChargeSpec::bundle(1, {{GaussianRational(1), 0, 0, 2}}),
                  DegreeMismatch);
}

TEST_CASE("evaluation rejects dimension and data mismatches") {
  CHECK_THROWS_AS(
      evaluate_charge(builtin_charge("csck", 2), topology_cp1(ExactScalar::one())),
      DegreeMismatch);
  CHECK_THROWS_AS(
      evaluate_charge(builtin_charge("hym", 1), topology_torus(1)),
      ConfigError);
}

TEST_CASE("builtin lookup is case-insensitive and rejects unknown names") {
  auto topo = topology_torus(2);
  CHECK(evaluate_charge(builtin_charge("cscK", 2), topo) ==
        evaluate_charge(builtin_charge("csck", 2), topo));
  CHECK_THROWS_AS(builtin_charge("quadratic", 2), NameError);
  CHECK(builtin_charges().size() == 4);
}

}  // TEST_SUITE
