// Kahler geometry oracles on flat and perturbed torus metrics: Laplacian
// eigenvalues, curvature symmetries, dual Ricci routes, topological integrals,
// and exactness of the weak-form adjoint operators under the L2 pairings.
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "zcrit/errors.hpp"
#include "zcrit/kgeom.hpp"
#include "zcrit/tensorfield.hpp"
#include "zcrit/torus.hpp"

namespace {

using zcrit::Cx;
using zcrit::Field;
using zcrit::MatrixField;
using zcrit::TensorField;
using zcrit::TorusGeometry;
using zcrit::TorusGrid;

constexpr double kPi = std::numbers::pi;

TorusGeometry flat(int n, int N) {
  TorusGrid grid(n, N);
  return zcrit::metric_from_potential(grid, grid.zero_field());
}

// Small low-mode potential on T2; amplitude keeps the truncated tail of the
// rational metric functions near 1e-10 on a 32-point grid.
TorusGeometry curved_t2() {
  TorusGrid grid(1, 32);
  Field phi = grid.sample([](const std::vector<double>& x) {
    return Cx(0.002 * (std::sin(2.0 * kPi * x[0]) +
                       0.7 * std::cos(2.0 * kPi * x[1]) +
                       0.5 * std::sin(2.0 * kPi * x[0]) *
                           std::cos(2.0 * kPi * x[1])),
              0.0);
  });
  return zcrit::metric_from_potential(grid, phi);
}

// Low-mode potential on T4 with an off-diagonal Hessian block; the 16-point
// grid truncates at |k| = 5, so the amplitude stays small enough that the
// discarded tail sits below 1e-7.
TorusGeometry curved_t4() {
  TorusGrid grid(2, 16);
  Field phi = grid.sample([](const std::vector<double>& x) {
    return Cx(5e-4 * (std::sin(2.0 * kPi * x[0]) +
                      0.8 * std::cos(2.0 * kPi * x[3]) +
                      0.6 * std::sin(2.0 * kPi * x[2]) *
                          std::cos(2.0 * kPi * x[1]) +
                      0.5 * std::cos(2.0 * kPi * x[0]) *
                          std::cos(2.0 * kPi * x[2])),
              0.0);
  });
  return zcrit::metric_from_potential(grid, phi);
}

Field real_probe(const TorusGrid& grid) {
  return grid.sample([](const std::vector<double>& x) {
    double v = std::cos(2.0 * kPi * x[0]) + 0.6 * std::sin(2.0 * kPi * x[1]);
    if (x.size() > 2) v += 0.4 * std::cos(2.0 * kPi * x[2]) * std::sin(2.0 * kPi * x[3]);
    return Cx(v, 0.0);
  });
}

Field complex_probe(const TorusGrid& grid, double shift) {
  return grid.sample([shift](const std::vector<double>& x) {
    double u = 2.0 * kPi * (x[0] + shift);
    double w = 2.0 * kPi * (x[1] - 0.5 * shift);
    return Cx(std::cos(u) + 0.3 * std::sin(w), std::sin(u + w));
  });
}

MatrixField random_endo(const TorusGrid& grid) {
  const int n = grid.n;
  MatrixField endo(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      endo[static_cast<std::size_t>(i) * n + j] =
          complex_probe(grid, 0.1 * (1 + i) + 0.07 * j);
    }
  }
  return endo;
}

}  // namespace

TEST_SUITE("kgeom") {

TEST_CASE("flat Laplacian has exact trigonometric eigenvalues") {
  for (int n : {1, 2}) {
    TorusGeometry geom = flat(n, n == 1 ? 32 : 8);
    for (int axis = 0; axis < geom.grid.axes(); ++axis) {
      Field mode = geom.grid.sample([axis](const std::vector<double>& x) {
        return Cx(std::cos(2.0 * kPi * x[axis]), 0.0);
      });
      Field lap = zcrit::laplacian(geom, mode);
      Field expect = zcrit::scale(mode, Cx(-4.0 * kPi * kPi, 0.0));
      CHECK(zcrit::max_abs(zcrit::subtract(lap, expect)) < 1e-10);
    }
  }
}

TEST_CASE("volume integrals: unit T2, doubled T4, and potential invariance") {
  TorusGeometry f1 = flat(1, 16);
  TorusGeometry f2 = flat(2, 8);
  Field one1 = f1.grid.constant_field(Cx(1.0, 0.0));
  Field one2 = f2.grid.constant_field(Cx(1.0, 0.0));
  CHECK(zcrit::volume_integral(f1, one1).real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(zcrit::volume_integral(f2, one2).real() == doctest::Approx(2.0).epsilon(1e-14));

  // Total volume is a cohomological quantity: adding a potential leaves it
  // fixed to roundoff, and the wedge-power route agrees with the density.
  TorusGeometry c2 = curved_t2();
  TorusGeometry c4 = curved_t4();
  Cx v2 = zcrit::volume_integral(c2, c2.grid.constant_field(Cx(1.0, 0.0)));
  Cx v4 = zcrit::volume_integral(c4, c4.grid.constant_field(Cx(1.0, 0.0)));
  CHECK(std::abs(v2 - Cx(1.0, 0.0)) < 1e-13);
  CHECK(std::abs(v4 - Cx(2.0, 0.0)) < 1e-13);
  CHECK(std::abs(zcrit::form_integral(zcrit::kahler_power(c4, 2)) - v4) < 1e-13);
}

TEST_CASE("degenerate potentials are rejected with located offenders") {
  TorusGrid grid(1, 16);
  Field phi = grid.sample([](const std::vector<double>& x) {
    return Cx(0.1 * std::cos(2.0 * kPi * x[0]), 0.0);  // Hessian swing > 1/2
  });
  CHECK_THROWS_WITH_AS(
      (void)zcrit::metric_from_potential(grid, phi),
      doctest::Contains("degenerates"), zcrit::NotPositive);
}

TEST_CASE("flat of the identity antisymmetrizes to i times the Kahler form") {
  TorusGeometry geom = curved_t4();
  const int n = geom.grid.n;
  MatrixField id(static_cast<std::size_t>(n) * n, geom.grid.zero_field());
  for (int a = 0; a < n; ++a) {
    id[static_cast<std::size_t>(a) * n + a] =
        geom.grid.constant_field(Cx(1.0, 0.0));
  }
  TensorField lhs = zcrit::antisym_form(geom, zcrit::flat_map(geom, id));
  TensorField rhs = zcrit::form_scale(zcrit::kahler_form(geom), Cx(0.0, 1.0));
  CHECK(zcrit::form_max_abs(zcrit::form_subtract(lhs, rhs)) < 1e-14);
}

TEST_CASE("contraction of the Kahler form gives the complex dimension") {
  TorusGeometry c2 = curved_t2();
  TorusGeometry c4 = curved_t4();
  Field l2 = zcrit::lambda_contract(c2, zcrit::kahler_form(c2));
  Field l4 = zcrit::lambda_contract(c4, zcrit::kahler_form(c4));
  CHECK(zcrit::max_abs(zcrit::subtract(l2, c2.grid.constant_field(Cx(1.0, 0.0)))) < 1e-12);
  CHECK(zcrit::max_abs(zcrit::subtract(l4, c4.grid.constant_field(Cx(2.0, 0.0)))) < 1e-12);

  // Flat one-mode oracle: Lambda(b dz dzbar) = -2 i b.
  TorusGeometry f1 = flat(1, 16);
  Field b = real_probe(f1.grid);
  TensorField beta(f1.grid);
  beta.add_component(1u, 1u, b);
  Field got = zcrit::lambda_contract(f1, beta);
  CHECK(zcrit::max_abs(zcrit::subtract(got, zcrit::scale(b, Cx(0.0, -2.0)))) < 1e-12);
}

TEST_CASE("Ricci form agrees between curvature trace and log-determinant") {
  TorusGeometry c2 = curved_t2();
  TensorField tr_route2 = zcrit::ricci_form(c2);
  TensorField ld_route2 = zcrit::ricci_form_from_log_det(c2);
  CHECK(zcrit::form_max_abs(zcrit::form_subtract(tr_route2, ld_route2)) < 1e-9);

  TorusGeometry c4 = curved_t4();
  TensorField tr_route4 = zcrit::ricci_form(c4);
  TensorField ld_route4 = zcrit::ricci_form_from_log_det(c4);
  CHECK(zcrit::form_max_abs(zcrit::form_subtract(tr_route4, ld_route4)) < 1e-7);
  // Nonflat sanity: curvature is actually present.
  CHECK(zcrit::form_max_abs(tr_route4) > 1e-4);
}

TEST_CASE("lowered curvature is symmetric under exchange of holomorphic slots") {
  TorusGeometry geom = curved_t4();
  const int n = geom.grid.n;
  zcrit::EndForm r = zcrit::curvature_tensor(geom);
  double worst = 0.0;
  for (int g = 0; g < n; ++g) {
    for (int d = 0; d < n; ++d) {
      for (int e = 0; e < n; ++e) {
        for (int b = 0; b < n; ++b) {
          // R_{g dbar e bbar} = sum_a R[a][e] component (g, d) times G[a][b].
          Field lhs = geom.grid.zero_field();
          Field rhs = geom.grid.zero_field();
          for (int a = 0; a < n; ++a) {
            Field ce = r.at(a, e).component(1u << g, 1u << d);
            Field cg = r.at(a, g).component(1u << e, 1u << d);
            if (!ce.empty()) {
              lhs = zcrit::add(lhs, zcrit::multiply(ce, geom.metric(a, b)));
            }
            if (!cg.empty()) {
              rhs = zcrit::add(rhs, zcrit::multiply(cg, geom.metric(a, b)));
            }
          }
          worst = std::max(worst, zcrit::max_abs(zcrit::subtract(lhs, rhs)));
        }
      }
    }
  }
  CHECK(worst < 1e-7);
  CHECK(zcrit::end_max_abs(r) > 1e-4);  // the check is not vacuous
}

TEST_CASE("first character form integrates to zero against Kahler powers") {
  TorusGeometry c2 = curved_t2();
  Cx i2 = zcrit::form_integral(zcrit::ricci_form(c2));
  CHECK(std::abs(i2) < 1e-12);

  TorusGeometry c4 = curved_t4();
  Cx i4 = zcrit::form_integral(
      zcrit::wedge(zcrit::ricci_form(c4), zcrit::kahler_form(c4), false));
  CHECK(std::abs(i4) < 1e-12);

  // Scalar curvature integrates to the same topological zero, up to the
  // truncated rational tail of the contraction route.
  Cx s2 = zcrit::volume_integral(c2, zcrit::scalar_curvature(c2));
  Cx s4 = zcrit::volume_integral(c4, zcrit::scalar_curvature(c4));
  CHECK(std::abs(s2) < 1e-9);
  CHECK(std::abs(s4) < 1e-6);
}

TEST_CASE("second character form of a torus metric integrates to zero") {
  TorusGeometry geom = curved_t4();
  Cx i = zcrit::form_integral(zcrit::chern_weil_form(geom, 2));
  CHECK(std::abs(i) < 1e-10);
}

TEST_CASE("Laplacian is symmetric and has exact zero mean") {
  TorusGeometry geom = curved_t2();
  Field f = complex_probe(geom.grid, 0.0);
  Field h = complex_probe(geom.grid, 0.31);
  Field lf = zcrit::laplacian(geom, f);
  Field lh = zcrit::laplacian(geom, h);
  CHECK(std::abs(zcrit::volume_integral(geom, lf)) < 1e-11);

  Cx lhs = zcrit::volume_integral(geom, zcrit::multiply(lf, zcrit::conjugate(h)));
  Cx rhs = zcrit::volume_integral(geom, zcrit::multiply(f, zcrit::conjugate(lh)));
  CHECK(std::abs(lhs - rhs) < 1e-10);
}

TEST_CASE("weak-form dbar adjoint matches the L2 pairing across dbar") {
  for (bool four : {false, true}) {
    TorusGeometry geom = four ? curved_t4() : curved_t2();
    const int n = geom.grid.n;
    MatrixField t = random_endo(geom.grid);  // arbitrary two-index tensor
    std::vector<Field> u(n);
    for (int c = 0; c < n; ++c) u[c] = complex_probe(geom.grid, 0.05 + 0.2 * c);

    Cx lhs = zcrit::one_form_inner(geom, zcrit::dbar_star(geom, t), u);
    Cx rhs = zcrit::flat_tensor_inner(geom, t, zcrit::dbar_one_form(geom, u));
    CHECK(std::abs(lhs - rhs) < 1e-9);
  }
}

TEST_CASE("composite adjoint divergence has machine-zero integral") {
  TorusGeometry geom = curved_t4();
  MatrixField t = random_endo(geom.grid);
  Field div = zcrit::adjoint_d_star_dbar_star(geom, t);
  CHECK(std::abs(zcrit::volume_integral(geom, div)) < 1e-10);
  CHECK(zcrit::max_abs(div) > 1e-2);  // nontrivial field
}

TEST_CASE("Hessian endomorphism pairs with endomorphisms through the adjoints") {
  for (bool four : {false, true}) {
    TorusGeometry geom = four ? curved_t4() : curved_t2();
    Field h = real_probe(geom.grid);
    MatrixField endo = random_endo(geom.grid);

    Cx lhs = zcrit::volume_integral(
        geom, zcrit::endo_trace_product(geom.grid, endo,
                                        zcrit::endo_from_hessian(geom, h)));
    Field weak = zcrit::adjoint_d_star_dbar_star(geom, zcrit::flat_map(geom, endo));
    Cx rhs = zcrit::volume_integral(geom, zcrit::scale(zcrit::multiply(h, weak), Cx(0.0, 1.0)));
    CHECK(std::abs(lhs - rhs) < 1e-9);
    CHECK(std::abs(lhs) > 1e-4);  // pairing is nontrivial
  }
}

TEST_CASE("trace of the Hessian endomorphism reduces to the Laplacian") {
  // Exact on the flat metric; on curved metrics the divergence identity
  // behind the reduction holds only in the continuum.
  TorusGeometry geom = flat(1, 32);
  Field h = real_probe(geom.grid);
  const int n = geom.grid.n;
  MatrixField endo = zcrit::endo_from_hessian(geom, h);
  Field tr = geom.grid.zero_field();
  for (int a = 0; a < n; ++a) {
    tr = zcrit::add(tr, endo[static_cast<std::size_t>(a) * n + a]);
  }
  Field lhs = zcrit::scale(tr, Cx(0.0, 1.0));  // tr(i H_h)
  Field rhs = zcrit::scale(zcrit::laplacian(geom, h), Cx(-0.5, 0.0));
  CHECK(zcrit::max_abs(zcrit::subtract(lhs, rhs)) < 1e-11);
}

TEST_CASE("torus translations admit no Hamiltonian potential") {
  TorusGeometry geom = curved_t2();
  CHECK_THROWS_AS(zcrit::hamiltonian_for_field(geom, "translation-x"),
                  zcrit::NoHamiltonianAction);
}

}  // TEST_SUITE
