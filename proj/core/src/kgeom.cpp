// Metric pipeline on torus grids. Products inside the metric, curvature and
// character-form chain are re-truncated to the 2/3 band after each multiply;
// the Laplacian, weak-form adjoints and inner products keep raw pointwise
// products so that discrete integration-by-parts identities hold at roundoff
// (spectral derivatives pair wrapped modes to exactly cancelling multipliers).
#include "zcrit/kgeom.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <vector>

#include "zcrit/errors.hpp"

namespace zcrit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Field divide(const Field& a, const Field& b) {
  Field r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] / b[i];
  return r;
}

// Dealiased product for the metric/curvature pipeline.
Field mul_band(const TorusGrid& grid, const Field& a, const Field& b) {
  return truncate_band(grid, multiply(a, b));
}

double factorial(int k) {
  double r = 1.0;
  for (int m = 2; m <= k; ++m) r *= m;
  return r;
}

}  // namespace

TorusGeometry metric_from_potential(const TorusGrid& grid, const Field& phi) {
  const int n = grid.n;
  TorusGeometry geom;
  geom.grid = grid;
  geom.potential = phi;
  geom.g.assign(static_cast<std::size_t>(n) * n, Field());

  // Hessian of the potential on top of the flat background delta/2;
  // Hermitize explicitly so determinants stay real.
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      Field h = dzbar(grid, dz(grid, phi, a), b);
      if (a == b) {
        for (auto& v : h) v = Cx(v.real() + 0.5, 0.0);
        geom.g[static_cast<std::size_t>(a) * n + a] = h;
      } else {
        geom.g[static_cast<std::size_t>(a) * n + b] = h;
        geom.g[static_cast<std::size_t>(b) * n + a] = conjugate(h);
      }
    }
  }

  // Determinant (with dealiased products) and positivity gate via leading
  // principal minors.
  if (n == 1) {
    geom.det_g = geom.g[0];
  } else {
    Field main = mul_band(grid, geom.metric(0, 0), geom.metric(1, 1));
    Field off = mul_band(grid, geom.metric(0, 1), geom.metric(1, 0));
    geom.det_g = subtract(main, off);
  }

  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    bool ok = geom.g[0][i].real() > 0.0 && geom.det_g[i].real() > 0.0;
    if (!ok) bad.push_back(i);
  }
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "metric from potential degenerates at " << bad.size()
        << " grid point(s); first offenders:";
    for (std::size_t k = 0; k < bad.size() && k < 3; ++k) {
      msg << " [";
      for (int axis = 0; axis < grid.axes(); ++axis) {
        msg << (axis ? "," : "") << grid.coordinate(bad[k], axis);
      }
      msg << "]";
    }
    throw NotPositive(msg.str());
  }

  geom.g_inv.assign(static_cast<std::size_t>(n) * n, Field());
  if (n == 1) {
    Field one(grid.size(), Cx(1.0, 0.0));
    geom.g_inv[0] = divide(one, geom.det_g);
  } else {
    geom.g_inv[0] = divide(geom.metric(1, 1), geom.det_g);
    geom.g_inv[3] = divide(geom.metric(0, 0), geom.det_g);
    geom.g_inv[1] = scale(divide(geom.metric(0, 1), geom.det_g), Cx(-1.0, 0.0));
    geom.g_inv[2] = scale(divide(geom.metric(1, 0), geom.det_g), Cx(-1.0, 0.0));
  }

  geom.density = scale(geom.det_g, Cx(std::pow(2.0, n), 0.0));
  geom.log_det.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    geom.log_det[i] = Cx(std::log(geom.det_g[i].real()), 0.0);
  }
  return geom;
}

TensorField kahler_form(const TorusGeometry& geom) {
  TensorField w(geom.grid);
  const int n = geom.grid.n;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      w.add_component(1u << a, 1u << b, scale(geom.metric(a, b), Cx(0.0, 1.0)));
    }
  }
  return w;
}

TensorField kahler_power(const TorusGeometry& geom, int power) {
  if (power < 0) throw DegreeMismatch("kahler_power: negative exponent");
  if (power == 0) {
    return function_form(geom.grid, geom.grid.constant_field(Cx(1.0, 0.0)));
  }
  TensorField w = kahler_form(geom);
  TensorField acc = w;
  for (int m = 2; m <= power; ++m) acc = wedge(acc, w, true);
  return acc;
}

EndForm chern_connection(const TorusGeometry& geom) {
  const TorusGrid& grid = geom.grid;
  const int n = grid.n;
  EndForm theta(grid, n);
  for (int c = 0; c < n; ++c) {
    // d_c of every metric entry, then Theta_c[a][b] = sum_s ginv[s][a] d_c g[b][s].
    std::vector<Field> dg(static_cast<std::size_t>(n) * n);
    for (int r = 0; r < n; ++r) {
      for (int s = 0; s < n; ++s) {
        dg[static_cast<std::size_t>(r) * n + s] = dz(grid, geom.metric(r, s), c);
      }
    }
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        Field acc = grid.zero_field();
        for (int s = 0; s < n; ++s) {
          acc = add(acc, mul_band(grid, geom.inverse(s, a),
                                  dg[static_cast<std::size_t>(b) * n + s]));
        }
        theta.at(a, b).add_component(1u << c, 0u, acc);
      }
    }
  }
  return theta;
}

EndForm end_partial(const EndForm& a) {
  EndForm r(a.grid, a.rank);
  for (int i = 0; i < a.rank; ++i) {
    for (int j = 0; j < a.rank; ++j) r.at(i, j) = partial(a.at(i, j));
  }
  return r;
}

EndForm end_partial_bar(const EndForm& a) {
  EndForm r(a.grid, a.rank);
  for (int i = 0; i < a.rank; ++i) {
    for (int j = 0; j < a.rank; ++j) r.at(i, j) = partial_bar(a.at(i, j));
  }
  return r;
}

EndForm curvature_tensor(const TorusGeometry& geom) {
  return end_partial_bar(chern_connection(geom));
}

TensorField chern_weil_form(const TorusGeometry& geom, int k) {
  if (k < 0) throw DegreeMismatch("chern_weil_form: negative degree");
  const TorusGrid& grid = geom.grid;
  if (k == 0) {
    return function_form(grid, grid.constant_field(Cx(grid.n, 0.0)));
  }
  EndForm p = end_scale(curvature_tensor(geom), Cx(0.0, 1.0 / kTwoPi));
  EndForm pow = p;
  for (int m = 2; m <= k; ++m) pow = end_wedge(pow, p, true);
  return form_scale(end_trace(pow), Cx(1.0 / factorial(k), 0.0));
}

TensorField ricci_form(const TorusGeometry& geom) {
  return chern_weil_form(geom, 1);
}

TensorField ricci_form_from_log_det(const TorusGeometry& geom) {
  TensorField u = function_form(geom.grid, geom.log_det);
  return form_scale(partial(partial_bar(u)), Cx(0.0, -1.0 / kTwoPi));
}

Field lambda_contract(const TorusGeometry& geom, const TensorField& beta) {
  const TorusGrid& grid = geom.grid;
  const int n = grid.n;
  Field acc = grid.zero_field();
  for (int c = 0; c < n; ++c) {
    for (int d = 0; d < n; ++d) {
      Field comp = beta.component(1u << c, 1u << d);
      if (comp.empty()) continue;
      acc = add(acc, mul_band(grid, comp, geom.inverse(d, c)));
    }
  }
  return scale(acc, Cx(0.0, -1.0));
}

Field scalar_curvature(const TorusGeometry& geom) {
  Field s = lambda_contract(geom, ricci_form(geom));
  for (auto& v : s) v = Cx(v.real(), 0.0);
  return s;
}

Field laplacian(const TorusGeometry& geom, const Field& f) {
  const TorusGrid& grid = geom.grid;
  const int n = grid.n;
  // Holomorphic half: (1/rho) sum_d dbar_d(rho sum_c ginv[d][c] d_c f), then
  // add the conjugate half so real functions get the full real Laplacian.
  auto half = [&](const Field& u) {
    std::vector<Field> du(n);
    for (int c = 0; c < n; ++c) du[c] = dz(grid, u, c);
    Field acc = grid.zero_field();
    for (int d = 0; d < n; ++d) {
      Field s = grid.zero_field();
      for (int c = 0; c < n; ++c) {
        s = add(s, multiply(geom.inverse(d, c), du[c]));
      }
      acc = add(acc, dzbar(grid, multiply(geom.density, s), d));
    }
    return divide(acc, geom.density);
  };
  return add(half(f), conjugate(half(conjugate(f))));
}

MatrixField flat_map(const TorusGeometry& geom, const MatrixField& endo) {
  const TorusGrid& grid = geom.grid;
  const int n = grid.n;
  MatrixField t(static_cast<std::size_t>(n) * n);
  for (int b = 0; b < n; ++b) {
    for (int c = 0; c < n; ++c) {
      Field acc = grid.zero_field();
      for (int a = 0; a < n; ++a) {
        acc = add(acc, multiply(geom.metric(a, b),
                                endo[static_cast<std::size_t>(a) * n + c]));
      }
      t[static_cast<std::size_t>(b) * n + c] = acc;
    }
  }
  return t;
}

TensorField antisym_form(const TorusGeometry& geom, const MatrixField& flat) {
  const TorusGrid& grid = geom.grid;
  const int n = grid.n;
  TensorField r(grid);
  for (int c = 0; c < n; ++c) {
    for (int d = 0; d < n; ++d) {
      r.add_component(1u << c, 1u << d,
                      scale(flat[static_cast<std::size_t>(d) * n + c],
                            Cx(-1.0, 0.0)));
    }
  }
  return r;
}

std::vector<Field> dbar_star(const TorusGeometry& geom, const MatrixField& t) {
  const TorusGrid& grid = geom.grid;
  const int n = grid.n;
  // V[d][a] = sum_{b,c} ginv[b][d] T[b][c] ginv[a][c]; W^a = -(1/rho) sum_d
  // d_d(V[d][a] rho); result_g = sum_a G[g][a] W^a.
  std::vector<Field> w(n);
  for (int a = 0; a < n; ++a) {
    Field acc = grid.zero_field();
    for (int d = 0; d < n; ++d) {
      Field v = grid.zero_field();
      for (int b = 0; b < n; ++b) {
        for (int c = 0; c < n; ++c) {
          v = add(v, multiply(geom.inverse(b, d),
                              multiply(t[static_cast<std::size_t>(b) * n + c],
                                       geom.inverse(a, c))));
        }
      }
      acc = add(acc, dz(grid, multiply(v, geom.density), d));
    }
    w[a] = scale(divide(acc, geom.density), Cx(-1.0, 0.0));
  }
  std::vector<Field> x(n);
  for (int g = 0; g < n; ++g) {
    Field acc = grid.zero_field();
    for (int a = 0; a < n; ++a) {
      acc = add(acc, multiply(geom.metric(g, a), w[a]));
    }
    x[g] = acc;
  }
  return x;
}

Field d_star_one_form(const TorusGeometry& geom, const std::vector<Field>& v) {
  const TorusGrid& grid = geom.grid;
  const int n = grid.n;
  Field acc = grid.zero_field();
  for (int d = 0; d < n; ++d) {
    Field s = grid.zero_field();
    for (int c = 0; c < n; ++c) {
      // M[c][d] = conj(ginv[c][d]) = ginv[d][c] for the Hermitian metric.
      s = add(s, multiply(geom.inverse(d, c), v[c]));
    }
    acc = add(acc, dzbar(grid, multiply(geom.density, s), d));
  }
  return scale(divide(acc, geom.density), Cx(-1.0, 0.0));
}

Field adjoint_d_star_dbar_star(const TorusGeometry& geom, const MatrixField& t) {
  return d_star_one_form(geom, dbar_star(geom, t));
}

Cx one_form_inner(const TorusGeometry& geom, const std::vector<Field>& v,
                  const std::vector<Field>& u) {
  const TorusGrid& grid = geom.grid;
  const int n = grid.n;
  Field acc = grid.zero_field();
  for (int c = 0; c < n; ++c) {
    for (int a = 0; a < n; ++a) {
      acc = add(acc, multiply(multiply(v[c], conjugate(u[a])),
                              geom.inverse(a, c)));
    }
  }
  return volume_integral(geom, acc);
}

Cx flat_tensor_inner(const TorusGeometry& geom, const MatrixField& s,
                     const MatrixField& t) {
  const TorusGrid& grid = geom.grid;
  const int n = grid.n;
  Field acc = grid.zero_field();
  for (int b = 0; b < n; ++b) {
    for (int c = 0; c < n; ++c) {
      for (int d = 0; d < n; ++d) {
        for (int a = 0; a < n; ++a) {
          Field term = multiply(s[static_cast<std::size_t>(b) * n + c],
                                conjugate(t[static_cast<std::size_t>(d) * n + a]));
          term = multiply(term, geom.inverse(b, d));
          term = multiply(term, geom.inverse(a, c));
          acc = add(acc, term);
        }
      }
    }
  }
  return volume_integral(geom, acc);
}

MatrixField dbar_one_form(const TorusGeometry& geom, const std::vector<Field>& u) {
  const TorusGrid& grid = geom.grid;
  const int n = grid.n;
  MatrixField t(static_cast<std::size_t>(n) * n);
  for (int d = 0; d < n; ++d) {
    for (int c = 0; c < n; ++c) {
      t[static_cast<std::size_t>(d) * n + c] = dzbar(grid, u[c], d);
    }
  }
  return t;
}

MatrixField endo_from_hessian(const TorusGeometry& geom, const Field& h) {
  const TorusGrid& grid = geom.grid;
  const int n = grid.n;
  std::vector<Field> dh(n);
  for (int a = 0; a < n; ++a) dh[a] = dz(grid, h, a);
  MatrixField endo(static_cast<std::size_t>(n) * n);
  for (int g = 0; g < n; ++g) {
    for (int a = 0; a < n; ++a) {
      Field acc = grid.zero_field();
      for (int d = 0; d < n; ++d) {
        acc = add(acc, multiply(geom.inverse(d, g), dzbar(grid, dh[a], d)));
      }
      endo[static_cast<std::size_t>(g) * n + a] = scale(acc, Cx(0.0, 1.0));
    }
  }
  return endo;
}

Field endo_trace_product(const TorusGrid& grid, const MatrixField& a,
                         const MatrixField& b) {
  const int n = grid.n;
  Field acc = grid.zero_field();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      acc = add(acc, multiply(a[static_cast<std::size_t>(i) * n + j],
                              b[static_cast<std::size_t>(j) * n + i]));
    }
  }
  return acc;
}

Cx volume_integral(const TorusGeometry& geom, const Field& f) {
  return factorial(geom.grid.n) * mean(multiply(f, geom.density));
}

void hamiltonian_for_field(const TorusGeometry&, const std::string& generator) {
  throw NoHamiltonianAction(
      "torus translations are not Hamiltonian: the contraction of '" +
      generator + "' with the Kahler form has a harmonic part, so no global "
      "potential exists");
}

}  // namespace zcrit
