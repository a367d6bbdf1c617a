// Connections, curvature, charge densities, residuals, pairings, gauge
// action, and the line-bundle flow. Matrix fields are rank x rank row-major
// grids; endomorphism-valued forms reuse the EndForm container. Products are
// never band-truncated here: the adjointness identities behind the pairing
// and moment checks then hold to roundoff, and curvature stays exactly
// skew-Hermitian.
#include "zcrit/bundle.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>

#include "zcrit/errors.hpp"

namespace zcrit {

namespace {

constexpr double kPi = std::numbers::pi;

Field divide_fields(const Field& a, const Field& b) {
  Field out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] / b[i];
  return out;
}

int popcount(unsigned v) {
  int c = 0;
  for (; v; v >>= 1) c += static_cast<int>(v & 1u);
  return c;
}

EndForm end_exterior_d(const EndForm& a) {
  return end_add(end_partial(a), end_partial_bar(a));
}

// --- pointwise matrix-field helpers (rank <= 2) ---

MatrixField mat_inverse(int r, const MatrixField& a) {
  if (r == 1) {
    MatrixField out(1);
    Field inv(a[0].size());
    for (std::size_t p = 0; p < inv.size(); ++p) inv[p] = Cx(1.0, 0.0) / a[0][p];
    out[0] = std::move(inv);
    return out;
  }
  MatrixField out(4, Field(a[0].size()));
  for (std::size_t p = 0; p < a[0].size(); ++p) {
    const Cx det = a[0][p] * a[3][p] - a[1][p] * a[2][p];
    out[0][p] = a[3][p] / det;
    out[1][p] = -a[1][p] / det;
    out[2][p] = -a[2][p] / det;
    out[3][p] = a[0][p] / det;
  }
  return out;
}

double mat_skew_defect(int r, const MatrixField& e) {
  double worst = 0.0;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      const Field& x = e[static_cast<std::size_t>(i) * r + j];
      const Field& y = e[static_cast<std::size_t>(j) * r + i];
      for (std::size_t p = 0; p < x.size(); ++p)
        worst = std::max(worst, std::abs(x[p] + std::conj(y[p])));
    }
  return worst;
}

// Left/right multiplication of an endomorphism-valued form by a matrix of
// scalar fields (0-form coefficients commute with the form part).
EndForm end_mul_left(int r, const MatrixField& m, const EndForm& a) {
  EndForm out(a.grid, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k)
        out.at(i, j) = form_add(
            out.at(i, j),
            form_scale_field(a.at(k, j), m[static_cast<std::size_t>(i) * r + k],
                             false));
  return out;
}

EndForm end_mul_right(int r, const EndForm& a, const MatrixField& m) {
  EndForm out(a.grid, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k)
        out.at(i, j) = form_add(
            out.at(i, j),
            form_scale_field(a.at(i, k), m[static_cast<std::size_t>(k) * r + j],
                             false));
  return out;
}

void check_bundle_spec(const BundleModel& model,
                       const CentralChargeSpec& spec) {
  if (spec.kind != ChargeKind::Bundle)
    throw DegreeMismatch("manifold charge passed to the bundle operator");
  if (spec.dimension != model.geometry.grid.n)
    throw DegreeMismatch(
        "charge of dimension " + std::to_string(spec.dimension) +
        " does not match complex dimension " +
        std::to_string(model.geometry.grid.n));
}

void check_tangent_shape(const BundleModel& model, const EndForm& a,
                         const char* what) {
  if (a.rank != model.rank)
    throw ConfigError(std::string(what) + " has rank " +
                      std::to_string(a.rank) + ", bundle has rank " +
                      std::to_string(model.rank));
  for (const TensorField& entry : a.entries)
    for (const auto& [key, field] : entry.comps) {
      if (popcount(key.first) + popcount(key.second) != 1)
        throw ConfigError(std::string(what) +
                          " must be a pure 1-form field");
      if (field.size() != model.geometry.grid.size())
        throw ConfigError(std::string(what) + " lives on the wrong grid");
    }
}

// Flat reference power omega_0^d of the model grid.
TensorField flat_power(const TorusGrid& grid, int power) {
  const TorusGeometry flat = metric_from_potential(grid, grid.zero_field());
  return kahler_power(flat, power);
}

// e^{-i phase} C, then the Hermitian component (B - B^dagger) / (2i).
MatrixField rotated_hermitian(int r, Cx rot, const MatrixField& c) {
  MatrixField out(static_cast<std::size_t>(r) * r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      const Field& bij = c[static_cast<std::size_t>(i) * r + j];
      const Field& bji = c[static_cast<std::size_t>(j) * r + i];
      Field entry(bij.size());
      for (std::size_t p = 0; p < entry.size(); ++p)
        entry[p] =
            (rot * bij[p] - std::conj(rot * bji[p])) / Cx(0.0, 2.0);
      out[static_cast<std::size_t>(i) * r + j] = std::move(entry);
    }
  return out;
}

// omega^n coefficient of an (n,n) endomorphism form, as a matrix field.
MatrixField density_top_ratio(const TorusGeometry& geom, const EndForm& zt) {
  const Field vol = top_coefficient(kahler_power(geom, geom.grid.n));
  MatrixField out;
  out.reserve(zt.entries.size());
  for (int i = 0; i < zt.rank; ++i)
    for (int j = 0; j < zt.rank; ++j)
      out.push_back(divide_fields(top_coefficient(zt.at(i, j)), vol));
  return out;
}

double bundle_phase(const BundleModel& model, const CentralChargeSpec& spec) {
  try {
    return phase(evaluate_charge(spec, model.topology));
  } catch (const ZeroCharge&) {
    throw PhaseCollapse(
        "the bundle central charge vanishes; no phase is defined");
  }
}

}  // namespace

std::shared_ptr<const BundleModel> make_bundle_model(TorusGeometry geometry,
                                                     int rank,
                                                     long long degree) {
  if (rank < 1 || rank > 2)
    throw ConfigError("bundle rank " + std::to_string(rank) +
                      " unsupported (ranks 1 and 2)");
  const int n = geometry.grid.n;
  double factorial = 1.0;
  for (int m = 2; m <= n; ++m) factorial *= m;
  const double slope_density =
      static_cast<double>(degree) / (rank * factorial);

  auto model = std::make_shared<BundleModel>();
  model->rank = rank;
  model->degree = degree;
  model->topology = topology_torus_bundle(n, rank, degree);
  const TensorField flat_form =
      flat_power(geometry.grid, 1);
  model->reference_curvature = EndForm(geometry.grid, rank);
  for (int i = 0; i < rank; ++i)
    model->reference_curvature.at(i, i) =
        form_scale(flat_form, Cx(0.0, -2.0 * kPi * slope_density));
  model->geometry = std::move(geometry);
  return model;
}

ConnectionState make_connection(std::shared_ptr<const BundleModel> model,
                                EndForm perturbation) {
  if (!model) throw ConfigError("connection needs a bundle model");
  check_tangent_shape(*model, perturbation, "connection perturbation");
  const double scale_ref = 1.0 + end_max_abs(perturbation);
  const double defect = skew_defect(perturbation);
  if (defect > 1e-8 * scale_ref)
    throw ConfigError(
        "connection perturbation is not skew-Hermitian (defect " +
        std::to_string(defect) + ")");
  ConnectionState conn;
  conn.model = std::move(model);
  conn.perturbation = std::move(perturbation);
  return conn;
}

ConnectionState zero_connection(std::shared_ptr<const BundleModel> model) {
  if (!model) throw ConfigError("connection needs a bundle model");
  EndForm zero(model->geometry.grid, model->rank);
  return make_connection(std::move(model), std::move(zero));
}

EndForm potential_tangent(const BundleModel& model, const Field& s) {
  const TorusGrid& grid = model.geometry.grid;
  if (s.size() != grid.size())
    throw ConfigError("potential lives on the wrong grid");
  TensorField form(grid);
  for (int c = 0; c < grid.n; ++c) {
    form.add_component(1u << c, 0u, dz(grid, s, c));
    form.add_component(0u, 1u << c, scale(dzbar(grid, s, c), Cx(-1.0, 0.0)));
  }
  EndForm out(grid, model.rank);
  for (int i = 0; i < model.rank; ++i) out.at(i, i) = form;
  return out;
}

EndForm hermitian_adjoint(const EndForm& a) {
  EndForm out(a.grid, a.rank);
  for (int i = 0; i < a.rank; ++i)
    for (int j = 0; j < a.rank; ++j) out.at(i, j) = form_conjugate(a.at(j, i));
  return out;
}

double skew_defect(const EndForm& a) {
  return end_max_abs(end_add(a, hermitian_adjoint(a)));
}

EndForm curvature(const ConnectionState& conn) {
  const EndForm& a = conn.perturbation;
  return end_add(conn.model->reference_curvature,
                 end_add(end_exterior_d(a), end_wedge(a, a, false)));
}

EndForm z_tilde_bundle(const ConnectionState& conn,
                       const CentralChargeSpec& spec) {
  const BundleModel& model = *conn.model;
  check_bundle_spec(model, spec);
  const TorusGeometry& geom = model.geometry;
  const int r = model.rank;

  int max_k = 0;
  for (const BundleChargeTerm& term : spec.bundle_terms)
    max_k = std::max(max_k, term.chern_degree);
  std::vector<EndForm> psi_pow;
  psi_pow.push_back(end_identity(geom.grid, r));
  if (max_k > 0) {
    const EndForm psi =
        end_scale(curvature(conn), Cx(0.0, 1.0 / (2.0 * kPi)));
    for (int k = 1; k <= max_k; ++k)
      psi_pow.push_back(end_wedge(psi_pow.back(), psi, false));
  }

  EndForm out(geom.grid, r);
  for (const BundleChargeTerm& term : spec.bundle_terms) {
    const int d = term.theta_degree;
    if (d >= static_cast<int>(spec.theta_class.size())) continue;
    const GaussianRational theta = spec.theta_class[static_cast<std::size_t>(d)];
    double kfact = 1.0;
    for (int m = 2; m <= term.chern_degree; ++m) kfact *= m;
    const Cx coeff =
        term.coefficient.to_complex() * theta.to_complex() / kfact;

    TensorField base = kahler_power(geom, term.alpha_power);
    if (d > 0) base = wedge(base, flat_power(geom.grid, d), false);
    const EndForm& fpow = psi_pow[static_cast<std::size_t>(term.chern_degree)];
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        if (fpow.at(i, j).empty()) continue;
        out.at(i, j) = form_add(
            out.at(i, j),
            form_scale(wedge(base, fpow.at(i, j), false), coeff));
      }
  }
  return out;
}

Cx z_tilde_trace_integral(const ConnectionState& conn,
                          const CentralChargeSpec& spec) {
  const EndForm zt = z_tilde_bundle(conn, spec);
  Cx total(0.0, 0.0);
  for (int i = 0; i < zt.rank; ++i) total += form_integral(zt.at(i, i));
  return total;
}

MatrixField z_critical_residual(const ConnectionState& conn,
                                const CentralChargeSpec& spec) {
  const BundleModel& model = *conn.model;
  check_bundle_spec(model, spec);
  const double phi = bundle_phase(model, spec);
  const MatrixField c =
      density_top_ratio(model.geometry, z_tilde_bundle(conn, spec));
  return rotated_hermitian(model.rank, std::exp(Cx(0.0, -phi)), c);
}

MatrixField hym_residual(const ConnectionState& conn) {
  const BundleModel& model = *conn.model;
  const TorusGeometry& geom = model.geometry;
  const int r = model.rank;
  const double lambda = hym_slope(model.topology);
  const EndForm f = curvature(conn);
  MatrixField out(static_cast<std::size_t>(r) * r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      Field entry =
          scale(lambda_contract(geom, f.at(i, j)), Cx(0.0, 1.0 / (2.0 * kPi)));
      if (i == j)
        for (Cx& v : entry) v -= lambda;
      out[static_cast<std::size_t>(i) * r + j] = std::move(entry);
    }
  return out;
}

MatrixField dhym_residual(const ConnectionState& conn) {
  const BundleModel& model = *conn.model;
  const TorusGeometry& geom = model.geometry;
  const int n = geom.grid.n;
  const int r = model.rank;

  EndForm q(geom.grid, r);
  const TensorField omega = kahler_form(geom);
  for (int i = 0; i < r; ++i) q.at(i, i) = omega;
  q = end_subtract(q, end_scale(curvature(conn), Cx(1.0 / (2.0 * kPi), 0.0)));

  EndForm power = q;
  for (int m = 2; m <= n; ++m) power = end_wedge(power, q, false);

  const double psi =
      bundle_phase(model, builtin_charge("dhym", n)) + n * kPi / 2.0;
  return rotated_hermitian(r, std::exp(Cx(0.0, -psi)),
                           density_top_ratio(geom, power));
}

double omega_Z_pairing(const ConnectionState& conn, const EndForm& a,
                       const EndForm& b, const CentralChargeSpec& spec) {
  const BundleModel& model = *conn.model;
  check_bundle_spec(model, spec);
  check_tangent_shape(model, a, "first tangent");
  check_tangent_shape(model, b, "second tangent");
  const TorusGeometry& geom = model.geometry;
  const int r = model.rank;
  const double phi = bundle_phase(model, spec);

  int max_k = 0;
  for (const BundleChargeTerm& term : spec.bundle_terms)
    max_k = std::max(max_k, term.chern_degree);
  std::vector<EndForm> psi_pow;
  psi_pow.push_back(end_identity(geom.grid, r));
  if (max_k > 1) {
    const EndForm psi =
        end_scale(curvature(conn), Cx(0.0, 1.0 / (2.0 * kPi)));
    for (int k = 1; k + 1 <= max_k; ++k)
      psi_pow.push_back(end_wedge(psi_pow.back(), psi, false));
  }

  Cx total(0.0, 0.0);
  for (const BundleChargeTerm& term : spec.bundle_terms) {
    const int k = term.chern_degree;
    if (k < 1) continue;
    const int d = term.theta_degree;
    if (d >= static_cast<int>(spec.theta_class.size())) continue;
    const GaussianRational theta = spec.theta_class[static_cast<std::size_t>(d)];
    double kfact = 1.0;
    for (int m = 2; m <= k; ++m) kfact *= m;
    const Cx coeff =
        term.coefficient.to_complex() * theta.to_complex() / kfact;

    TensorField base = kahler_power(geom, term.alpha_power);
    if (d > 0) base = wedge(base, flat_power(geom.grid, d), false);

    Cx inner(0.0, 0.0);
    for (int p = 0; p + 1 <= k; ++p) {
      const int qdx = k - 1 - p;
      EndForm chain = end_wedge(a, psi_pow[static_cast<std::size_t>(p)], false);
      chain = end_wedge(chain, b, false);
      chain = end_wedge(chain, psi_pow[static_cast<std::size_t>(qdx)], false);
      inner += form_integral(wedge(base, end_trace(chain), false));
    }
    total += coeff * inner;
  }

  const Cx value =
      std::exp(Cx(0.0, -phi)) * Cx(0.0, 1.0 / (2.0 * kPi)) * total;
  return value.real() / (4.0 * kPi);
}

double omega_pairing_hym_path(const ConnectionState& conn, const EndForm& a,
                              const EndForm& b) {
  const BundleModel& model = *conn.model;
  check_tangent_shape(model, a, "first tangent");
  check_tangent_shape(model, b, "second tangent");
  const TorusGeometry& geom = model.geometry;
  const Cx integral = form_integral(
      wedge(end_trace(end_wedge(a, b, false)),
            kahler_power(geom, geom.grid.n - 1), false));
  return -integral.real() / (8.0 * kPi * kPi);
}

GaugeElement gauge_from_algebra(const TorusGrid& grid, int rank,
                                const MatrixField& e) {
  if (rank < 1 || rank > 2)
    throw ConfigError("gauge rank " + std::to_string(rank) + " unsupported");
  if (e.size() != static_cast<std::size_t>(rank) * rank)
    throw ConfigError("algebra element has wrong shape");
  for (const Field& f : e)
    if (f.size() != grid.size())
      throw ConfigError("algebra element lives on the wrong grid");
  const double defect = mat_skew_defect(rank, e);
  if (defect > 1e-10)
    throw ConfigError("algebra element is not skew-Hermitian (defect " +
                      std::to_string(defect) + ")");

  GaugeElement out;
  out.rank = rank;
  out.algebra = e;
  if (rank == 1) {
    Field f(grid.size());
    for (std::size_t p = 0; p < f.size(); ++p) f[p] = std::exp(e[0][p]);
    out.unitary = {std::move(f)};
    return out;
  }
  MatrixField u(4, Field(grid.size()));
  for (std::size_t p = 0; p < grid.size(); ++p) {
    // e = i h with h Hermitian; exp(i h) = e^{i c}(cos t Id + i sinc(t) b)
    // where c is the mean eigenvalue and b = h - c Id has eigenvalues -+ t.
    const Cx h00 = e[0][p] / Cx(0.0, 1.0);
    const Cx h01 = e[1][p] / Cx(0.0, 1.0);
    const Cx h10 = e[2][p] / Cx(0.0, 1.0);
    const Cx h11 = e[3][p] / Cx(0.0, 1.0);
    const double c = 0.5 * (h00.real() + h11.real());
    const Cx b00 = h00 - c, b11 = h11 - c;
    const double t =
        std::sqrt(std::max(0.0, b00.real() * b00.real() + std::norm(h01)));
    const double sinc = t < 1e-14 ? 1.0 : std::sin(t) / t;
    const Cx front = std::exp(Cx(0.0, c));
    const Cx isinc(0.0, sinc);
    u[0][p] = front * (std::cos(t) + isinc * b00);
    u[1][p] = front * (isinc * h01);
    u[2][p] = front * (isinc * h10);
    u[3][p] = front * (std::cos(t) + isinc * b11);
  }
  out.unitary = std::move(u);
  return out;
}

ConnectionState gauge_act(const GaugeElement& f, const ConnectionState& conn) {
  const BundleModel& model = *conn.model;
  const TorusGrid& grid = model.geometry.grid;
  const int r = model.rank;
  if (f.rank != r) throw ConfigError("gauge rank does not match the bundle");
  const MatrixField finv = mat_inverse(r, f.unitary);

  EndForm df(grid, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      df.at(i, j) = exterior_d(
          function_form(grid, f.unitary[static_cast<std::size_t>(i) * r + j]));

  const EndForm conjugated =
      end_mul_right(r, end_mul_left(r, finv, conn.perturbation), f.unitary);
  const EndForm maurer = end_mul_left(r, finv, df);
  return make_connection(conn.model, end_add(conjugated, maurer));
}

EndForm infinitesimal_gauge(const MatrixField& e, const ConnectionState& conn) {
  const BundleModel& model = *conn.model;
  const TorusGrid& grid = model.geometry.grid;
  const int r = model.rank;
  if (e.size() != static_cast<std::size_t>(r) * r)
    throw ConfigError("algebra element has wrong shape");

  EndForm de(grid, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      de.at(i, j) = exterior_d(
          function_form(grid, e[static_cast<std::size_t>(i) * r + j]));
  const EndForm ae = end_mul_right(r, conn.perturbation, e);
  const EndForm ea = end_mul_left(r, e, conn.perturbation);
  return end_add(de, end_subtract(ae, ea));
}

double moment_pairing(const ConnectionState& conn, const MatrixField& e,
                      const CentralChargeSpec& spec) {
  const BundleModel& model = *conn.model;
  const int r = model.rank;
  if (e.size() != static_cast<std::size_t>(r) * r)
    throw ConfigError("algebra element has wrong shape");
  const MatrixField residual = z_critical_residual(conn, spec);
  Field trace = model.geometry.grid.zero_field();
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < r; ++k)
      trace = add(trace, multiply(e[static_cast<std::size_t>(i) * r + k],
                                  residual[static_cast<std::size_t>(k) * r + i]));
  const Cx integral = volume_integral(model.geometry, trace);
  return (Cx(0.0, 1.0 / (4.0 * kPi)) * integral).real();
}

SolveResult solve_dhym_line_bundle(std::shared_ptr<const BundleModel> model,
                                   const Field& initial_potential,
                                   const FlowControls& controls) {
  if (!model) throw ConfigError("solver needs a bundle model");
  if (model->rank != 1)
    throw ConfigError("the dissipative flow is limited to line bundles");
  const TorusGeometry& geom = model->geometry;
  const TorusGrid& grid = geom.grid;
  if (initial_potential.size() != grid.size())
    throw ConfigError("initial potential lives on the wrong grid");
  const int n = grid.n;
  const CentralChargeSpec spec = builtin_charge("dhym", n);
  const double phi = bundle_phase(*model, spec);
  const Cx rot = std::exp(Cx(0.0, -phi));
  const Cx z = evaluate_charge(spec, model->topology).to_complex();

  // Keep the potential real and mean-free; neither part changes the tangent.
  Field s(grid.size());
  for (std::size_t p = 0; p < s.size(); ++p)
    s[p] = Cx(initial_potential[p].real(), 0.0);
  const Cx mean0 = mean(s);
  for (Cx& v : s) v -= mean0.real();

  // Linearization: residual ~ -(cos psi / 2 pi) Laplacian s + lower order;
  // the resolvent coefficient over-damps slightly, which only trades a
  // little convergence rate for unconditional stability.
  const double damping = 0.25;

  SolveResult result;
  result.converged = false;
  for (int iter = 0; iter <= controls.max_iterations; ++iter) {
    const ConnectionState conn =
        make_connection(model, potential_tangent(*model, s));
    const EndForm zt = z_tilde_bundle(conn, spec);
    const MatrixField residual =
        rotated_hermitian(1, rot, density_top_ratio(geom, zt));
    const double sup = max_abs(residual[0]);
    const double drift = std::abs(form_integral(zt.at(0, 0)) - z);
    result.trace.push_back({iter, sup, drift});

    if (sup < controls.target) {
      result.state = conn;
      result.potential = s;
      result.converged = true;
      return result;
    }
    if (iter == controls.max_iterations) {
      result.state = conn;
      result.potential = s;
      break;
    }

    Field update = laplace_resolvent(
        grid, residual[0], controls.step * damping);
    s = subtract(s, scale(update, Cx(controls.step, 0.0)));
    const Cx drift_mean = mean(s);
    for (Cx& v : s) v = Cx(v.real() - drift_mean.real(), 0.0);
  }

  if (controls.throw_on_max_iterations)
    throw NonConvergence(
        "dhym flow stalled above target " + std::to_string(controls.target) +
        " after " + std::to_string(controls.max_iterations) +
        " iterations (final residual " +
        std::to_string(result.trace.back().residual_sup) + ")");
  return result;
}

}  // namespace zcrit
