// Sphere-side moment map checks. All reductions live on the invariant
// profile slice, where d and iota_v act on (volume part, hamiltonian) pairs
// through the Lobatto differentiation matrix; norms are taken pointwise (sup)
// and against the sphere measure (root mean square).
#include "zcrit/moment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "zcrit/charge.hpp"
#include "zcrit/errors.hpp"
#include "zcrit/zkahler.hpp"

namespace zcrit {

namespace {

void require_rotation(const std::string& generator) {
  if (generator != "rotation")
    throw NoHamiltonianAction("no hamiltonian data for generator '" +
                              generator + "' on the sphere backend");
}

void require_size(const ProfileGrid& grid, const RealProfile& f,
                  const char* what) {
  if (f.size() != grid.count())
    throw ConfigError(std::string(what) + " has " + std::to_string(f.size()) +
                      " samples, expected " + std::to_string(grid.count()));
}

// Root mean square against the sphere measure 2 pi dx.
double measure_rms(const SphereGeometry& geom, const RealProfile& f) {
  RealProfile sq(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) sq[i] = f[i] * f[i];
  return std::sqrt(std::max(0.0, sphere_integral(geom, sq)) /
                   sphere_area(geom));
}

}  // namespace

VerificationReport make_report(std::string identity, std::string statement,
                               double sup_norm, double l2_norm,
                               double tolerance,
                               std::map<std::string, double> metadata) {
  VerificationReport report;
  report.identity = std::move(identity);
  report.statement = std::move(statement);
  report.sup_norm = sup_norm;
  report.l2_norm = l2_norm;
  report.tolerance = tolerance;
  report.metadata = std::move(metadata);
  report.pass = sup_norm <= tolerance && l2_norm <= tolerance;
  return report;
}

EquivariantSample equivariant_kahler_sample(const SphereGeometry& geom) {
  EquivariantSample sample;
  sample.volume_part.assign(geom.grid.count(), 1.0);
  sample.hamiltonian = hamiltonian_for_field(geom, "rotation").hamiltonian;
  sample.generator = "rotation";
  return sample;
}

EquivariantSample equivariant_wedge(const ProfileGrid& grid,
                                    const EquivariantSample& a,
                                    const EquivariantSample& b) {
  if (a.generator != b.generator)
    throw ConfigError("equivariant wedge of samples with generators '" +
                      a.generator + "' and '" + b.generator + "'");
  require_size(grid, a.volume_part, "first sample volume part");
  require_size(grid, b.volume_part, "second sample volume part");
  require_size(grid, a.hamiltonian, "first sample hamiltonian");
  require_size(grid, b.hamiltonian, "second sample hamiltonian");
  EquivariantSample out;
  out.generator = a.generator;
  out.volume_part.resize(grid.count());
  out.hamiltonian.resize(grid.count());
  for (std::size_t i = 0; i < grid.count(); ++i) {
    out.volume_part[i] =
        a.hamiltonian[i] * b.volume_part[i] + a.volume_part[i] * b.hamiltonian[i];
    out.hamiltonian[i] = a.hamiltonian[i] * b.hamiltonian[i];
  }
  return out;
}

VerificationReport check_equivariant_closed(const SphereGeometry& geom,
                                            const EquivariantSample& sample,
                                            double tolerance) {
  require_rotation(sample.generator);
  require_size(geom.grid, sample.volume_part, "sample volume part");
  require_size(geom.grid, sample.hamiltonian, "sample hamiltonian");

  const RealProfile dh = profile_derivative(geom.grid, sample.hamiltonian);
  RealProfile defect(geom.grid.count());
  for (std::size_t i = 0; i < defect.size(); ++i)
    defect[i] = dh[i] - sample.volume_part[i];

  return make_report(
      "equivariant-closed",
      "d(alpha(v)) + iota_v(alpha(v)) = 0 for the rotation-invariant "
      "(2-form, hamiltonian) pair; the defect is the dx coefficient h' - u",
      profile_max_abs(defect), measure_rms(geom, defect), tolerance,
      {{"nodes", static_cast<double>(geom.grid.count())}});
}

VerificationReport check_curvature_moment_map(const SphereGeometry& geom,
                                              const HamiltonianAction& action,
                                              double tolerance) {
  require_rotation(action.generator);
  require_size(geom.grid, action.hamiltonian, "action hamiltonian");

  const ComplexProfile lhs = rotation_curvature_contraction(geom);
  const ComplexProfile rhs =
      hessian_endo_derivative(geom, action.hamiltonian);
  RealProfile defect(geom.grid.count());
  for (std::size_t i = 0; i < defect.size(); ++i)
    defect[i] = std::abs(lhs[i] - rhs[i]);

  return make_report(
      "curvature-moment-map",
      "iota_v R + D_End(g^{-1} i dbar d h) = 0 for the rotation field, "
      "compared through the contraction route and the Hessian route",
      profile_max_abs(defect), measure_rms(geom, defect), tolerance,
      {{"nodes", static_cast<double>(geom.grid.count())},
       {"closure_defect", action.closure_defect}});
}

std::vector<double> futaki_values(const std::vector<SphereGeometry>& family,
                                  const HamiltonianAction& action,
                                  bool drop_average) {
  require_rotation(action.generator);
  const double average =
      drop_average ? 0.0 : average_scalar(topology_sphere_geometric());
  std::vector<double> values;
  values.reserve(family.size());
  for (const SphereGeometry& geom : family) {
    require_size(geom.grid, action.hamiltonian, "action hamiltonian");
    RealProfile integrand(geom.grid.count());
    for (std::size_t i = 0; i < integrand.size(); ++i)
      integrand[i] = action.hamiltonian[i] * (average - geom.scalar[i]);
    values.push_back(sphere_integral(geom, integrand));
  }
  return values;
}

VerificationReport check_futaki_constancy(
    const std::vector<SphereGeometry>& family, const HamiltonianAction& action,
    double tolerance) {
  if (family.empty()) throw ConfigError("futaki constancy needs a family");
  const std::vector<double> values = futaki_values(family, action);

  double sup = 0.0, sum_sq = 0.0;
  double lo = values.front(), hi = values.front();
  for (double v : values) {
    sup = std::max(sup, std::abs(v));
    sum_sq += v * v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return make_report(
      "futaki-constancy",
      "the pairing of the rotation hamiltonian with (S^ - S) vanishes and is "
      "constant across the metric family",
      sup, std::sqrt(sum_sq / static_cast<double>(values.size())), tolerance,
      {{"members", static_cast<double>(family.size())},
       {"nodes", static_cast<double>(family.front().grid.count())},
       {"spread", hi - lo}});
}

SphereGeometry seeded_sphere(const ProfileGrid& grid, std::uint64_t seed) {
  Rng rng(seed);
  // Polynomial profile v(x) = sum c_k x^k with decaying coefficients keeps
  // the metric denominator 1 + (1-x^2) v'' well inside the admissible range.
  double coeff[5];
  for (double& c : coeff) c = 0.05 * rng.uniform(-1.0, 1.0);
  RealProfile v(grid.count());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = grid.x[i];
    double xk = x * x;
    double acc = 0.0;
    for (int k = 0; k < 5; ++k) {
      acc += coeff[k] * xk / static_cast<double>((k + 2) * (k + 1));
      xk *= x;
    }
    v[i] = acc;
  }
  return sphere_from_profile(grid, v);
}

namespace {

void require_same_model(const std::shared_ptr<const BundleModel>& model,
                        const ConnectionState& conn) {
  if (!model || conn.model.get() != model.get())
    throw ConfigError("connection does not belong to the given bundle model");
}

double end_l2(const TorusGrid& grid, const EndForm& a) {
  double acc = 0.0;
  for (const TensorField& entry : a.entries)
    for (const auto& [key, field] : entry.comps) {
      (void)key;
      double s = 0.0;
      for (const Cx& v : field) s += std::norm(v);
      acc += s / static_cast<double>(grid.size());
    }
  return std::sqrt(acc);
}

// Convergence order from the gaps to the extrapolated limit, in the same
// units as the tolerance. Gaps far below the gate (exactly linear curves,
// where central differences are already exact) count as fully converged.
double observed_order(double coarse_gap, double fine_gap, double tolerance) {
  if (fine_gap <= 0.01 * tolerance) return 8.0;
  return std::log2(std::max(coarse_gap / fine_gap, 1.0));
}

}  // namespace

VerificationReport check_bundle_moment_map(
    std::shared_ptr<const BundleModel> model, const ConnectionState& conn,
    const MatrixField& e, const EndForm& tangent,
    const CentralChargeSpec& spec, BundleMomentOptions options) {
  require_same_model(model, conn);
  if (!(options.step > 0.0))
    throw ConfigError("finite-difference step must be positive");

  const EndForm v_e = infinitesimal_gauge(e, conn);
  const double pairing = omega_Z_pairing(conn, v_e, tangent, spec);
  const double expected = -pairing;

  auto value_at = [&](double t) {
    const ConnectionState moved = make_connection(
        model,
        end_add(conn.perturbation, end_scale(tangent, Cx(t, 0.0))));
    return moment_pairing(moved, e, spec);
  };
  auto central = [&](double t) {
    return (value_at(t) - value_at(-t)) / (2.0 * t);
  };
  const double coarse = central(options.step);
  const double fine = central(options.step / 2.0);
  const double derivative = (4.0 * fine - coarse) / 3.0;

  const double denom = std::max(std::abs(expected), 1e-12);
  const double rel = std::abs(derivative - expected) / denom;
  const double order = observed_order(std::abs(coarse - derivative) / denom,
                                      std::abs(fine - derivative) / denom,
                                      options.tolerance);

  VerificationReport report = make_report(
      "bundle-moment-derivative",
      "d/dt at t = 0 of the moment pairing <nu(A + t a), e> equals "
      "-Omega_Z(v_e, a) with v_e the gauge tangent of the generator",
      rel, rel, options.tolerance,
      {{"step_coarse", options.step},
       {"step_fine", options.step / 2.0},
       {"fd_derivative", derivative},
       {"pairing_value", pairing},
       {"observed_order", order}});
  report.pass = report.pass && order >= 1.5;
  return report;
}

VerificationReport check_equivariant_chern_weil_bundle(
    std::shared_ptr<const BundleModel> model, const ConnectionState& conn,
    const MatrixField& e, double tolerance, double step) {
  require_same_model(model, conn);
  if (!(step > 0.0))
    throw ConfigError("finite-difference step must be positive");
  const TorusGrid& grid = model->geometry.grid;
  const int rank = model->rank;
  if (e.size() != static_cast<std::size_t>(rank) * rank)
    throw ConfigError("algebra element has wrong shape");

  // Covariant-derivative side: -D_End(<mu, e>) with <mu, e> = -e.
  const EndForm direct = infinitesimal_gauge(e, conn);

  // Orbit side: derivative of the connection along exp(t e).
  auto orbit = [&](double t) {
    MatrixField te(e.size());
    for (std::size_t k = 0; k < e.size(); ++k) te[k] = scale(e[k], Cx(t, 0.0));
    return gauge_act(gauge_from_algebra(grid, rank, te), conn).perturbation;
  };
  auto central = [&](double t) {
    return end_scale(end_subtract(orbit(t), orbit(-t)),
                     Cx(1.0 / (2.0 * t), 0.0));
  };
  const EndForm coarse = central(step);
  const EndForm fine = central(step / 2.0);
  const EndForm lhs = end_scale(
      end_subtract(end_scale(fine, Cx(4.0, 0.0)), coarse), Cx(1.0 / 3.0, 0.0));

  const EndForm defect = end_subtract(lhs, direct);
  const double order =
      observed_order(end_max_abs(end_subtract(coarse, lhs)),
                     end_max_abs(end_subtract(fine, lhs)), tolerance);

  VerificationReport report = make_report(
      "bundle-equivariant-contraction",
      "the orbit derivative of the connection under exp(t e) equals "
      "d e + [a, e], i.e. minus the covariant derivative of the pointwise "
      "moment value -e",
      end_max_abs(defect), end_l2(grid, defect), tolerance,
      {{"step_coarse", step},
       {"step_fine", step / 2.0},
       {"side_sup", end_max_abs(direct)},
       {"observed_order", order}});
  report.pass = report.pass && order >= 1.5;
  return report;
}

}  // namespace zcrit
