// Suite planning and execution. A plan is a deterministic list of (id, body)
// tasks derived from the configuration; bodies run on a small thread pool and
// deposit reports into plan-ordered slots, so scheduling never changes the
// output bytes. All randomness flows through derive_seed(run seed, check id,
// sample), which keeps streams stable across suite composition changes.
#include "zcrit/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "zcrit/charge.hpp"
#include "zcrit/family.hpp"
#include "zcrit/kgeom.hpp"
#include "zcrit/moment.hpp"
#include "zcrit/rng.hpp"
#include "zcrit/zkahler.hpp"

namespace zcrit {

namespace {

constexpr double kPi = std::numbers::pi;

using njson = nlohmann::ordered_json;

struct CheckTask {
  std::string id;
  std::function<VerificationReport()> body;
};

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Worst member carries the metadata; norms and pass aggregate over all.
VerificationReport merge_seeded(std::vector<VerificationReport> parts) {
  std::size_t worst = 0;
  for (std::size_t i = 1; i < parts.size(); ++i)
    if (parts[i].sup_norm > parts[worst].sup_norm) worst = i;
  VerificationReport out = parts[worst];
  for (const auto& p : parts) {
    out.sup_norm = std::max(out.sup_norm, p.sup_norm);
    out.l2_norm = std::max(out.l2_norm, p.l2_norm);
    out.pass = out.pass && p.pass;
  }
  out.metadata["seeds"] = static_cast<double>(parts.size());
  return out;
}

double matrix_sup(const MatrixField& m) {
  double sup = 0.0;
  for (const auto& entry : m) sup = std::max(sup, max_abs(entry));
  return sup;
}

TorusGeometry build_torus(const GeometrySection& section, std::uint64_t seed) {
  TorusGrid grid(section.dimension, section.grid);
  if (section.amplitude == 0.0)
    return metric_from_potential(grid, grid.zero_field());
  return metric_from_potential(
      grid, seeded_torus_potential(grid, seed, section.amplitude));
}

// Seeded random complex combination of the coordinate differentials dz^c,
// band-limited like the potential stream.
TensorField seeded_holo_one_form(const TorusGrid& grid, Rng& rng, double amp) {
  TensorField w(grid);
  for (int c = 0; c < grid.n; ++c) {
    Field re = seeded_torus_potential(grid, rng.next_u64(), amp);
    Field im = seeded_torus_potential(grid, rng.next_u64(), amp);
    w.add_component(1u << c, 0u, add(re, scale(im, Cx(0.0, 1.0))));
  }
  return w;
}

// Seeded skew-Hermitian-valued 1-form tangent at a connection.
EndForm seeded_skew_tangent(const BundleModel& model, Rng& rng, double amp) {
  const TorusGrid& grid = model.geometry.grid;
  EndForm a(grid, model.rank);
  for (int i = 0; i < model.rank; ++i) {
    TensorField w = seeded_holo_one_form(grid, rng, amp);
    a.at(i, i) = form_subtract(w, form_conjugate(w));
    for (int j = i + 1; j < model.rank; ++j) {
      TensorField u = seeded_holo_one_form(grid, rng, amp);
      TensorField v = seeded_holo_one_form(grid, rng, amp);
      TensorField off = form_add(u, form_conjugate(v));
      a.at(i, j) = off;
      a.at(j, i) = form_scale(form_conjugate(off), Cx(-1.0, 0.0));
    }
  }
  return a;
}

// Seeded skew-Hermitian matrix field (a gauge-algebra generator).
MatrixField seeded_skew_matrix(const TorusGrid& grid, Rng& rng, int rank,
                               double amp) {
  MatrixField e(static_cast<std::size_t>(rank) * rank, grid.zero_field());
  for (int i = 0; i < rank; ++i) {
    e[static_cast<std::size_t>(i) * rank + i] =
        scale(seeded_torus_potential(grid, rng.next_u64(), amp), Cx(0.0, 1.0));
    for (int j = i + 1; j < rank; ++j) {
      Field re = seeded_torus_potential(grid, rng.next_u64(), amp);
      Field im = seeded_torus_potential(grid, rng.next_u64(), amp);
      Field g = add(re, scale(im, Cx(0.0, 1.0)));
      e[static_cast<std::size_t>(i) * rank + j] = g;
      e[static_cast<std::size_t>(j) * rank + i] =
          scale(conjugate(g), Cx(-1.0, 0.0));
    }
  }
  return e;
}

ProductFamily seeded_product_family(const FamilySection& section,
                                    std::uint64_t seed) {
  ProfileGrid grid(section.nodes);
  Rng rng(seed);
  const double span = section.t_max - section.t_min;
  const double center = section.t_min + span * rng.uniform(0.35, 0.65);
  const double width = 2.0 / (span * span);
  const double c0 = rng.uniform(0.3, 1.0);
  const double c1 = rng.uniform(-0.6, 0.6);
  const double c2 = rng.uniform(-0.3, 0.3);
  const double amp = section.amplitude;
  auto potential = [=](double t, double x) {
    const double radial = std::exp(-width * (t - center) * (t - center));
    return amp * radial * (1.0 - x * x) * (c0 + c1 * x + c2 * x * x);
  };
  return make_product_family(grid, potential, section.t_min, section.t_max);
}

[[noreturn]] void rethrow_with_context(std::exception_ptr error,
                                       const std::string& id) {
  try {
    std::rethrow_exception(error);
  } catch (const ConfigError& e) {
    throw ConfigError(id + ": " + e.what());
  } catch (const DegreeMismatch& e) {
    throw DegreeMismatch(id + ": " + e.what());
  } catch (const ZeroCharge& e) {
    throw ZeroCharge(id + ": " + e.what());
  } catch (const NameError& e) {
    throw NameError(id + ": " + e.what());
  } catch (const NotPositive& e) {
    throw NotPositive(id + ": " + e.what());
  } catch (const NoHamiltonianAction& e) {
    throw NoHamiltonianAction(id + ": " + e.what());
  } catch (const NonConvergence& e) {
    throw NonConvergence(id + ": " + e.what());
  } catch (const PhaseCollapse& e) {
    throw PhaseCollapse(id + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(id + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Manifold suite: charge recovery and criticality on torus grids, plus the
// sphere-reduction identity checks.

void plan_manifold(const RunConfig& config, std::vector<CheckTask>& tasks) {
  std::vector<const GeometrySection*> tori;
  std::vector<const GeometrySection*> spheres;
  for (const auto& g : config.geometries) {
    if (g.model == "torus") tori.push_back(&g);
    if (g.model == "sphere") spheres.push_back(&g);
  }
  std::vector<const ChargeSection*> manifold_charges;
  for (const auto& c : config.charges)
    if (builtin_charge(c.builtin, 1).kind == ChargeKind::Manifold)
      manifold_charges.push_back(&c);

  if (tori.empty())
    throw ConfigError(
        "suite manifold needs a [geometry] section with model = torus");
  if (spheres.empty())
    throw ConfigError(
        "suite manifold needs a [geometry] section with model = sphere");
  if (manifold_charges.empty())
    throw ConfigError(
        "suite manifold needs a [charge] section with a manifold builtin "
        "(csck or exp)");

  const std::uint64_t run_seed = config.seed;
  const int samples = config.samples;

  for (const GeometrySection* geom : tori) {
    for (const ChargeSection* charge : manifold_charges) {
      const GeometrySection g = *geom;
      const ChargeSection c = *charge;

      {
        const std::string id =
            "torus-charge-topological." + g.name + "." + c.name;
        const double tol = config.tolerance_for(id, 1e-6);
        tasks.push_back({id, [=]() {
          const CentralChargeSpec spec = builtin_charge(c.builtin, g.dimension);
          const Cx expected =
              evaluate_charge(spec, topology_torus(g.dimension)).to_complex();
          double sup = 0.0, sum_sq = 0.0;
          for (int s = 0; s < samples; ++s) {
            const TorusGeometry tg =
                build_torus(g, derive_seed(run_seed, id, s));
            const ZKahlerEvaluation eval = z_tilde_manifold(tg, spec);
            const Cx integral = volume_integral(tg, eval.z_tilde);
            const double rel = std::abs(integral - expected) / std::abs(expected);
            sup = std::max(sup, rel);
            sum_sq += rel * rel;
          }
          return make_report(
              id,
              "the volume integral of the central charge density on seeded "
              "curved metrics recovers the topological charge; relative "
              "error over the seeds",
              sup, std::sqrt(sum_sq / samples), tol,
              {{"samples", static_cast<double>(samples)},
               {"grid", static_cast<double>(g.grid)},
               {"dimension", static_cast<double>(g.dimension)},
               {"amplitude", g.amplitude}});
        }});
      }

      {
        const std::string id =
            "torus-charge-flat-critical." + g.name + "." + c.name;
        const double tol = config.tolerance_for(id, 1e-12);
        tasks.push_back({id, [=]() {
          const CentralChargeSpec spec = builtin_charge(c.builtin, g.dimension);
          TorusGrid grid(g.dimension, g.grid);
          const TorusGeometry flat =
              metric_from_potential(grid, grid.zero_field());
          const ZKahlerEvaluation eval = z_tilde_manifold(flat, spec);
          const double sup = max_abs(eval.residual);
          const Cx total = volume_integral(flat, eval.residual);
          return make_report(
              id,
              "the flat torus is a critical point: the phase-rotated "
              "imaginary part of the charge density vanishes pointwise",
              sup, std::abs(total), tol,
              {{"grid", static_cast<double>(g.grid)},
               {"dimension", static_cast<double>(g.dimension)}});
        }});
      }
    }

    if (geom->dimension == 2) {
      const GeometrySection g = *geom;
      const std::string id = "correction-paths." + g.name;
      const double tol = config.tolerance_for(id, 1e-6);
      tasks.push_back({id, [=]() {
        double sup = 0.0, sum_sq = 0.0;
        int count = 0;
        for (int s = 0; s < samples; ++s) {
          const TorusGeometry tg = build_torus(g, derive_seed(run_seed, id, s));
          for (int j = 0; j <= 1; ++j) {
            ManifoldChargeTerm term;
            term.coefficient = GaussianRational(1);
            term.alpha_power = j;
            term.chern_powers = std::vector<int>(2 - j, 1);
            const double diff =
                max_abs(subtract(correction_term(tg, term),
                                 correction_term_closed_form(tg, term)));
            sup = std::max(sup, diff);
            sum_sq += diff * diff;
            ++count;
          }
        }
        return make_report(
            id,
            "the weak-form adjoint route and the Laplacian closed form of "
            "the correction agree for first-character-only terms (alpha "
            "powers 0 and 1) on seeded curved metrics",
            sup, std::sqrt(sum_sq / count), tol,
            {{"samples", static_cast<double>(samples)},
             {"grid", static_cast<double>(g.grid)},
             {"amplitude", g.amplitude}});
      }});
    }
  }

  for (const GeometrySection* sphere : spheres) {
    const GeometrySection g = *sphere;

    {
      const std::string id = "equivariant-closed." + g.name;
      const double tol = config.tolerance_for(id, 1e-10);
      tasks.push_back({id, [=]() {
        const ProfileGrid grid(g.grid);
        std::vector<VerificationReport> parts;
        for (int s = 0; s < samples; ++s) {
          const SphereGeometry geom =
              seeded_sphere(grid, derive_seed(run_seed, id, s));
          const EquivariantSample sample = equivariant_kahler_sample(geom);
          parts.push_back(check_equivariant_closed(geom, sample, tol));
          parts.push_back(check_equivariant_closed(
              geom, equivariant_wedge(grid, sample, sample), tol));
        }
        return merge_seeded(std::move(parts));
      }});
    }

    {
      const std::string id = "curvature-moment-map." + g.name;
      const double tol = config.tolerance_for(id, 1e-6);
      tasks.push_back({id, [=]() {
        const ProfileGrid grid(g.grid);
        std::vector<VerificationReport> parts;
        for (int s = 0; s < samples; ++s) {
          const SphereGeometry geom =
              seeded_sphere(grid, derive_seed(run_seed, id, s));
          const HamiltonianAction action =
              hamiltonian_for_field(geom, "rotation");
          parts.push_back(check_curvature_moment_map(geom, action, tol));
        }
        return merge_seeded(std::move(parts));
      }});
    }

    {
      const std::string id = "futaki-constancy." + g.name;
      const double tol = config.tolerance_for(id, 1e-8);
      tasks.push_back({id, [=]() {
        const ProfileGrid grid(g.grid);
        std::vector<SphereGeometry> family;
        family.push_back(round_sphere(grid));
        for (int s = 0; s < samples; ++s)
          family.push_back(seeded_sphere(grid, derive_seed(run_seed, id, s)));
        const HamiltonianAction action =
            hamiltonian_for_field(family.front(), "rotation");
        return check_futaki_constancy(family, action, tol);
      }});
    }
  }
}

// ---------------------------------------------------------------------------
// Bundle suite: moment-map derivative, equivariant contraction, pairing code
// paths and constant-curvature criticality per configured bundle.

void plan_bundle(const RunConfig& config, std::vector<CheckTask>& tasks) {
  if (config.bundles.empty())
    throw ConfigError("suite bundle needs at least one [bundle] section");

  const std::uint64_t run_seed = config.seed;
  const int samples = config.samples;

  for (const auto& section : config.bundles) {
    const BundleSection b = section;
    const GeometrySection* geom = config.find_geometry(b.geometry);
    const ChargeSection* charge = config.find_charge(b.charge);
    if (geom == nullptr)
      throw ConfigError("[bundle " + b.name +
                        "] key 'geometry' references unknown geometry '" +
                        b.geometry + "'");
    if (charge == nullptr)
      throw ConfigError("[bundle " + b.name +
                        "] key 'charge' references unknown charge '" +
                        b.charge + "'");
    const GeometrySection g = *geom;
    const ChargeSection c = *charge;

    {
      const std::string id = "bundle-moment-derivative." + b.name;
      const double tol = config.tolerance_for(id, 1e-6);
      tasks.push_back({id, [=]() {
        const CentralChargeSpec spec = builtin_charge(c.builtin, g.dimension);
        std::vector<VerificationReport> parts;
        for (int s = 0; s < samples; ++s) {
          const std::uint64_t seed = derive_seed(run_seed, id, s);
          auto model = make_bundle_model(build_torus(g, seed), b.rank, b.degree);
          Rng rng(splitmix(seed));
          const ConnectionState conn =
              make_connection(model, seeded_skew_tangent(*model, rng, 0.05));
          const MatrixField e =
              seeded_skew_matrix(model->geometry.grid, rng, b.rank, 0.4);
          const EndForm direction = seeded_skew_tangent(*model, rng, 0.3);
          BundleMomentOptions options;
          options.tolerance = tol;
          parts.push_back(
              check_bundle_moment_map(model, conn, e, direction, spec, options));
        }
        return merge_seeded(std::move(parts));
      }});
    }

    {
      const std::string id = "bundle-equivariant-contraction." + b.name;
      const double tol = config.tolerance_for(id, 1e-8);
      tasks.push_back({id, [=]() {
        std::vector<VerificationReport> parts;
        for (int s = 0; s < samples; ++s) {
          const std::uint64_t seed = derive_seed(run_seed, id, s);
          auto model = make_bundle_model(build_torus(g, seed), b.rank, b.degree);
          Rng rng(splitmix(seed));
          const ConnectionState conn =
              make_connection(model, seeded_skew_tangent(*model, rng, 0.05));
          // Moderate amplitude and a short orbit step: the check finite-
          // differences the gauge orbit, and large endomorphisms push the
          // truncation error past the default gate.
          const MatrixField e =
              seeded_skew_matrix(model->geometry.grid, rng, b.rank, 0.2);
          parts.push_back(
              check_equivariant_chern_weil_bundle(model, conn, e, tol, 0.01));
        }
        return merge_seeded(std::move(parts));
      }});
    }

    if (c.builtin == "hym") {
      const std::string id = "bundle-pairing-paths." + b.name;
      const double tol = config.tolerance_for(id, 1e-10);
      tasks.push_back({id, [=]() {
        const CentralChargeSpec spec = builtin_charge(c.builtin, g.dimension);
        double sup = 0.0, sum_sq = 0.0, scale_sup = 0.0;
        for (int s = 0; s < samples; ++s) {
          const std::uint64_t seed = derive_seed(run_seed, id, s);
          // Degree zero keeps the charge phase at exactly pi/2, the regime
          // where the wedge-product closed form is a theorem; at nonzero
          // degree the rotated phase makes the two paths differ by design.
          auto model = make_bundle_model(build_torus(g, seed), b.rank, 0);
          Rng rng(splitmix(seed));
          const ConnectionState conn =
              make_connection(model, seeded_skew_tangent(*model, rng, 0.05));
          const EndForm a = seeded_skew_tangent(*model, rng, 0.2);
          const EndForm bb = seeded_skew_tangent(*model, rng, 0.2);
          const double general = omega_Z_pairing(conn, a, bb, spec);
          const double slope = omega_pairing_hym_path(conn, a, bb);
          const double diff = std::abs(general - slope);
          sup = std::max(sup, diff);
          sum_sq += diff * diff;
          scale_sup = std::max(scale_sup, std::abs(general));
        }
        VerificationReport report = make_report(
            id,
            "the per-term pairing on connection tangents agrees with the "
            "independent wedge-product code path of the slope charge on the "
            "degree-zero bundle of the same rank and geometry",
            sup, std::sqrt(sum_sq / samples), tol,
            {{"samples", static_cast<double>(samples)},
             {"pairing_scale", scale_sup}});
        return report;
      }});
    }

    {
      const std::string id = "bundle-constant-critical." + b.name;
      const double tol = config.tolerance_for(id, 1e-10);
      tasks.push_back({id, [=]() {
        const CentralChargeSpec spec = builtin_charge(c.builtin, g.dimension);
        TorusGrid grid(g.dimension, g.grid);
        auto model = make_bundle_model(
            metric_from_potential(grid, grid.zero_field()), b.rank, b.degree);
        const ConnectionState conn = zero_connection(model);
        const double critical = matrix_sup(z_critical_residual(conn, spec));
        std::map<std::string, double> metadata = {
            {"grid", static_cast<double>(g.grid)},
            {"rank", static_cast<double>(b.rank)},
            {"degree", static_cast<double>(b.degree)},
            {"critical_residual", critical}};
        double sup = critical;
        if (c.builtin == "hym") {
          const double slope_res = matrix_sup(hym_residual(conn));
          metadata["hym_residual"] = slope_res;
          sup = std::max(sup, slope_res);
        } else {
          const double deformed = matrix_sup(dhym_residual(conn));
          metadata["dhym_residual"] = deformed;
          sup = std::max(sup, deformed);
        }
        return make_report(
            id,
            "the constant-curvature reference connection on the flat torus "
            "solves the critical equation of its charge",
            sup, sup, tol, metadata);
      }});
    }
  }

  {
    const std::string id = "bundle-pairing-analytic";
    const double tol = config.tolerance_for(id, 1e-12);
    tasks.push_back({id, [=]() {
      TorusGrid grid(1, 8);
      auto model = make_bundle_model(
          metric_from_potential(grid, grid.zero_field()), 1, 0);
      const ConnectionState conn = zero_connection(model);
      // a = i dx, b = i dy in the complex splitting dx = (dz + dzbar)/2,
      // dy = (dz - dzbar)/(2i); both are skew-Hermitian-valued.
      EndForm a(grid, 1);
      a.at(0, 0).add_component(1u, 0u, grid.constant_field(Cx(0.0, 0.5)));
      a.at(0, 0).add_component(0u, 1u, grid.constant_field(Cx(0.0, 0.5)));
      EndForm bform(grid, 1);
      bform.at(0, 0).add_component(1u, 0u, grid.constant_field(Cx(0.5, 0.0)));
      bform.at(0, 0).add_component(0u, 1u, grid.constant_field(Cx(-0.5, 0.0)));
      const CentralChargeSpec spec = builtin_charge("hym", 1);
      const double expected = 1.0 / (8.0 * kPi * kPi);
      const double general = omega_Z_pairing(conn, a, bform, spec);
      const double slope = omega_pairing_hym_path(conn, a, bform);
      const double skew = omega_Z_pairing(conn, bform, a, spec);
      const double sup =
          std::max({std::abs(general - expected), std::abs(slope - expected),
                    std::abs(general + skew)});
      return make_report(
          id,
          "the pairing of i dx with i dy on the flat two-torus line bundle "
          "equals 1/(8 pi^2) on both code paths and is antisymmetric",
          sup, std::abs(general - expected), tol,
          {{"expected", expected},
           {"general_path", general},
           {"slope_path", slope}});
    }});
  }
}

// ---------------------------------------------------------------------------
// Family suite: the radial moment-map derivative identity per configured
// disc-over-sphere family.

void plan_family(const RunConfig& config, std::vector<CheckTask>& tasks) {
  if (config.families.empty())
    throw ConfigError("suite family needs at least one [family] section");

  const std::uint64_t run_seed = config.seed;

  for (const auto& section : config.families) {
    const FamilySection f = section;
    const ChargeSection* charge = config.find_charge(f.charge);
    if (charge == nullptr)
      throw ConfigError("[family " + f.name +
                        "] key 'charge' references unknown charge '" +
                        f.charge + "'");
    const ChargeSection c = *charge;
    const std::string id = "family-moment-derivative." + f.name;
    const double tol = config.tolerance_for(id, 1e-4);
    tasks.push_back({id, [=]() {
      const ProductFamily family =
          seeded_product_family(f, derive_seed(run_seed, id, 0));
      const CentralChargeSpec spec = builtin_charge(c.builtin, 1);
      FamilyMomentOptions options;
      options.tolerance = tol;
      return check_family_moment_map(family, spec, options);
    }});
  }
}

std::vector<CheckTask> plan_suite(const RunConfig& config,
                                  const std::string& suite) {
  std::vector<CheckTask> tasks;
  if (suite == "manifold" || suite == "all") plan_manifold(config, tasks);
  if (suite == "bundle" || suite == "all") plan_bundle(config, tasks);
  if (suite == "family" || suite == "all") plan_family(config, tasks);
  return tasks;
}

std::string csv_double(double value) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file '" + path + "'");
  return out;
}

std::string component_label(const TorusGrid& grid, const FormKey& key) {
  std::string label;
  for (int a = 0; a < grid.n; ++a)
    if (key.first & (1u << a)) label += "dz" + std::to_string(a + 1);
  for (int a = 0; a < grid.n; ++a)
    if (key.second & (1u << a)) label += "dzb" + std::to_string(a + 1);
  return label.empty() ? "f" : label;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, const std::string& id,
                          std::uint64_t sample) {
  return splitmix(base ^ fnv1a(id)) + sample;
}

Field seeded_torus_potential(const TorusGrid& grid, std::uint64_t seed,
                             double amplitude) {
  Rng rng(seed);
  std::vector<double> cs(static_cast<std::size_t>(grid.axes()));
  std::vector<double> sn(static_cast<std::size_t>(grid.axes()));
  for (double& v : cs) v = rng.uniform(-1.0, 1.0);
  for (double& v : sn) v = rng.uniform(-1.0, 1.0);
  const double cross = rng.uniform(-1.0, 1.0);
  return grid.sample([&](const std::vector<double>& x) {
    double v = 0.0;
    for (int a = 0; a < grid.axes(); ++a)
      v += cs[static_cast<std::size_t>(a)] * std::cos(2.0 * kPi * x[a]) +
           sn[static_cast<std::size_t>(a)] * std::sin(2.0 * kPi * x[a]);
    v += cross * std::sin(2.0 * kPi * x[0]) *
         std::cos(2.0 * kPi * x[grid.axes() - 1]);
    return Cx(amplitude * v, 0.0);
  });
}

bool SuiteResult::all_pass() const {
  for (const auto& report : reports)
    if (!report.pass) return false;
  return true;
}

SuiteResult run_suite(const RunConfig& config, const std::string& suite_name) {
  bool known = false;
  for (const auto& name : suite_names()) known |= (name == suite_name);
  if (!known)
    throw ConfigError("suite '" + suite_name +
                      "' is not one of all, manifold, bundle, family");
  if (!config.seed_set)
    throw ConfigError("key 'seed' is mandatory: randomized checks need an "
                      "explicit seed");

  std::vector<CheckTask> tasks = plan_suite(config, suite_name);

  SuiteResult result;
  result.suite = suite_name;
  result.seed = config.seed;
  result.reports.resize(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());

  const unsigned workers = std::min<unsigned>(
      std::max(1u, std::thread::hardware_concurrency()),
      static_cast<unsigned>(tasks.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      try {
        result.reports[i] = tasks[i].body();
        result.reports[i].identity = tasks[i].id;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w + 1 < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < errors.size(); ++i)
    if (errors[i]) rethrow_with_context(errors[i], tasks[i].id);

  return result;
}

std::string reports_to_json(const SuiteResult& result) {
  njson root;
  root["schema"] = kReportSchemaVersion;
  root["suite"] = result.suite;
  root["seed"] = result.seed;
  njson reports = njson::array();
  for (const auto& report : result.reports) {
    njson entry;
    entry["identity"] = report.identity;
    entry["statement"] = report.statement;
    entry["sup_norm"] = report.sup_norm;
    entry["l2_norm"] = report.l2_norm;
    entry["tolerance"] = report.tolerance;
    entry["pass"] = report.pass;
    njson metadata;  // std::map iterates sorted, so key order is stable
    for (const auto& [key, value] : report.metadata) metadata[key] = value;
    entry["metadata"] = std::move(metadata);
    reports.push_back(std::move(entry));
  }
  root["reports"] = std::move(reports);
  return root.dump(2) + "\n";
}

SuiteResult reports_from_json(const std::string& text) {
  njson root;
  try {
    root = njson::parse(text);
  } catch (const njson::parse_error& e) {
    throw ConfigError(std::string("report file is not valid JSON: ") +
                      e.what());
  }
  if (!root.is_object() || !root.contains("schema") ||
      !root["schema"].is_string())
    throw ConfigError("report file has no schema marker");
  if (root["schema"].get<std::string>() != kReportSchemaVersion)
    throw ConfigError("report schema '" + root["schema"].get<std::string>() +
                      "' does not match expected '" + kReportSchemaVersion +
                      "'");
  SuiteResult result;
  try {
    result.suite = root.at("suite").get<std::string>();
    result.seed = root.at("seed").get<std::uint64_t>();
    for (const auto& entry : root.at("reports")) {
      VerificationReport report;
      report.identity = entry.at("identity").get<std::string>();
      report.statement = entry.at("statement").get<std::string>();
      report.sup_norm = entry.at("sup_norm").get<double>();
      report.l2_norm = entry.at("l2_norm").get<double>();
      report.tolerance = entry.at("tolerance").get<double>();
      report.pass = entry.at("pass").get<bool>();
      for (const auto& [key, value] : entry.at("metadata").items())
        report.metadata[key] = value.get<double>();
      result.reports.push_back(std::move(report));
    }
  } catch (const njson::exception& e) {
    throw ConfigError(std::string("report file is malformed: ") + e.what());
  }
  return result;
}

std::string summary_table(const SuiteResult& result) {
  std::size_t width = 24;
  for (const auto& report : result.reports)
    width = std::max(width, report.identity.size());

  std::ostringstream out;
  auto line = [&](const std::string& id, const std::string& rest) {
    out << id;
    for (std::size_t i = id.size(); i < width; ++i) out << ' ';
    out << rest << '\n';
  };
  char buf[128];
  line("check", "      sup-norm       l2-norm     tolerance  result");
  out << std::string(width + 52, '-') << '\n';
  int passed = 0;
  for (const auto& report : result.reports) {
    std::snprintf(buf, sizeof buf, "  %12.4e  %12.4e  %12.4e  %s",
                  report.sup_norm, report.l2_norm, report.tolerance,
                  report.pass ? "PASS" : "FAIL");
    line(report.identity, buf);
    if (report.pass) ++passed;
  }
  out << std::string(width + 52, '-') << '\n';
  out << passed << "/" << result.reports.size() << " checks passed (suite "
      << result.suite << ", seed " << result.seed << ")\n";
  return out.str();
}

void emit_plot_data(const TensorField& field, const std::string& path) {
  std::ofstream out = open_output(path);
  const TorusGrid& grid = field.grid;
  std::string header;
  for (int a = 0; a < grid.n; ++a) {
    if (!header.empty()) header += ",";
    header += "x" + std::to_string(a + 1) + ",y" + std::to_string(a + 1);
  }
  for (const auto& [key, values] : field.comps) {
    const std::string label = component_label(grid, key);
    header += ",re_" + label + ",im_" + label;
  }
  out << header << '\n';
  if (field.comps.empty()) return;  // header-only dump for an empty field
  for (std::size_t j = 0; j < grid.size(); ++j) {
    std::string row;
    for (int axis = 0; axis < grid.axes(); ++axis) {
      if (!row.empty()) row += ",";
      row += csv_double(grid.coordinate(j, axis));
    }
    for (const auto& [key, values] : field.comps) {
      row += "," + csv_double(values[j].real());
      row += "," + csv_double(values[j].imag());
    }
    out << row << '\n';
  }
}

void emit_plot_data(const ProfileGrid& grid, const RealProfile& profile,
                    const std::string& path) {
  if (profile.size() != grid.count())
    throw ConfigError("profile dump: value count " +
                      std::to_string(profile.size()) +
                      " does not match the grid node count " +
                      std::to_string(grid.count()));
  std::ofstream out = open_output(path);
  out << "x,value\n";
  for (std::size_t j = 0; j < grid.count(); ++j)
    out << csv_double(grid.x[j]) << ',' << csv_double(profile[j]) << '\n';
}

void write_flow_trace(const std::vector<FlowSample>& trace,
                      const std::string& path) {
  std::ofstream out = open_output(path);
  out << "iteration,residual_sup,trace_drift\n";
  for (const auto& sample : trace)
    out << sample.iteration << ',' << csv_double(sample.residual_sup) << ','
        << csv_double(sample.trace_drift) << '\n';
}

std::vector<std::string> write_artifacts(const RunConfig& config,
                                         const SuiteResult& result) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec)
    throw ConfigError("cannot create output directory '" + config.output_dir +
                      "': " + ec.message());
  const std::string dir = config.output_dir;
  std::vector<std::string> written;

  {
    const std::string path = dir + "/reports.json";
    open_output(path) << reports_to_json(result);
    written.push_back(path);
  }
  {
    const std::string path = dir + "/summary.txt";
    open_output(path) << summary_table(result);
    written.push_back(path);
  }
  {
    const std::string path = dir + "/summary.csv";
    std::ofstream out = open_output(path);
    out << "identity,sup_norm,l2_norm,tolerance,pass\n";
    for (const auto& report : result.reports)
      out << report.identity << ',' << csv_double(report.sup_norm) << ','
          << csv_double(report.l2_norm) << ',' << csv_double(report.tolerance)
          << ',' << (report.pass ? 1 : 0) << '\n';
    written.push_back(path);
  }

  // Field dumps: cheap representative fields per suite, derived from the same
  // seed stream as the checks so reruns reproduce them bit for bit.
  const bool manifold = result.suite == "manifold" || result.suite == "all";
  const bool bundle = result.suite == "bundle" || result.suite == "all";
  const bool family = result.suite == "family" || result.suite == "all";

  if (manifold) {
    const ChargeSection* first_manifold_charge = nullptr;
    for (const auto& c : config.charges)
      if (builtin_charge(c.builtin, 1).kind == ChargeKind::Manifold) {
        first_manifold_charge = &c;
        break;
      }
    for (const auto& g : config.geometries) {
      if (g.model == "sphere") {
        const SphereGeometry geom = seeded_sphere(
            ProfileGrid(g.grid), derive_seed(config.seed, "dump." + g.name, 0));
        const std::string path = dir + "/sphere-" + g.name + "-scalar.csv";
        emit_plot_data(geom.grid, geom.scalar, path);
        written.push_back(path);
      } else if (g.model == "torus" && g.dimension == 1 &&
                 first_manifold_charge != nullptr) {
        const std::string id = "torus-charge-topological." + g.name + "." +
                               first_manifold_charge->name;
        const TorusGeometry tg = build_torus(g, derive_seed(config.seed, id, 0));
        const CentralChargeSpec spec =
            builtin_charge(first_manifold_charge->builtin, g.dimension);
        const ZKahlerEvaluation eval = z_tilde_manifold(tg, spec);
        const std::string path = dir + "/residual-" + g.name + "-" +
                                 first_manifold_charge->name + ".csv";
        emit_plot_data(function_form(tg.grid, eval.residual), path);
        written.push_back(path);
      }
    }
  }

  if (bundle && !config.bundles.empty()) {
    const BundleSection& b = config.bundles.front();
    const GeometrySection& g = *config.find_geometry(b.geometry);
    const ChargeSection& c = *config.find_charge(b.charge);
    if (g.dimension == 1) {
      TorusGrid grid(g.dimension, g.grid);
      auto model = make_bundle_model(
          metric_from_potential(grid, grid.zero_field()), b.rank, b.degree);
      const EndForm density = z_tilde_bundle(
          zero_connection(model), builtin_charge(c.builtin, g.dimension));
      TensorField trace(grid);
      for (int i = 0; i < b.rank; ++i)
        trace = form_add(trace, density.at(i, i));
      const std::string path = dir + "/density-" + b.name + ".csv";
      emit_plot_data(trace, path);
      written.push_back(path);
    }
  }

  if (family) {
    for (const auto& f : config.families) {
      const std::string id = "family-moment-derivative." + f.name;
      const ProductFamily product =
          seeded_product_family(f, derive_seed(config.seed, id, 0));
      const FamilyFibre fibre =
          family_fibre(product, 0.5 * (f.t_min + f.t_max));
      const std::string path = dir + "/family-" + f.name + "-scalar.csv";
      emit_plot_data(product.grid, fibre.geometry.scalar, path);
      written.push_back(path);
    }
  }

  // Wall-clock data lives here and only here, so reports.json stays
  // byte-identical across reruns of the same config and seed.
  {
    const std::string path = dir + "/run-metadata.json";
    njson meta;
    meta["schema"] = "zcrit-run-metadata-v1";
    const std::time_t now =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    meta["timestamp_utc"] = stamp;
    meta["suite"] = result.suite;
    meta["seed"] = result.seed;
    meta["checks"] = result.reports.size();
    meta["all_pass"] = result.all_pass();
    open_output(path) << meta.dump(2) + "\n";
    written.push_back(path);
  }

  return written;
}

}  // namespace zcrit
