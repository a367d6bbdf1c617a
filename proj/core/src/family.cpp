// Invariant calculus for product families over the disc: radial Richardson
// stencils for the potential, spectral fibre derivatives, the per-fibre
// Legendre bridge onto the symplectic profile backend, fibre-integrated
// density forms, and the radial moment map check. All densities are written
// pole-safely: logarithmic derivatives of the fibre metric only ever appear
// multiplied by the vanishing factor w0 = 1 - x^2 or differentiated after
// that multiplication, so every profile is smooth through the poles.
#include "zcrit/family.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "zcrit/errors.hpp"
#include "zcrit/zkahler.hpp"

namespace zcrit {

namespace {

constexpr double kPi = std::numbers::pi;

using Cx = std::complex<double>;

RealProfile sample_potential(const ProductFamily& family, double t) {
  RealProfile out(family.grid.count());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = family.potential(t, family.grid.x[j]);
  }
  return out;
}

// Potential data at one base radius: the profile, its radial derivatives
// (central differences of width base_step, Richardson-extrapolated), the
// spectral fibre derivatives, and the derived volume density
// f~ = 1 + (1/2)(w0 Phi_x)' of the fibre form against dx ∧ dtheta.
struct RadialSlice {
  double t = 0.0;
  RealProfile phi, phi_x;
  RealProfile phi_t, phi_tx;
  RealProfile phi_tt, phi_ttx;
  RealProfile volume;     // f~, the fibre area density
  RealProfile volume_t;   // (1/2)(w0 Phi_tx)'
  RealProfile volume_tt;  // (1/2)(w0 Phi_ttx)'
  RealProfile beta;       // Phi_t + t Phi_tt, the base block density
};

void check_radius(const ProductFamily& family, double t, double extra) {
  // Tiny slack so that stencil endpoints assembled in floating point do not
  // fall out of the window by roundoff.
  const double slack = 1e-9 * (family.t_max - family.t_min);
  const double lo = family.t_min + family.base_step + extra - slack;
  const double hi = family.t_max - family.base_step - extra + slack;
  if (t < lo || t > hi) {
    std::ostringstream msg;
    msg << "base radius t=" << t << " leaves the family window ["
        << family.t_min << ", " << family.t_max
        << "] once the radial stencil of width " << (family.base_step + extra)
        << " is applied";
    throw ConfigError(msg.str());
  }
}

RadialSlice make_slice(const ProductFamily& family, double t) {
  check_radius(family, t, 0.0);
  const ProfileGrid& grid = family.grid;
  const double d = family.base_step;

  RadialSlice s;
  s.t = t;
  s.phi = sample_potential(family, t);
  const RealProfile plus = sample_potential(family, t + d);
  const RealProfile minus = sample_potential(family, t - d);
  const RealProfile hplus = sample_potential(family, t + d / 2);
  const RealProfile hminus = sample_potential(family, t - d / 2);

  const std::size_t count = grid.count();
  s.phi_t.resize(count);
  s.phi_tt.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double first_full = (plus[j] - minus[j]) / (2.0 * d);
    const double first_half = (hplus[j] - hminus[j]) / d;
    s.phi_t[j] = (4.0 * first_half - first_full) / 3.0;
    const double second_full = (plus[j] - 2.0 * s.phi[j] + minus[j]) / (d * d);
    const double second_half =
        (hplus[j] - 2.0 * s.phi[j] + hminus[j]) / (d * d / 4.0);
    s.phi_tt[j] = (4.0 * second_half - second_full) / 3.0;
  }

  s.phi_x = profile_derivative(grid, s.phi);
  s.phi_tx = profile_derivative(grid, s.phi_t);
  s.phi_ttx = profile_derivative(grid, s.phi_tt);

  auto half_dw = [&grid](const RealProfile& slope) {
    RealProfile scaled(grid.count());
    for (std::size_t j = 0; j < scaled.size(); ++j) {
      scaled[j] = (1.0 - grid.x[j] * grid.x[j]) * slope[j];
    }
    RealProfile out = profile_derivative(grid, scaled);
    for (double& v : out) v *= 0.5;
    return out;
  };

  s.volume = half_dw(s.phi_x);
  for (double& v : s.volume) v += 1.0;
  s.volume_t = half_dw(s.phi_tx);
  s.volume_tt = half_dw(s.phi_ttx);

  int bad = 0;
  double worst = 1.0;
  for (double v : s.volume) {
    if (v <= 0.0) ++bad;
    worst = std::min(worst, v);
  }
  if (bad > 0) {
    std::ostringstream msg;
    msg << "family fibre at t=" << t << " degenerates: the area density "
        << "reaches " << worst << " at " << bad << " node(s)";
    throw NotPositive(msg.str());
  }

  s.beta.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    s.beta[j] = s.phi_t[j] + t * s.phi_tt[j];
  }
  return s;
}

// Density of (1/2) omega^2 against dx ∧ dtheta ⊗ dt ∧ dtheta: the fibre-base
// product f~ beta plus the square of the mixed block, -(t/2) w0 Phi_tx^2.
RealProfile alpha_density(const ProfileGrid& grid, const RadialSlice& s) {
  RealProfile out(grid.count());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double w0 = 1.0 - grid.x[j] * grid.x[j];
    out[j] = s.volume[j] * s.beta[j] -
             0.5 * s.t * w0 * s.phi_tx[j] * s.phi_tx[j];
  }
  return out;
}

// Density of omega ∧ rho, with rho = -(i/2 pi) ddbar log(fibre metric)
// the curvature form of the relative tangent metric induced by omega. The
// fibre block of rho integrates to the Euler number 2, the base block is
// the radial log-derivative of the area density, and the mixed blocks pair
// with the mixed blocks of omega.
RealProfile chern_density(const ProfileGrid& grid, const RadialSlice& s) {
  const std::size_t count = grid.count();
  RealProfile lt(count), smooth(count);
  for (std::size_t j = 0; j < count; ++j) {
    lt[j] = s.volume_t[j] / s.volume[j];
  }
  const RealProfile volume_x = profile_derivative(grid, s.volume);
  for (std::size_t j = 0; j < count; ++j) {
    const double w0 = 1.0 - grid.x[j] * grid.x[j];
    smooth[j] = w0 * volume_x[j] / s.volume[j] - 2.0 * grid.x[j];
  }
  const RealProfile smooth_x = profile_derivative(grid, smooth);
  const RealProfile lt_x = profile_derivative(grid, lt);

  RealProfile out(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double w0 = 1.0 - grid.x[j] * grid.x[j];
    const double ltt = s.volume_tt[j] / s.volume[j] - lt[j] * lt[j];
    const double rho_base = -(lt[j] + s.t * ltt) / (2.0 * kPi);
    const double rho_fibre = -smooth_x[j] / (4.0 * kPi);
    out[j] = s.volume[j] * rho_base + s.beta[j] * rho_fibre +
             s.t * w0 * s.phi_tx[j] * lt_x[j] / (2.0 * kPi);
  }
  return out;
}

void check_family_spec(const CentralChargeSpec& spec) {
  if (spec.kind != ChargeKind::Manifold) {
    throw DegreeMismatch("bundle charge passed to the family density form");
  }
  if (spec.dimension != 1) {
    throw DegreeMismatch("charge of dimension " +
                         std::to_string(spec.dimension) +
                         " does not match the sphere fibres of the family");
  }
}

struct DensityPair {
  double alpha = 0.0;  // 2 pi \int (1/2) omega^2 density
  double chern = 0.0;  // 2 pi \int omega ∧ rho density
};

DensityPair fibre_density_integrals(const ProductFamily& family,
                                    const RadialSlice& slice) {
  DensityPair out;
  out.alpha =
      2.0 * kPi * profile_integral(family.grid, alpha_density(family.grid, slice));
  out.chern =
      2.0 * kPi * profile_integral(family.grid, chern_density(family.grid, slice));
  return out;
}

// Round-sphere symplectic potential, the Legendre dual of 2 log cosh:
// u0(y) = (1/2)[(1+y) log(1+y) + (1-y) log(1-y)], with the endpoint limits
// taken explicitly.
double round_symplectic_potential(double y) {
  const double a = 1.0 + y;
  const double b = 1.0 - y;
  const double va = a > 0.0 ? a * std::log(a) : 0.0;
  const double vb = b > 0.0 ? b * std::log(b) : 0.0;
  return 0.5 * (va + vb);
}

// Barycentric evaluation of the Lobatto-grid interpolant at y.
double barycentric_value(const ProfileGrid& grid, const RealProfile& f,
                         double y) {
  const std::size_t count = grid.count();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const double gap = y - grid.x[j];
    if (std::abs(gap) < 1e-13) return f[j];
    double lambda = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j + 1 == count) lambda *= 0.5;
    const double ratio = lambda / gap;
    num += ratio * f[j];
    den += ratio;
  }
  return num / den;
}

// Solves m(x) = x + (1/2)(1 - x^2) Phi_x(x) = y for the round coordinate x.
// The fibre moment map is monotone (its derivative is the positive area
// density), so Newton from x = y with the density as Jacobian converges in
// a few steps.
double invert_fibre_moment(const ProfileGrid& grid, const RealProfile& phi_x,
                           const RealProfile& volume, double y) {
  if (y >= 1.0 - 1e-14) return 1.0;
  if (y <= -1.0 + 1e-14) return -1.0;
  double x = y;
  double gap = 0.0;
  for (int iter = 0; iter < 60; ++iter) {
    const double slope = barycentric_value(grid, phi_x, x);
    gap = x + 0.5 * (1.0 - x * x) * slope - y;
    if (std::abs(gap) < 5e-15) return x;
    const double jac = barycentric_value(grid, volume, x);
    x -= gap / jac;
    x = std::clamp(x, -1.0, 1.0);
  }
  if (std::abs(gap) > 1e-10) {
    std::ostringstream msg;
    msg << "fibre moment map inversion stalled at target " << y
        << " with residual " << gap;
    throw NonConvergence(msg.str());
  }
  return x;
}

// Family hamiltonian on the round-coordinate nodes: h = m + t Phi_t, the
// fibre moment coordinate shifted by the radial potential derivative. Not
// mean-normalized; constants never reach any pairing because the rotated
// density integrates to zero over each fibre.
RealProfile hamiltonian_profile(const ProfileGrid& grid, const RadialSlice& s,
                                bool drop_potential_shift) {
  RealProfile out(grid.count());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double w0 = 1.0 - grid.x[j] * grid.x[j];
    out[j] = grid.x[j] + 0.5 * w0 * s.phi_x[j];
    if (!drop_potential_shift) out[j] += s.t * s.phi_t[j];
  }
  return out;
}

double phase_of(const CentralChargeSpec& spec) {
  return phase(evaluate_charge(spec, topology_sphere_geometric()));
}

double omega_from_pair(const DensityPair& pair, const CentralChargeSpec& spec,
                       Cx rotate) {
  Cx total(0.0, 0.0);
  for (const ManifoldChargeTerm& term : spec.manifold_terms) {
    const double block = term.alpha_power == 1 ? pair.alpha : pair.chern;
    total += term.coefficient.to_complex() * block;
  }
  return (rotate * total).imag();
}

}  // namespace

ProductFamily make_product_family(
    const ProfileGrid& grid, std::function<double(double, double)> potential,
    double t_min, double t_max, double base_step) {
  if (!potential) {
    throw ConfigError("product family needs a potential closure");
  }
  if (!(t_min > 0.0) || !(t_max > t_min)) {
    std::ostringstream msg;
    msg << "family radial window must satisfy 0 < t_min < t_max, got ["
        << t_min << ", " << t_max << "]";
    throw ConfigError(msg.str());
  }
  if (!(base_step > 0.0) || base_step > (t_max - t_min) / 8.0) {
    std::ostringstream msg;
    msg << "family base step " << base_step
        << " must be positive and at most an eighth of the radial window "
    << (t_max - t_min);
    throw ConfigError(msg.str());
  }
  return ProductFamily{grid, std::move(potential), t_min, t_max, base_step};
}

FamilyFibre family_fibre(const ProductFamily& family, double t) {
  const RadialSlice slice = make_slice(family, t);
  const ProfileGrid& grid = family.grid;
  const std::size_t count = grid.count();

  RealProfile round_coordinate(count), correction(count);
  double bridge_defect = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double y = grid.x[k];
    if (k == 0 || k + 1 == count) {
      // The moment map fixes the poles, and the stable closed form for the
      // correction collapses to -Phi/2 there.
      round_coordinate[k] = y;
      correction[k] = -0.5 * slice.phi[k];
      continue;
    }
    const double x0 =
        invert_fibre_moment(grid, slice.phi_x, slice.volume, y);
    round_coordinate[k] = x0;
    const double residual =
        x0 + 0.5 * (1.0 - x0 * x0) * barycentric_value(grid, slice.phi_x, x0) -
        y;
    bridge_defect = std::max(bridge_defect, std::abs(residual));
    correction[k] = round_symplectic_potential(x0) -
                    round_symplectic_potential(y) +
                    std::atanh(x0) * (y - x0) -
                    0.5 * barycentric_value(grid, slice.phi, x0);
  }

  SphereGeometry geometry = sphere_from_profile(grid, correction);

  RealProfile hamiltonian(count);
  for (std::size_t k = 0; k < count; ++k) {
    hamiltonian[k] =
        grid.x[k] +
        t * barycentric_value(grid, slice.phi_t, round_coordinate[k]);
  }
  const double mean =
      sphere_integral(geometry, hamiltonian) / sphere_area(geometry);
  for (double& v : hamiltonian) v -= mean;

  return FamilyFibre{t, std::move(geometry), std::move(round_coordinate),
                     std::move(hamiltonian), bridge_defect};
}

double family_sigma(const ProductFamily& family, double t,
                    const CentralChargeSpec& spec, bool drop_potential_shift) {
  check_family_spec(spec);
  const FamilyFibre fibre = family_fibre(family, t);
  const RealProfile residual = z_residual_profile(fibre.geometry, spec);
  RealProfile integrand(residual.size());
  for (std::size_t k = 0; k < residual.size(); ++k) {
    const double h =
        drop_potential_shift ? family.grid.x[k] : fibre.hamiltonian[k];
    integrand[k] = h * residual[k];
  }
  return sphere_integral(fibre.geometry, integrand);
}

double family_omega_coefficient(const ProductFamily& family, double t,
                                const CentralChargeSpec& spec) {
  check_family_spec(spec);
  const RadialSlice slice = make_slice(family, t);
  return omega_from_pair(fibre_density_integrals(family, slice), spec,
                         std::exp(Cx(0.0, -phase_of(spec))));
}

double family_scalar_sigma(const ProductFamily& family, double t,
                           bool drop_potential_shift) {
  const FamilyFibre fibre = family_fibre(family, t);
  const double average = average_scalar(topology_sphere_geometric());
  RealProfile integrand(fibre.hamiltonian.size());
  for (std::size_t k = 0; k < integrand.size(); ++k) {
    const double h =
        drop_potential_shift ? family.grid.x[k] : fibre.hamiltonian[k];
    integrand[k] = h * (average - fibre.geometry.scalar[k]);
  }
  return sphere_integral(fibre.geometry, integrand);
}

double family_scalar_omega_coefficient(const ProductFamily& family, double t) {
  const RadialSlice slice = make_slice(family, t);
  const DensityPair pair = fibre_density_integrals(family, slice);
  const double average = average_scalar(topology_sphere_geometric());
  return average * pair.alpha - pair.chern;
}

VerificationReport check_family_moment_map(const ProductFamily& family,
                                           const CentralChargeSpec& spec,
                                           FamilyMomentOptions options) {
  check_family_spec(spec);
  if (options.radial_samples < 1) {
    throw ConfigError("family check needs at least one radial sample");
  }
  if (!(options.step > 0.0) || !(options.tolerance > 0.0)) {
    throw ConfigError("family check step and tolerance must be positive");
  }
  const double margin = options.step + family.base_step;
  const double lo = family.t_min + margin;
  const double hi = family.t_max - margin;
  if (!(hi >= lo)) {
    std::ostringstream msg;
    msg << "family radial window [" << family.t_min << ", " << family.t_max
        << "] is too narrow for radial step " << options.step;
    throw ConfigError(msg.str());
  }

  const int samples = options.radial_samples;
  const double s = options.step;
  std::vector<double> nodes(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    nodes[static_cast<std::size_t>(k)] =
        samples == 1 ? 0.5 * (lo + hi)
                     : lo + (hi - lo) * k / (samples - 1.0);
  }

  auto sigma_at = [&](double t) {
    return family_sigma(family, t, spec, options.drop_potential_shift);
  };

  const Cx rotate = std::exp(Cx(0.0, -phase_of(spec)));
  double omega_scale = 0.0;
  double derivative_scale = 0.0;
  double defect_sup = 0.0;
  double defect_sq = 0.0;
  double coarse_gap = 0.0;
  double fine_gap = 0.0;
  double shift_norm = 0.0;
  for (double t : nodes) {
    const RadialSlice slice = make_slice(family, t);
    const double w =
        omega_from_pair(fibre_density_integrals(family, slice), spec, rotate);
    for (double v : slice.phi_t) {
      shift_norm = std::max(shift_norm, std::abs(t * v));
    }
    const double d_full = (sigma_at(t + s) - sigma_at(t - s)) / (2.0 * s);
    const double d_half = (sigma_at(t + s / 2) - sigma_at(t - s / 2)) / s;
    const double limit = (4.0 * d_half - d_full) / 3.0;
    omega_scale = std::max(omega_scale, std::abs(w));
    derivative_scale = std::max(derivative_scale, std::abs(limit));
    const double defect = std::abs(limit - w);
    defect_sup = std::max(defect_sup, defect);
    defect_sq += defect * defect;
    coarse_gap = std::max(coarse_gap, std::abs(d_full - limit));
    fine_gap = std::max(fine_gap, std::abs(d_half - limit));
  }
  const double scale = std::max({omega_scale, derivative_scale, 1e-6});

  double order = 8.0;
  if (fine_gap > 0.01 * options.tolerance * scale) {
    order = std::log2(std::max(coarse_gap / fine_gap, 1.0));
  }

  // Closure of dh + iota_v omega at the middle node, radial and fibre
  // directions. The radial direction carries the potential shift t Phi_t;
  // dropping it leaves a defect of size |beta|.
  const double t_mid = nodes[nodes.size() / 2];
  const RadialSlice mid = make_slice(family, t_mid);
  auto h_profile_at = [&](double t) {
    const RadialSlice slice = make_slice(family, t);
    return hamiltonian_profile(family.grid, slice, options.drop_potential_shift);
  };
  const RealProfile h_pp = h_profile_at(t_mid + s);
  const RealProfile h_mm = h_profile_at(t_mid - s);
  const RealProfile h_hp = h_profile_at(t_mid + s / 2);
  const RealProfile h_hm = h_profile_at(t_mid - s / 2);
  const RealProfile h_mid =
      hamiltonian_profile(family.grid, mid, options.drop_potential_shift);
  const RealProfile h_mid_x = profile_derivative(family.grid, h_mid);
  double closure_radial = 0.0;
  double closure_fibre = 0.0;
  double required_scale = 0.0;
  for (std::size_t j = 0; j < family.grid.count(); ++j) {
    const double w0 = 1.0 - family.grid.x[j] * family.grid.x[j];
    const double measured_full = (h_pp[j] - h_mm[j]) / (2.0 * s);
    const double measured_half = (h_hp[j] - h_hm[j]) / s;
    const double measured = (4.0 * measured_half - measured_full) / 3.0;
    const double required_t = mid.beta[j] + 0.5 * w0 * mid.phi_tx[j];
    closure_radial = std::max(closure_radial, std::abs(measured - required_t));
    const double required_x = mid.volume[j] + t_mid * mid.phi_tx[j];
    closure_fibre = std::max(closure_fibre, std::abs(h_mid_x[j] - required_x));
    required_scale =
        std::max({required_scale, std::abs(required_t), std::abs(required_x)});
  }
  const double closure_rel =
      std::max(closure_radial, closure_fibre) / (1.0 + required_scale);

  std::map<std::string, double> metadata;
  metadata["radial_samples"] = static_cast<double>(samples);
  metadata["step_coarse"] = s;
  metadata["step_fine"] = s / 2;
  metadata["observed_order"] = order;
  metadata["omega_scale"] = omega_scale;
  metadata["derivative_scale"] = derivative_scale;
  metadata["closure_defect"] = std::max(closure_radial, closure_fibre);
  metadata["shift_norm"] = shift_norm;
  metadata["bridge_defect"] = family_fibre(family, t_mid).bridge_defect;

  VerificationReport report = make_report(
      "family-moment-derivative",
      "d<sigma, v> + iota_v Omega = 0 for the diagonal rotation action on "
      "the product family, in the radial reduction sigma'(t) = W(t): the "
      "Richardson radial derivative of the fibre pairing of the hamiltonian "
      "with the phase-rotated charge density matches the fibre-integrated "
      "density form coefficient, and dh + iota_v omega closes in both the "
      "fibre and radial directions",
      defect_sup / scale,
      std::sqrt(defect_sq / static_cast<double>(samples)) / scale,
      options.tolerance, std::move(metadata));
  report.pass = report.pass && order >= 1.5 && closure_rel <= options.tolerance;
  return report;
}

}  // namespace zcrit
