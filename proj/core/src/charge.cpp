// Charge evaluation against topology tables, the phase branch, slope-type
// scalars, and the built-in charge registry. All table arithmetic is exact.
#include "zcrit/charge.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace zcrit {

namespace {

long long factorial(int n) {
  long long f = 1;
  for (int m = 2; m <= n; ++m) f *= m;
  return f;
}

Rational rational_pow(const Rational& base, int p) {
  Rational r{1};
  for (int m = 0; m < p; ++m) r *= base;
  return r;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

void require_dimension(int dimension) {
  if (dimension < 1 || dimension > 12)
    throw DegreeMismatch("charge dimension " + std::to_string(dimension) +
                         " is outside the supported range [1, 12]");
}

void check_manifold_term(int dimension, const ManifoldChargeTerm& term,
                         std::size_t index) {
  std::ostringstream where;
  where << "manifold charge term " << index;
  if (term.alpha_power < 0)
    throw DegreeMismatch(where.str() + ": negative alpha power");
  int total = term.alpha_power;
  for (int k : term.chern_powers) {
    if (k < 1)
      throw DegreeMismatch(where.str() +
                           ": Chern multi-index entries must be >= 1 "
                           "(fold rank factors into the coefficient)");
    total += k;
  }
  if (total != dimension) {
    std::ostringstream msg;
    msg << where.str() << ": alpha power " << term.alpha_power
        << " plus Chern degrees gives total degree " << total
        << ", expected the dimension " << dimension;
    throw DegreeMismatch(msg.str());
  }
}

void check_bundle_term(int dimension, const BundleChargeTerm& term,
                       std::size_t index) {
  std::ostringstream where;
  where << "bundle charge term " << index;
  if (term.alpha_power < 0)
    throw DegreeMismatch(where.str() + ": negative alpha power");
  if (term.chern_degree < 0)
    throw DegreeMismatch(where.str() + ": negative Chern degree");
  if (term.theta_degree < 0)
    throw DegreeMismatch(where.str() + ": negative theta degree");
  int total = term.alpha_power + term.chern_degree + term.theta_degree;
  if (total != dimension) {
    std::ostringstream msg;
    msg << where.str() << ": alpha power " << term.alpha_power
        << " plus Chern degree " << term.chern_degree << " plus theta degree "
        << term.theta_degree << " gives total degree " << total
        << ", expected the dimension " << dimension;
    throw DegreeMismatch(msg.str());
  }
}

}  // namespace

CentralChargeSpec CentralChargeSpec::manifold(
    int dimension, std::vector<ManifoldChargeTerm> terms) {
  require_dimension(dimension);
  for (std::size_t i = 0; i < terms.size(); ++i)
    check_manifold_term(dimension, terms[i], i);
  CentralChargeSpec spec;
  spec.kind = ChargeKind::Manifold;
  spec.dimension = dimension;
  spec.manifold_terms = std::move(terms);
  spec.theta_class = {GaussianRational(1)};
  return spec;
}

CentralChargeSpec CentralChargeSpec::bundle(int dimension,
                                            std::vector<BundleChargeTerm> terms,
                                            std::vector<GaussianRational> theta) {
  require_dimension(dimension);
  for (std::size_t i = 0; i < terms.size(); ++i)
    check_bundle_term(dimension, terms[i], i);
  CentralChargeSpec spec;
  spec.kind = ChargeKind::Bundle;
  spec.dimension = dimension;
  spec.bundle_terms = std::move(terms);
  spec.theta_class = std::move(theta);
  return spec;
}

ExactScalar ModelTopology::manifold_integral(
    int alpha_power, std::vector<int> chern_powers) const {
  std::sort(chern_powers.begin(), chern_powers.end());
  auto it = manifold_integrals.find({alpha_power, chern_powers});
  return it == manifold_integrals.end() ? ExactScalar::zero() : it->second;
}

ExactScalar ModelTopology::bundle_integral(int alpha_power,
                                           int chern_degree) const {
  if (!has_bundle())
    throw ConfigError("topology '" + name + "' carries no bundle data");
  auto it = bundle_integrals.find({alpha_power, chern_degree});
  return it == bundle_integrals.end() ? ExactScalar::zero() : it->second;
}

ModelTopology topology_torus(int n) {
  require_dimension(n);
  ModelTopology topo;
  topo.name = "t" + std::to_string(2 * n);
  topo.dimension = n;
  topo.manifold_integrals[{n, {}}] =
      ExactScalar(GaussianRational(factorial(n)));
  return topo;
}

ModelTopology topology_torus_bundle(int n, int rank, long long degree) {
  if (rank < 1)
    throw ConfigError("bundle rank must be >= 1, got " + std::to_string(rank));
  ModelTopology topo = topology_torus(n);
  topo.bundle_rank = rank;
  topo.bundle_degree = Rational(degree);
  // Constant central reference: ch_k(E) integrates against alpha^{n-k} to
  // r * d~^k * n!/k! with slope density d~ = deg / (r n!).
  Rational density(degree, static_cast<long long>(rank) * factorial(n));
  for (int j = 0; j <= n; ++j) {
    int k = n - j;
    Rational value = Rational(rank) * rational_pow(density, k) *
                     Rational(factorial(n), factorial(k));
    topo.bundle_integrals[{j, k}] = ExactScalar(GaussianRational(value));
  }
  return topo;
}

ModelTopology topology_cp1(const ExactScalar& alpha_integral) {
  ModelTopology topo;
  topo.name = "cp1";
  topo.dimension = 1;
  topo.manifold_integrals[{1, {}}] = alpha_integral;
  topo.manifold_integrals[{0, {1}}] = ExactScalar(GaussianRational(2));
  return topo;
}

ModelTopology topology_cp1_bundle(const ExactScalar& alpha_integral, int rank,
                                  long long degree) {
  if (rank < 1)
    throw ConfigError("bundle rank must be >= 1, got " + std::to_string(rank));
  ModelTopology topo = topology_cp1(alpha_integral);
  topo.bundle_rank = rank;
  topo.bundle_degree = Rational(degree);
  topo.bundle_integrals[{1, 0}] = alpha_integral * GaussianRational(rank);
  topo.bundle_integrals[{0, 1}] = ExactScalar(GaussianRational(degree));
  return topo;
}

ExactScalar evaluate_charge(const CentralChargeSpec& charge,
                            const ModelTopology& topology) {
  if (charge.dimension != topology.dimension) {
    std::ostringstream msg;
    msg << "charge built for dimension " << charge.dimension
        << " evaluated on topology '" << topology.name << "' of dimension "
        << topology.dimension;
    throw DegreeMismatch(msg.str());
  }
  ExactScalar z;
  if (charge.kind == ChargeKind::Manifold) {
    for (const auto& term : charge.manifold_terms)
      z += topology.manifold_integral(term.alpha_power, term.chern_powers) *
           term.coefficient;
  } else {
    for (const auto& term : charge.bundle_terms) {
      std::size_t d = static_cast<std::size_t>(term.theta_degree);
      GaussianRational theta_coeff = d < charge.theta_class.size()
                                         ? charge.theta_class[d]
                                         : GaussianRational(0);
      if (theta_coeff.is_zero()) continue;
      z += topology.bundle_integral(term.alpha_power + term.theta_degree,
                                    term.chern_degree) *
           (term.coefficient * theta_coeff);
    }
  }
  return z;
}

double phase(const ExactScalar& charge_value) {
  if (charge_value.is_zero())
    throw ZeroCharge("central charge evaluates to exactly zero; no phase");
  std::complex<double> z = charge_value.to_complex();
  // Fix the branch on the exact real axis: negative reals get +pi.
  if (z.imag() == 0.0) return z.real() >= 0.0 ? 0.0 : std::numbers::pi;
  return std::arg(z);
}

double average_scalar(const ModelTopology& topology) {
  int n = topology.dimension;
  ExactScalar volume = topology.manifold_integral(n, {});
  if (volume.is_zero())
    throw NotPositive("topology '" + topology.name +
                      "' has vanishing alpha^n volume");
  double v = volume.to_complex().real();
  if (v <= 0.0)
    throw NotPositive("topology '" + topology.name +
                      "' has non-positive alpha^n volume");
  ExactScalar c1_pairing = topology.manifold_integral(n - 1, {1});
  return n * c1_pairing.to_complex().real() / v;
}

double hym_slope(const ModelTopology& topology) {
  if (!topology.has_bundle())
    throw ConfigError("topology '" + topology.name +
                      "' carries no bundle data");
  return topology.dimension *
         boost::rational_cast<double>(topology.bundle_degree) /
         topology.bundle_rank;
}

CentralChargeSpec builtin_charge(const std::string& name, int dimension) {
  require_dimension(dimension);
  const std::string key = lower(name);
  const int n = dimension;
  if (key == "csck") {
    return CentralChargeSpec::manifold(
        n, {{GaussianRational::i(), n, {}}, {GaussianRational(-1), n - 1, {1}}});
  }
  if (key == "hym") {
    return CentralChargeSpec::bundle(
        n, {{GaussianRational::i(), n, 0, 0}, {GaussianRational(-1), n - 1, 1, 0}});
  }
  if (key == "dhym") {
    std::vector<BundleChargeTerm> terms;
    for (int j = 0; j <= n; ++j)
      terms.push_back(
          {minus_i_pow(j) * rational_factorial_inv(j), j, n - j, 0});
    return CentralChargeSpec::bundle(n, std::move(terms));
  }
  if (key == "exp") {
    std::vector<ManifoldChargeTerm> terms;
    for (int j = 0; j < n; ++j)
      terms.push_back({minus_i_pow(j) * rational_factorial_inv(j), j, {n - j}});
    // Top power pairs with ch_0(X) = n, folded into the coefficient.
    terms.push_back({minus_i_pow(n) * rational_factorial_inv(n) *
                         GaussianRational(n),
                     n,
                     {}});
    return CentralChargeSpec::manifold(n, std::move(terms));
  }
  throw NameError("unknown builtin charge '" + name +
                  "'; available: csck, dhym, exp, hym");
}

std::vector<std::string> builtin_charges() {
  return {"csck", "dhym", "exp", "hym"};
}

}  // namespace zcrit
