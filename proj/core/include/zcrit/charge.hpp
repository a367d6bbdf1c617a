// Central charges as finite sums of intersection numbers. A charge is a term
// list (coefficient, alpha power, Chern data) subject to a dimension rule;
// evaluating it against a topology table is exact Gaussian-rational-times-
// pi-power arithmetic, so vanishing charges are detected exactly instead of
// by tolerance and phases come from a single well-defined branch.
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "zcrit/errors.hpp"
#include "zcrit/rational.hpp"

namespace zcrit {

// One term a * \int alpha^j ch_{k_1}(X) ... ch_{k_r}(X) of a manifold charge.
// Multi-index entries are >= 1; rank factors (ch_0) fold into the coefficient.
// Dimension rule: alpha_power + sum(chern_powers) == n.
struct ManifoldChargeTerm {
  GaussianRational coefficient;
  int alpha_power = 0;
  std::vector<int> chern_powers;
};

// One term rho * \int alpha^j ch_k(E) Theta_d of a bundle charge, where
// Theta_d is the degree-d graded piece of the auxiliary class.
// Dimension rule: alpha_power + chern_degree + theta_degree == n.
struct BundleChargeTerm {
  GaussianRational coefficient;
  int alpha_power = 0;
  int chern_degree = 0;
  int theta_degree = 0;
};

enum class ChargeKind { Manifold, Bundle };

// A validated central charge. Build through the factories, which enforce the
// dimension rule on every term and reject malformed Chern data up front.
struct CentralChargeSpec {
  ChargeKind kind = ChargeKind::Manifold;
  int dimension = 1;
  std::vector<ManifoldChargeTerm> manifold_terms;
  std::vector<BundleChargeTerm> bundle_terms;
  // Graded coefficients of the auxiliary class: theta_class[d] multiplies the
  // degree-d representative alpha^d. Defaults to the trivial class {1}.
  std::vector<GaussianRational> theta_class;

  static CentralChargeSpec manifold(int dimension,
                                    std::vector<ManifoldChargeTerm> terms);
  static CentralChargeSpec bundle(
      int dimension, std::vector<BundleChargeTerm> terms,
      std::vector<GaussianRational> theta = {GaussianRational(1)});
};

// The finitely many intersection numbers a charge evaluation can touch.
// Lookups default to zero, so tables list only the nonvanishing entries.
struct ModelTopology {
  std::string name;
  int dimension = 1;
  // (alpha power, sorted Chern multi-index) -> \int alpha^j ch_{k_1}...ch_{k_r}(X).
  std::map<std::pair<int, std::vector<int>>, ExactScalar> manifold_integrals;
  // (alpha power, Chern degree) -> \int alpha^j ch_k(E).
  std::map<std::pair<int, int>, ExactScalar> bundle_integrals;
  int bundle_rank = 0;        // 0 means no bundle data attached
  Rational bundle_degree{0};  // \int c_1(E) alpha^{n-1}

  bool has_bundle() const { return bundle_rank > 0; }
  ExactScalar manifold_integral(int alpha_power,
                                std::vector<int> chern_powers) const;
  ExactScalar bundle_integral(int alpha_power, int chern_degree) const;
};

// Flat torus of complex dimension n with unit lattice volume per factor:
// \int alpha^n = n! and all tangent Chern characters above degree zero vanish.
ModelTopology topology_torus(int n);

// Torus carrying a rank-r degree-d bundle with central constant-curvature
// reference, so \int alpha^j ch_k(E) = r (d / (r n!))^k n! / k!.
ModelTopology topology_torus_bundle(int n, int rank, long long degree);

// Sphere topology: \int alpha = alpha_integral (4*pi for the geometric model,
// spec-free tables may choose 1) and \int ch_1(X) = 2.
ModelTopology topology_cp1(const ExactScalar& alpha_integral);

// Sphere topology carrying a rank-r degree-d bundle (charge-level data only).
ModelTopology topology_cp1_bundle(const ExactScalar& alpha_integral, int rank,
                                  long long degree);

// Exact value of the charge on a topology table. Throws DegreeMismatch when
// the dimensions disagree and ConfigError when bundle data is missing.
ExactScalar evaluate_charge(const CentralChargeSpec& charge,
                            const ModelTopology& topology);

// Argument of a nonzero charge in (-pi, pi]; exact negative reals map to +pi.
// Throws ZeroCharge when the value is exactly zero.
double phase(const ExactScalar& charge_value);

// Average scalar curvature n \int ch_1(X) alpha^{n-1} / \int alpha^n.
double average_scalar(const ModelTopology& topology);

// Slope n deg(E) / rk(E) entering the Hermitian Yang-Mills equation. The
// displayed formula assumes unit alpha-volume; on the 4-torus (volume 2) it is
// applied literally, matching the residual only in degree zero.
double hym_slope(const ModelTopology& topology);

// Registry of built-in charges, instantiated for a given dimension:
//   csck  i \int alpha^n      - \int ch_1(X) alpha^{n-1}
//   dhym  \int e^{-i alpha} ch(E)
//   exp   \int e^{-i alpha} ch(X)
//   hym   i \int alpha^n ch_0(E) - \int alpha^{n-1} ch_1(E)
// Lookup is case-insensitive; unknown names throw NameError.
CentralChargeSpec builtin_charge(const std::string& name, int dimension);
std::vector<std::string> builtin_charges();

}  // namespace zcrit
