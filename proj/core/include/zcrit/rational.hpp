// Exact scalars for intersection arithmetic: Gaussian rationals with an
// attached polynomial dependence on pi, so torus tables stay exact and the
// 4*pi normalizations of the sphere survive sums like 4*pi*i - 2 without
// rounding. Conversion to complex<double> happens once, at the end.
#pragma once

#include <boost/rational.hpp>

#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

namespace zcrit {

using Rational = boost::rational<long long>;

// "3/2" or "2"; the stream operator of boost::rational always prints the
// denominator, which reads badly in charge values.
inline std::string rational_to_string(const Rational& q) {
  std::string s = std::to_string(q.numerator());
  if (q.denominator() != 1) s += "/" + std::to_string(q.denominator());
  return s;
}

struct GaussianRational {
  Rational re{0};
  Rational im{0};

  GaussianRational() = default;
  GaussianRational(Rational r) : re(r) {}
  GaussianRational(long long r) : re(r) {}
  GaussianRational(Rational r, Rational i) : re(r), im(i) {}

  static GaussianRational i() { return {Rational(0), Rational(1)}; }

  bool is_zero() const { return re == Rational(0) && im == Rational(0); }

  GaussianRational operator+(const GaussianRational& o) const {
    return {re + o.re, im + o.im};
  }
  GaussianRational operator-(const GaussianRational& o) const {
    return {re - o.re, im - o.im};
  }
  GaussianRational operator*(const GaussianRational& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  GaussianRational operator-() const { return {-re, -im}; }
  bool operator==(const GaussianRational& o) const {
    return re == o.re && im == o.im;
  }

  GaussianRational conj() const { return {re, -im}; }

  std::complex<double> to_complex() const {
    return {boost::rational_cast<double>(re), boost::rational_cast<double>(im)};
  }
};

// (-i)^p as a Gaussian rational.
inline GaussianRational minus_i_pow(int p) {
  static const int re[4] = {1, 0, -1, 0};
  static const int im[4] = {0, -1, 0, 1};
  int m = ((p % 4) + 4) % 4;
  return {Rational(re[m]), Rational(im[m])};
}

inline GaussianRational rational_factorial_inv(int k) {
  long long f = 1;
  for (int m = 2; m <= k; ++m) f *= m;
  return GaussianRational(Rational(1, f));
}

// Sparse polynomial in pi with Gaussian-rational coefficients.
class ExactScalar {
 public:
  ExactScalar() = default;
  ExactScalar(GaussianRational c, int pi_power = 0) {
    if (!c.is_zero()) {
      coeffs_.resize(pi_power + 1);
      coeffs_[pi_power] = c;
    }
  }
  static ExactScalar zero() { return {}; }
  static ExactScalar one() { return ExactScalar(GaussianRational(1)); }

  bool is_zero() const {
    for (const auto& c : coeffs_)
      if (!c.is_zero()) return false;
    return true;
  }

  ExactScalar& operator+=(const ExactScalar& o) {
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
    for (std::size_t p = 0; p < o.coeffs_.size(); ++p)
      coeffs_[p] = coeffs_[p] + o.coeffs_[p];
    return *this;
  }
  ExactScalar operator+(const ExactScalar& o) const {
    ExactScalar r = *this;
    r += o;
    return r;
  }
  ExactScalar operator*(const ExactScalar& o) const {
    ExactScalar r;
    if (coeffs_.empty() || o.coeffs_.empty()) return r;
    r.coeffs_.resize(coeffs_.size() + o.coeffs_.size() - 1);
    for (std::size_t p = 0; p < coeffs_.size(); ++p)
      for (std::size_t q = 0; q < o.coeffs_.size(); ++q)
        r.coeffs_[p + q] = r.coeffs_[p + q] + coeffs_[p] * o.coeffs_[q];
    return r;
  }
  ExactScalar operator*(const GaussianRational& c) const {
    return *this * ExactScalar(c);
  }
  ExactScalar operator-() const {
    ExactScalar r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }
  ExactScalar operator-(const ExactScalar& o) const { return *this + (-o); }
  bool operator==(const ExactScalar& o) const { return (*this - o).is_zero(); }

  std::complex<double> to_complex() const {
    std::complex<double> z{0.0, 0.0};
    double pi_pow = 1.0;
    for (const auto& c : coeffs_) {
      z += c.to_complex() * pi_pow;
      pi_pow *= std::numbers::pi;
    }
    return z;
  }

  // Exact human-readable form, one summand per nonzero real or imaginary
  // rational: "-i", "-2 + 4*pi*i", "3/2*pi^2". Zero prints "0".
  std::string to_string() const {
    struct Part {
      Rational value;
      int pi_power;
      bool imaginary;
    };
    std::vector<Part> parts;
    for (std::size_t p = 0; p < coeffs_.size(); ++p) {
      if (coeffs_[p].re != Rational(0))
        parts.push_back({coeffs_[p].re, static_cast<int>(p), false});
      if (coeffs_[p].im != Rational(0))
        parts.push_back({coeffs_[p].im, static_cast<int>(p), true});
    }
    if (parts.empty()) return "0";
    std::string out;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      const Part& part = parts[k];
      const bool negative = part.value < Rational(0);
      if (k == 0) {
        if (negative) out += "-";
      } else {
        out += negative ? " - " : " + ";
      }
      const Rational mag = negative ? -part.value : part.value;
      std::vector<std::string> factors;
      if (mag != Rational(1) || (part.pi_power == 0 && !part.imaginary))
        factors.push_back(rational_to_string(mag));
      if (part.pi_power == 1)
        factors.push_back("pi");
      else if (part.pi_power > 1)
        factors.push_back("pi^" + std::to_string(part.pi_power));
      if (part.imaginary) factors.push_back("i");
      for (std::size_t f = 0; f < factors.size(); ++f) {
        if (f > 0) out += "*";
        out += factors[f];
      }
    }
    return out;
  }

 private:
  std::vector<GaussianRational> coeffs_;  // index = power of pi
};

}  // namespace zcrit
