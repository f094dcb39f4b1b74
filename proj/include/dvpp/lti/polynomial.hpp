#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

namespace dvpp::lti {

/// Polynomials above this degree are rejected; every model here stays far below it.
inline constexpr int kMaxDegree = 16;

/// Real polynomial in s with dense ascending coefficients (c0 + c1 s + ...).
/// Highest-order zero coefficients are trimmed, so degree() is canonical.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::vector<double> ascending);
  Polynomial(std::initializer_list<double> ascending)
      : Polynomial(std::vector<double>(ascending)) {}

  static Polynomial constant(double c) { return Polynomial({c}); }
  /// Builds lead * prod (s - r) from roots closed under conjugation.
  static Polynomial from_roots(std::span<const std::complex<double>> roots, double lead = 1.0);

  const std::vector<double>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  /// Degree; the zero polynomial reports -1.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  double leading() const { return c_.empty() ? 0.0 : c_.back(); }
  double at(int k) const { return k >= 0 && k < static_cast<int>(c_.size()) ? c_[k] : 0.0; }

  std::complex<double> operator()(std::complex<double> s) const;
  double operator()(double s) const;

  /// Roots from the companion matrix, Newton-polished on the original coefficients.
  std::vector<std::complex<double>> roots() const;

  Polynomial operator-() const;
  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double k, const Polynomial& a);

  /// Quotient of polynomial long division; the remainder is returned through `rem`.
  Polynomial divide(const Polynomial& divisor, Polynomial* rem = nullptr) const;

  Polynomial pow(int n) const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void trim();
  std::vector<double> c_;
};

}  // namespace dvpp::lti
