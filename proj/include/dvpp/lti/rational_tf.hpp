#pragma once

#include <complex>
#include <span>
#include <vector>

#include "dvpp/lti/polynomial.hpp"

namespace dvpp::lti {

/// Absolute distance (scaled by max(1,|root|)) under which a numerator root
/// and a denominator root are treated as the same factor and cancelled.
inline constexpr double kCancelTol = 1e-9;

/// Ratio of real polynomials in the Laplace variable. The denominator is
/// monic after construction; the zero transfer function is 0/1.
class RationalTF {
 public:
  RationalTF() : num_(), den_({1.0}) {}
  RationalTF(Polynomial num, Polynomial den);

  static RationalTF constant(double k) { return RationalTF({k}, {1.0}); }
  /// k / (tau s + 1)
  static RationalTF first_order(double k, double tau) { return RationalTF({k}, {1.0, tau}); }

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  /// deg(den) - deg(num); negative when improper.
  int relative_degree() const { return den_.degree() - std::max(num_.degree(), 0); }
  bool is_proper() const { return is_zero() || num_.degree() <= den_.degree(); }
  bool is_strictly_proper() const { return is_zero() || num_.degree() < den_.degree(); }
  bool is_static() const { return den_.degree() == 0; }
  /// All poles strictly in the open left half plane.
  bool is_stable() const;

  std::complex<double> operator()(std::complex<double> s) const;
  /// Value at s = 0; throws PoleAtQueryPoint for integrating systems.
  double dc_gain() const;
  /// Value as s -> infinity for proper systems (0 when strictly proper).
  double high_frequency_gain() const;

  /// Batched response on s = j w using the dispatching SIMD kernel.
  std::vector<std::complex<double>> response(std::span<const double> w) const;

  RationalTF inverse() const;

  friend RationalTF operator+(const RationalTF& a, const RationalTF& b);
  friend RationalTF operator-(const RationalTF& a, const RationalTF& b);
  friend RationalTF operator*(const RationalTF& a, const RationalTF& b);
  friend RationalTF operator*(double k, const RationalTF& a);

 private:
  struct Raw {};
  RationalTF(Raw, Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {}
  friend RationalTF canonicalize(Polynomial num, Polynomial den);

  Polynomial num_;
  Polynomial den_;
};

/// Normalizes, trims and cancels numerator/denominator root pairs that agree
/// within kCancelTol.
RationalTF canonicalize(Polynomial num, Polynomial den);

/// Shared factor of two polynomials built from roots that coincide within kCancelTol.
Polynomial common_factor(const Polynomial& a, const Polynomial& b);

enum class TfOp { Add, Mul, InverseOfA };

std::complex<double> tf_eval(const RationalTF& tf, std::complex<double> s);
RationalTF tf_arith(const RationalTF& a, const RationalTF& b, TfOp op);

/// Coefficient-level comparison after canonicalization.
bool approx_equal(const RationalTF& a, const RationalTF& b, double tol);

}  // namespace dvpp::lti
