#include "dvpp/lti/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "dvpp/errors.hpp"

namespace dvpp::lti {

Polynomial::Polynomial(std::vector<double> ascending) : c_(std::move(ascending)) { trim(); }

void Polynomial::trim() {
  double scale = 0.0;
  for (double v : c_) scale = std::max(scale, std::abs(v));
  // Highest-order terms at rounding level relative to the largest coefficient
  // are cancellation residue, not dynamics.
  while (!c_.empty() && std::abs(c_.back()) <= 1e-14 * scale) c_.pop_back();
  if (degree() > kMaxDegree) {
    throw Error(ErrorKind::DegreeCapExceeded,
                "polynomial degree " + std::to_string(degree()) + " exceeds cap");
  }
}

Polynomial Polynomial::from_roots(std::span<const std::complex<double>> roots, double lead) {
  std::vector<std::complex<double>> acc{lead};
  for (const auto& r : roots) {
    std::vector<std::complex<double>> next(acc.size() + 1, 0.0);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      next[i + 1] += acc[i];
      next[i] -= r * acc[i];
    }
    acc = std::move(next);
  }
  std::vector<double> real(acc.size());
  std::transform(acc.begin(), acc.end(), real.begin(), [](auto z) { return z.real(); });
  return Polynomial(std::move(real));
}

std::complex<double> Polynomial::operator()(std::complex<double> s) const {
  std::complex<double> acc = 0.0;
  for (std::size_t i = c_.size(); i-- > 0;) acc = acc * s + c_[i];
  return acc;
}

double Polynomial::operator()(double s) const {
  double acc = 0.0;
  for (std::size_t i = c_.size(); i-- > 0;) acc = acc * s + c_[i];
  return acc;
}

std::vector<std::complex<double>> Polynomial::roots() const {
  const int n = degree();
  if (n < 1) return {};
  // Zeros at the origin are exact in the coefficient vector; peel them off.
  int zeros = 0;
  while (zeros < n && c_[zeros] == 0.0) ++zeros;
  std::vector<std::complex<double>> out(zeros, 0.0);
  const int m = n - zeros;
  if (m == 0) return out;
  if (m == 1) {
    out.emplace_back(-c_[zeros] / c_[zeros + 1]);
    return out;
  }
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(m, m);
  for (int i = 1; i < m; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < m; ++i) comp(i, m - 1) = -c_[zeros + i] / c_.back();
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  const auto ev = es.eigenvalues();
  const Polynomial reduced(std::vector<double>(c_.begin() + zeros, c_.end()));
  std::vector<double> dc(reduced.c_.size() > 1 ? reduced.c_.size() - 1 : 1, 0.0);
  for (std::size_t i = 1; i < reduced.c_.size(); ++i) dc[i - 1] = reduced.c_[i] * double(i);
  const Polynomial deriv(dc);
  for (int i = 0; i < m; ++i) {
    std::complex<double> z = ev(i);
    const bool real_root = z.imag() == 0.0;
    for (int it = 0; it < 8; ++it) {
      const auto d = deriv(z);
      if (std::abs(d) == 0.0) break;
      const auto step = reduced(z) / d;
      const auto next = z - step;
      if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) break;
      if (std::abs(reduced(next)) > std::abs(reduced(z))) break;
      z = next;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
    }
    if (real_root) z = {z.real(), 0.0};
    out.push_back(z);
  }
  return out;
}

Polynomial Polynomial::operator-() const { return -1.0 * *this; }

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-1.0 * b); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return Polynomial(std::move(c));
}

Polynomial operator*(double k, const Polynomial& a) {
  std::vector<double> c = a.c_;
  for (double& v : c) v *= k;
  return Polynomial(std::move(c));
}

Polynomial Polynomial::divide(const Polynomial& divisor, Polynomial* rem) const {
  if (divisor.is_zero()) throw Error(ErrorKind::InverseOfZero, "division by zero polynomial");
  std::vector<double> r = c_;
  const int dn = divisor.degree();
  const int qn = degree() - dn;
  if (qn < 0) {
    if (rem != nullptr) *rem = *this;
    return {};
  }
  std::vector<double> q(qn + 1, 0.0);
  for (int k = qn; k >= 0; --k) {
    const double coef = r[k + dn] / divisor.c_[dn];
    q[k] = coef;
    for (int j = 0; j <= dn; ++j) r[k + j] -= coef * divisor.c_[j];
  }
  if (rem != nullptr) {
    r.resize(std::max(dn, 0));
    *rem = Polynomial(std::move(r));
  }
  return Polynomial(std::move(q));
}

Polynomial Polynomial::pow(int n) const {
  Polynomial out = Polynomial::constant(1.0);
  for (int i = 0; i < n; ++i) out = out * *this;
  return out;
}

}  // namespace dvpp::lti
