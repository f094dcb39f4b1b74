#include "dvpp/lti/rational_tf.hpp"

#include <algorithm>
#include <cmath>

#include "dvpp/errors.hpp"
#include "dvpp/kernels/kernels.hpp"

namespace dvpp::lti {

namespace {

bool close_roots(std::complex<double> a, std::complex<double> b) {
  return std::abs(a - b) <= kCancelTol * std::max(1.0, std::abs(a));
}

}  // namespace

RationalTF::RationalTF(Polynomial num, Polynomial den) {
  if (den.is_zero()) throw Error(ErrorKind::InverseOfZero, "zero denominator");
  const double lead = den.leading();
  num_ = (1.0 / lead) * num;
  den_ = (1.0 / lead) * den;
}

Polynomial common_factor(const Polynomial& a, const Polynomial& b) {
  if (a.degree() < 1 || b.degree() < 1) return Polynomial::constant(1.0);
  const auto ra = a.roots();
  auto rb = b.roots();
  std::vector<bool> used(rb.size(), false);
  std::vector<std::complex<double>> shared;
  for (const auto& r : ra) {
    // Conjugate partners are handled with their upper-half-plane twin.
    if (r.imag() < 0.0) continue;
    std::size_t best = rb.size();
    double best_d = 0.0;
    for (std::size_t j = 0; j < rb.size(); ++j) {
      if (used[j] || !close_roots(r, rb[j])) continue;
      const double d = std::abs(r - rb[j]);
      if (best == rb.size() || d < best_d) {
        best = j;
        best_d = d;
      }
    }
    if (best == rb.size()) continue;
    used[best] = true;
    const auto mid = 0.5 * (r + rb[best]);
    if (r.imag() == 0.0 || rb[best].imag() == 0.0) {
      shared.emplace_back(mid.real(), 0.0);
    } else {
      // mark the conjugate in b as consumed too
      for (std::size_t j = 0; j < rb.size(); ++j) {
        if (!used[j] && close_roots(std::conj(rb[best]), rb[j])) {
          used[j] = true;
          break;
        }
      }
      shared.push_back(mid);
      shared.push_back(std::conj(mid));
    }
  }
  return Polynomial::from_roots(shared);
}

RationalTF canonicalize(Polynomial num, Polynomial den) {
  if (den.is_zero()) throw Error(ErrorKind::InverseOfZero, "zero denominator");
  if (num.is_zero()) return RationalTF();
  const Polynomial g = common_factor(num, den);
  if (g.degree() >= 1) {
    num = num.divide(g);
    den = den.divide(g);
  }
  return RationalTF(std::move(num), std::move(den));
}

bool RationalTF::is_stable() const {
  for (const auto& p : den_.roots())
    if (!(p.real() < 0.0)) return false;
  return true;
}

std::complex<double> RationalTF::operator()(std::complex<double> s) const {
  const auto d = den_(s);
  if (std::abs(d) < 1e-300) throw Error(ErrorKind::PoleAtQueryPoint, "denominator vanishes");
  return num_(s) / d;
}

double RationalTF::dc_gain() const { return (*this)(std::complex<double>(0.0, 0.0)).real(); }

double RationalTF::high_frequency_gain() const {
  if (!is_proper()) throw Error(ErrorKind::ImproperTransferFunction, "improper system");
  if (num_.degree() < den_.degree()) return 0.0;
  return num_.leading() / den_.leading();
}

std::vector<std::complex<double>> RationalTF::response(std::span<const double> w) const {
  const std::size_t n = w.size();
  std::vector<double> nr(n), ni(n), dr(n), di(n);
  kernels::poly_eval_jw(num_.coeffs(), w, nr, ni);
  kernels::poly_eval_jw(den_.coeffs(), w, dr, di);
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::complex<double> d(dr[k], di[k]);
    if (std::abs(d) < 1e-300) throw Error(ErrorKind::PoleAtQueryPoint, "pole on the grid");
    out[k] = std::complex<double>(nr[k], ni[k]) / d;
  }
  return out;
}

RationalTF RationalTF::inverse() const {
  if (num_.is_zero()) throw Error(ErrorKind::InverseOfZero, "inverse of zero transfer function");
  return RationalTF(den_, num_);
}

RationalTF operator+(const RationalTF& a, const RationalTF& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.den_ == b.den_) return canonicalize(a.num_ + b.num_, a.den_);
  // Least common denominator over factors shared within the cancellation tolerance.
  const Polynomial g = common_factor(a.den_, b.den_);
  const Polynomial da = a.den_.divide(g);
  const Polynomial db = b.den_.divide(g);
  return canonicalize(a.num_ * db + b.num_ * da, da * db * g);
}

RationalTF operator-(const RationalTF& a, const RationalTF& b) { return a + (-1.0 * b); }

RationalTF operator*(const RationalTF& a, const RationalTF& b) {
  if (a.is_zero() || b.is_zero()) return RationalTF();
  return canonicalize(a.num_ * b.num_, a.den_ * b.den_);
}

RationalTF operator*(double k, const RationalTF& a) {
  if (k == 0.0) return RationalTF();
  return RationalTF(RationalTF::Raw{}, k * a.num_, a.den_);
}

std::complex<double> tf_eval(const RationalTF& tf, std::complex<double> s) { return tf(s); }

RationalTF tf_arith(const RationalTF& a, const RationalTF& b, TfOp op) {
  switch (op) {
    case TfOp::Add: return a + b;
    case TfOp::Mul: return a * b;
    case TfOp::InverseOfA: return canonicalize(a.den(), a.num());
  }
  return a;
}

bool approx_equal(const RationalTF& a, const RationalTF& b, double tol) {
  if (a.num().degree() != b.num().degree() || a.den().degree() != b.den().degree()) return false;
  auto close = [tol](const Polynomial& p, const Polynomial& q) {
    for (int k = 0; k <= p.degree(); ++k) {
      const double scale = std::max(1.0, std::max(std::abs(p.at(k)), std::abs(q.at(k))));
      if (std::abs(p.at(k) - q.at(k)) > tol * scale) return false;
    }
    return true;
  };
  return close(a.num(), b.num()) && close(a.den(), b.den());
}

}  // namespace dvpp::lti
