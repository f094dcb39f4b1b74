#pragma once
// Small hand-rolled generators for property tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace gen {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(eng_() >> 11) * 0x1.0p-53);
  }
  int integer(int lo, int hi) { return lo + static_cast<int>(eng_() % (hi - lo + 1)); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

 private:
  std::mt19937_64 eng_;
};

inline std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i)
    w[i] = std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * i / (n - 1));
  return w;
}

/// Coefficients of a polynomial with roots in the open left half plane.
inline std::vector<double> stable_poly(Rng& r, int degree) {
  std::vector<double> p{1.0};
  for (int d = 0; d < degree; ++d) {
    const double a = r.uniform(0.2, 20.0);
    std::vector<double> q(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      q[i] += a * p[i];
      q[i + 1] += p[i];
    }
    p = q;
  }
  return p;
}

inline std::vector<double> any_poly(Rng& r, int degree) {
  std::vector<double> p(degree + 1);
  for (auto& c : p) c = r.uniform(-2.0, 2.0);
  if (std::abs(p.back()) < 0.1) p.back() = 1.0;
  return p;
}

}  // namespace gen
