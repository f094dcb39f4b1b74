#include <atomic>
#include <cstdlib>
#include <cstring>

#include "dvpp/errors.hpp"
#include "dvpp/kernels/kernels.hpp"

namespace dvpp::kernels {

namespace {

Isa detect() {
  const char* env = std::getenv("DVPP_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
  return avx2_available() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

void check(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::DimensionMismatch, what);
}

}  // namespace

bool avx2_available() {
#if defined(DVPP_HAVE_AVX2)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2_available()) isa = Isa::Scalar;
  current().store(isa, std::memory_order_relaxed);
}

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y, bool accumulate) {
  check(a.size() >= rows * cols && x.size() >= cols && y.size() >= rows, "gemv extents");
#if defined(DVPP_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) {
    avx2::gemv(a.data(), rows, cols, x.data(), y.data(), accumulate);
    return;
  }
#endif
  scalar::gemv(a.data(), rows, cols, x.data(), y.data(), accumulate);
}

void poly_eval_jw(std::span<const double> coeffs, std::span<const double> w,
                  std::span<double> re, std::span<double> im) {
  check(re.size() >= w.size() && im.size() >= w.size(), "poly_eval_jw extents");
#if defined(DVPP_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) {
    avx2::poly_eval_jw(coeffs.data(), coeffs.size(), w.data(), re.data(), im.data(), w.size());
    return;
  }
#endif
  scalar::poly_eval_jw(coeffs.data(), coeffs.size(), w.data(), re.data(), im.data(), w.size());
}

}  // namespace dvpp::kernels
