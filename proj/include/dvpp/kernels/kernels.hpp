#pragma once
// Data-parallel inner loops: dense mat-vec for the discrete-time stepper and
// batched polynomial evaluation on the imaginary axis for frequency sweeps.
// Each kernel has a scalar reference and an AVX2 variant; the variant is
// picked once at runtime and can be pinned with DVPP_SIMD=scalar.

#include <cstddef>
#include <span>

namespace dvpp::kernels {

enum class Isa { Scalar, Avx2 };

/// True when the binary carries AVX2 code and the CPU reports avx2+fma.
bool avx2_available();

/// ISA used by the dispatching entry points below.
Isa active_isa();

/// Overrides the dispatch choice (tests and benchmarks). Requesting Avx2 on a
/// machine without it falls back to Scalar.
void set_isa(Isa isa);

const char* isa_name(Isa isa);

// y = A x, or y += A x when accumulate is set. A is row-major rows x cols.
void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y, bool accumulate = false);

// p(j w_k) for ascending real coefficients, written as (re_k, im_k).
void poly_eval_jw(std::span<const double> coeffs, std::span<const double> w,
                  std::span<double> re, std::span<double> im);

namespace scalar {
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y,
          bool accumulate);
void poly_eval_jw(const double* coeffs, std::size_t n_coeffs, const double* w, double* re,
                  double* im, std::size_t count);
}  // namespace scalar

namespace avx2 {
// Only call when avx2_available() is true.
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y,
          bool accumulate);
void poly_eval_jw(const double* coeffs, std::size_t n_coeffs, const double* w, double* re,
                  double* im, std::size_t count);
}  // namespace avx2

}  // namespace dvpp::kernels
