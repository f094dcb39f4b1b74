#include "dvpp/kernels/kernels.hpp"

#include <immintrin.h>

namespace dvpp::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y,
          bool accumulate) {
  const std::size_t whole = cols - cols % 4;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a + r * cols;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t c = 0; c < whole; c += 4) {
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(x + c), acc);
    }
    double tail = 0.0;
    for (std::size_t c = whole; c < cols; ++c) tail += row[c] * x[c];
    const double v = hsum(acc) + tail;
    y[r] = accumulate ? y[r] + v : v;
  }
}

void poly_eval_jw(const double* coeffs, std::size_t n_coeffs, const double* w, double* re,
                  double* im, std::size_t count) {
  const std::size_t whole = count - count % 4;
  for (std::size_t k = 0; k < whole; k += 4) {
    const __m256d wv = _mm256_loadu_pd(w + k);
    __m256d ar = _mm256_setzero_pd();
    __m256d ai = _mm256_setzero_pd();
    for (std::size_t i = n_coeffs; i-- > 0;) {
      const __m256d c = _mm256_set1_pd(coeffs[i]);
      // nr = c - ai*w  (fnmadd: -(ai*w) + c)
      const __m256d nr = _mm256_fnmadd_pd(ai, wv, c);
      const __m256d ni = _mm256_mul_pd(ar, wv);
      ar = nr;
      ai = ni;
    }
    _mm256_storeu_pd(re + k, ar);
    _mm256_storeu_pd(im + k, ai);
  }
  if (whole < count) {
    scalar::poly_eval_jw(coeffs, n_coeffs, w + whole, re + whole, im + whole, count - whole);
  }
}

}  // namespace dvpp::kernels::avx2
