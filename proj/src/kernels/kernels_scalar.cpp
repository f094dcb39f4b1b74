#include "dvpp/kernels/kernels.hpp"

namespace dvpp::kernels::scalar {

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y,
          bool accumulate) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = accumulate ? y[r] + acc : acc;
  }
}

void poly_eval_jw(const double* coeffs, std::size_t n_coeffs, const double* w, double* re,
                  double* im, std::size_t count) {
  for (std::size_t k = 0; k < count; ++k) {
    double ar = 0.0;
    double ai = 0.0;
    // (ar + j ai) * (j w) = -ai w + j ar w
    for (std::size_t i = n_coeffs; i-- > 0;) {
      const double nr = -ai * w[k] + coeffs[i];
      const double ni = ar * w[k];
      ar = nr;
      ai = ni;
    }
    re[k] = ar;
    im[k] = ai;
  }
}

}  // namespace dvpp::kernels::scalar
