#include <arm_neon.h>

#include "variants.hpp"

namespace steer::kernels {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_dot(const double* a, const double* b, const double* w, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float64x2_t wa0 = vmulq_f64(vld1q_f64(w + i), vld1q_f64(a + i));
    float64x2_t wa1 = vmulq_f64(vld1q_f64(w + i + 2), vld1q_f64(a + i + 2));
    acc0 = vfmaq_f64(acc0, wa0, vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, wa1, vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

double weighted_sum_squares(const double* a, const double* w, std::size_t n) {
  return weighted_dot(a, a, w, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void weighted_gram(const double* a, std::size_t rows, std::size_t cols, std::size_t lda,
                   const double* w, double* g, std::size_t ldg) {
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      g[j * ldg + i] = weighted_dot(a + i * lda, a + j * lda, w, rows);
    }
  }
}

}  // namespace

const KernelTable& neon_kernels() {
  static const KernelTable table{"neon", dot, weighted_dot, weighted_sum_squares, axpy,
                                 weighted_gram};
  return table;
}

}  // namespace steer::kernels
