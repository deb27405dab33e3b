#include "steerlab/kernels.hpp"

namespace steer::kernels {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_dot(const double* a, const double* b, const double* w, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

double weighted_sum_squares(const double* a, const double* w, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * a[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
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

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", dot, weighted_dot, weighted_sum_squares, axpy,
                                 weighted_gram};
  return table;
}

}  // namespace steer::kernels
