#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace steer::kernels {

// Data-parallel inner loops. Every ISA variant implements the same table;
// results agree with the scalar reference up to summation order.
struct KernelTable {
  std::string_view name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i w[i] * a[i] * b[i]
  double (*weighted_dot)(const double* a, const double* b, const double* w, std::size_t n);
  // sum_i w[i] * a[i]^2
  double (*weighted_sum_squares)(const double* a, const double* w, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // Upper triangle of G = A^T diag(w) A for column-major A (rows x cols, leading
  // dimension lda) written into column-major G (cols x cols, leading dim ldg).
  void (*weighted_gram)(const double* a, std::size_t rows, std::size_t cols, std::size_t lda,
                        const double* w, double* g, std::size_t ldg);
};

const KernelTable& scalar_kernels();

/// Every variant compiled in and runnable on this CPU, scalar first.
std::span<const KernelTable* const> available();

/// Table chosen at first use: the widest supported ISA, unless the
/// STEER_KERNELS environment variable names another one ("scalar", "avx2", "neon").
const KernelTable& active();

/// Force a variant by name for the rest of the process (tests, benchmarks).
/// Returns false if the name is unknown or unsupported here.
bool select(std::string_view name);

}  // namespace steer::kernels
