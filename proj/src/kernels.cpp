// Softmin sweep kernels. This translation unit is compiled with -ffast-math
// so the exp loops vectorize (libmvec); callers guarantee finite inputs.
//
// Serial and parallel variants are bitwise identical by construction: work is
// split only across rows (or fixed-width column blocks), each processed by
// the same noinline routine in the same element order, so the split never
// changes any arithmetic.

#include "entropic/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "entropic/threads.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace entropic::kernels {

namespace {

std::atomic<Execution> g_execution{Execution::Auto};

// Below this many matrix entries a parallel region costs more than it saves.
constexpr long long kParallelCutoff = 1 << 15;

// Column blocks are fixed-size so block boundaries do not depend on the
// thread count, and the scratch buffers have fixed alignment.
constexpr int kColBlock = 512;

__attribute__((noinline)) double row_softmin(const double* row, int k2, const double* shift,
                                             double eps) {
  double m = shift[0] - row[0];
  for (int j = 1; j < k2; ++j) m = std::max(m, shift[j] - row[j]);
  double acc = 0.0;
  for (int j = 0; j < k2; ++j) acc += std::exp(shift[j] - row[j] - m);
  return -eps * (std::log(acc) + m);
}

// One column block [j0, j1) in two row-major sweeps (max, then
// exp-accumulate): the matrix streams contiguously, and each column's
// accumulation order is rows ascending no matter who runs the block.
__attribute__((noinline)) void cols_block(const double* Cs, int k1, int k2,
                                          const double* shift, double eps, double* out,
                                          int j0, int j1) {
  alignas(64) double mx[kColBlock];
  alignas(64) double acc[kColBlock];
  const int w = j1 - j0;
  for (int j = 0; j < w; ++j) mx[j] = shift[0] - Cs[j0 + j];
  for (int i = 1; i < k1; ++i) {
    const double* row = Cs + static_cast<long long>(i) * k2 + j0;
    const double s = shift[i];
    for (int j = 0; j < w; ++j) mx[j] = std::max(mx[j], s - row[j]);
  }
  for (int j = 0; j < w; ++j) acc[j] = 0.0;
  for (int i = 0; i < k1; ++i) {
    const double* row = Cs + static_cast<long long>(i) * k2 + j0;
    const double s = shift[i];
    for (int j = 0; j < w; ++j) acc[j] += std::exp(s - row[j] - mx[j]);
  }
  for (int j = 0; j < w; ++j) out[j0 + j] = -eps * (std::log(acc[j]) + mx[j]);
}

bool use_parallel(long long entries) {
  switch (g_execution.load(std::memory_order_relaxed)) {
    case Execution::Serial:
      return false;
    case Execution::Parallel:
      return true;
    case Execution::Auto:
      break;
  }
#ifdef _OPENMP
  if (omp_in_parallel()) return false;
  return entries >= kParallelCutoff && threads::max_threads() > 1;
#else
  return false;
#endif
}

}  // namespace

void set_execution(Execution e) { g_execution.store(e, std::memory_order_relaxed); }
Execution execution() { return g_execution.load(std::memory_order_relaxed); }

void softmin_rows_serial(const double* Cs, int k1, int k2, const double* shift,
                         double eps, double* out) {
  for (int i = 0; i < k1; ++i)
    out[i] = row_softmin(Cs + static_cast<long long>(i) * k2, k2, shift, eps);
}

void softmin_rows_parallel(const double* Cs, int k1, int k2, const double* shift,
                           double eps, double* out) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads::max_threads())
  for (int i = 0; i < k1; ++i)
    out[i] = row_softmin(Cs + static_cast<long long>(i) * k2, k2, shift, eps);
#else
  softmin_rows_serial(Cs, k1, k2, shift, eps, out);
#endif
}

void softmin_cols_serial(const double* Cs, int k1, int k2, const double* shift,
                         double eps, double* out) {
  for (int j0 = 0; j0 < k2; j0 += kColBlock)
    cols_block(Cs, k1, k2, shift, eps, out, j0, std::min(k2, j0 + kColBlock));
}

void softmin_cols_parallel(const double* Cs, int k1, int k2, const double* shift,
                           double eps, double* out) {
#ifdef _OPENMP
  const int nb = (k2 + kColBlock - 1) / kColBlock;
#pragma omp parallel for schedule(static) num_threads(threads::max_threads())
  for (int b = 0; b < nb; ++b) {
    const int j0 = b * kColBlock;
    cols_block(Cs, k1, k2, shift, eps, out, j0, std::min(k2, j0 + kColBlock));
  }
#else
  softmin_cols_serial(Cs, k1, k2, shift, eps, out);
#endif
}

void softmin_rows(const double* Cs, int k1, int k2, const double* shift, double eps,
                  double* out) {
  if (use_parallel(static_cast<long long>(k1) * k2))
    softmin_rows_parallel(Cs, k1, k2, shift, eps, out);
  else
    softmin_rows_serial(Cs, k1, k2, shift, eps, out);
}

void softmin_cols(const double* Cs, int k1, int k2, const double* shift, double eps,
                  double* out) {
  if (use_parallel(static_cast<long long>(k1) * k2))
    softmin_cols_parallel(Cs, k1, k2, shift, eps, out);
  else
    softmin_cols_serial(Cs, k1, k2, shift, eps, out);
}

}  // namespace entropic::kernels
