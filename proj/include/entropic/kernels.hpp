#pragma once

#include <cstddef>

namespace entropic::kernels {

// Execution policy for the softmin sweeps. Auto picks the parallel variant
// for large matrices outside existing parallel regions. Results are bitwise
// identical across policies and thread counts: parallelism is only over
// independent output elements, each accumulated in a fixed serial order.
enum class Execution { Auto, Serial, Parallel };

void set_execution(Execution e);
Execution execution();

// All kernels take the epsilon-scaled cost matrix Cs = C / eps, row-major
// k1 x k2, and a per-column (resp. per-row) shift vector
//   shift[j] = phi_other[j] / eps + log w_other[j].
//
// softmin_rows:  out[i] = -eps * log sum_j exp(shift[j] - Cs[i, j])
// softmin_cols:  out[j] = -eps * log sum_i exp(shift[i] - Cs[i, j])
//
// Both are max-stabilized; with finite inputs no intermediate can overflow
// and the shifted sum is >= 1.
void softmin_rows(const double* Cs, int k1, int k2, const double* shift,
                  double eps, double* out);
void softmin_cols(const double* Cs, int k1, int k2, const double* shift,
                  double eps, double* out);

// Fixed-policy variants, exposed for the equivalence tests and the benchmark.
void softmin_rows_serial(const double* Cs, int k1, int k2, const double* shift,
                         double eps, double* out);
void softmin_rows_parallel(const double* Cs, int k1, int k2, const double* shift,
                           double eps, double* out);
void softmin_cols_serial(const double* Cs, int k1, int k2, const double* shift,
                         double eps, double* out);
void softmin_cols_parallel(const double* Cs, int k1, int k2, const double* shift,
                           double eps, double* out);

}  // namespace entropic::kernels
