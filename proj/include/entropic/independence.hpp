#pragma once

#include <cstdint>
#include <functional>

#include "entropic/inference.hpp"
#include "entropic/measures.hpp"

namespace entropic {

// Sinkhorn divergence between the joint empirical measure of (V, W) and the
// product of its marginals; zero iff the two empirical measures coincide.
// The product side has up to n^2 atoms, so n is capped (default 300; raise
// deliberately). For the quadratic cost the product self problem factorizes
// across the two blocks and is solved at marginal size; other costs solve the
// product measure directly and are only practical for small n.
double independence_statistic(const PairedSample& s, const CostSpec& cost,
                              const SinkhornConfig& config, int cap = 300);

struct IndependenceResult {
  double d_n = 0.0;
  int n = 0;
  double scaled = 0.0;   // n * d_n, the statistic with a nondegenerate null limit
  double p_value = 1.0;  // (1 + #{replicates >= scaled}) / (1 + B)
  ResampleReport calibration;
};

// Permutation test of independence: B seeded permutations of the w column
// recompute the scaled statistic; exact level for any B by exchangeability.
// Requires n >= 4.
IndependenceResult independence_test(const PairedSample& s, int B, const CostSpec& cost,
                                     const SinkhornConfig& config, std::uint64_t seed,
                                     int cap = 300);

// Decomposition diagnostic for U-statistics of the kernel
//   h_f(x1, x2) = f(v1, w1) + f(v2, w2) - f(v1, w2) - f(v2, w1):
// u_n is the U-statistic, two_delta = 2 (joint(f) - product(f)) its linear
// surrogate, and the remainder u_n - two_delta is bounded by 4 max|f| / n,
// with max|f| over the observed pair grid.
struct UStatCheck {
  double u_n = 0.0;
  double two_delta = 0.0;
  double remainder = 0.0;
  double bound = 0.0;
};

UStatCheck ustat_decomposition_check(
    const PairedSample& s,
    const std::function<double(const Eigen::RowVectorXd&, const Eigen::RowVectorXd&)>& f);

}  // namespace entropic
