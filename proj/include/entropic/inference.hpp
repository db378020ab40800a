#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "entropic/divergence.hpp"

namespace entropic {

// Outcome of a resampling run. Replicate values are sorted ascending before
// storage, so the report is independent of execution order; replicate b drew
// its randomness from seed + b.
struct ResampleReport {
  std::string statistic_name;
  double observed = 0.0;
  std::vector<double> replicates;  // sorted ascending
  int n = 0;
  int m = 0;
  std::uint64_t seed = 0;
  std::string warning;  // non-empty when m exceeds the n/5 guideline

  int b() const { return static_cast<int>(replicates.size()); }

  // Order statistic ceil(alpha * B) (1-based, clamped), the right-continuous
  // empirical quantile.
  double quantile(double alpha) const;

  // Fraction of replicates <= observed.
  double rank_of_observed() const;

  std::string to_json() const;
  void write_csv(std::ostream& out) const;  // header + one replicate per row
};

struct CltInterval {
  double sbar = 0.0;
  double sigma2 = 0.0;
  double lo = 0.0, hi = 0.0;
  double alpha = 0.05;
  int n = 0;
  bool degenerate = false;  // sigma2 below 1e-12: the normal limit is collapsing
};

// Two-sided CLT interval sbar_n -+ z_{1-alpha/2} sigma_n / sqrt(n) from two
// samples of equal size n (rows are points).
CltInterval clt_interval(const Eigen::MatrixXd& sample1, const Eigen::MatrixXd& sample2,
                         double alpha, const CostSpec& cost, const SinkhornConfig& config);

// m-out-of-n bootstrap for the degenerate null limit of n * sbar_n: pools the
// two samples, draws 2m iid points from the pooled empirical measure per
// replicate, splits them half and half, and records m * sbar of the split.
// observed = n * sbar of the original pair. Requires 2 <= m <= n/2; m > n/5
// sets the report warning. Replicates run in parallel with derived seeds.
ResampleReport mn_bootstrap_null(const Eigen::MatrixXd& sample1, const Eigen::MatrixXd& sample2,
                                 int m, int B, const CostSpec& cost,
                                 const SinkhornConfig& config, std::uint64_t seed);

// Uniform confidence band for one coordinate of the entropic map.
struct ConfidenceBand {
  Eigen::MatrixXd grid;     // query points, one per row
  Eigen::VectorXd center;   // map coordinate on the grid
  double half_width = 0.0;  // uniform over the grid
  double alpha = 0.1;
  int coordinate = 0;
  int n = 0;
  int b = 0;
  std::uint64_t seed = 0;

  std::string to_json() const;
  void write_csv(std::ostream& out) const;  // grid coords, center, lower, upper
};

// One-sample bootstrap band: mu1 is known, sample2 is resampled (size n, with
// replacement) B times; half_width is the (1-alpha) quantile of the grid sup
// of sqrt(n) |T_b - T_center| divided by sqrt(n), for the chosen coordinate
// of the quadratic-cost map.
ConfidenceBand map_confidence_band(const DiscreteMeasure& mu1, const Eigen::MatrixXd& sample2,
                                   int coordinate, const Eigen::MatrixXd& grid, double alpha,
                                   int B, const CostSpec& cost, const SinkhornConfig& config,
                                   std::uint64_t seed);

}  // namespace entropic
