#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "entropic/rng.hpp"

namespace entropic {

// Finitely supported probability measure: one row of `points` per atom plus a
// strictly positive weight vector summing to one (validated to 1e-9 on input,
// renormalized by the exact total). Duplicate atoms (bitwise-equal coordinate
// rows) are merged on construction, first occurrence order preserved.
class DiscreteMeasure {
 public:
  DiscreteMeasure(Eigen::MatrixXd points, Eigen::VectorXd weights);

  // Empirical measure: uniform weights 1/n, duplicates merged (weight k/n).
  static DiscreteMeasure from_samples(const Eigen::MatrixXd& points);

  int size() const { return static_cast<int>(weights_.size()); }
  int dim() const { return static_cast<int>(points_.cols()); }
  const Eigen::MatrixXd& points() const { return points_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  Eigen::RowVectorXd point(int i) const { return points_.row(i); }

  // Bitwise equality of the merged representation.
  bool operator==(const DiscreteMeasure& other) const;

  // n categorical draws, returned as an n x dim matrix of atom copies.
  Eigen::MatrixXd sample(int n, Rng& rng) const;

 private:
  DiscreteMeasure();

  Eigen::MatrixXd points_;
  Eigen::VectorXd weights_;
};

// Paired observations (V_i, W_i): rows of v and w correspond.
struct PairedSample {
  Eigen::MatrixXd v;
  Eigen::MatrixXd w;

  PairedSample(Eigen::MatrixXd v_in, Eigen::MatrixXd w_in);
  int size() const { return static_cast<int>(v.rows()); }
  // n x (d1 + d2) matrix of concatenated pairs.
  Eigen::MatrixXd joined() const;
};

// Half-half mixture; shared atoms end up with mass (mass_a + mass_b) / 2.
DiscreteMeasure pool(const DiscreteMeasure& a, const DiscreteMeasure& b);

// Joint empirical measure of the pairs (V_i, W_i) on R^{d1+d2}.
DiscreteMeasure joint_measure(const PairedSample& s);

// Product of the two empirical marginals: atoms (V_i, W_j) with weight 1/n^2,
// duplicates merged.
DiscreteMeasure product_marginals(const PairedSample& s);

// n iid points, each coordinate uniform on [lower_k, upper_k]. Deterministic
// in `seed`; replicate r of an experiment uses seed = base_seed + r.
Eigen::MatrixXd sample_uniform_box(const Eigen::VectorXd& lower,
                                   const Eigen::VectorXd& upper,
                                   int n, std::uint64_t seed);

// CSV points files: one row per point, comma-separated coordinates, optional
// header row (skipped when its fields do not parse as numbers).
Eigen::MatrixXd load_points_csv(const std::string& path);
void save_points_csv(const std::string& path, const Eigen::MatrixXd& points);

}  // namespace entropic
