#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "entropic/measures.hpp"

namespace entropic {

// Row-major cost/kernel matrices: the solver sweeps rows contiguously.
using CostMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Symmetric nonnegative ground cost with an optional x-gradient. `name` is
// the dispatch key for closed-form fast paths ("quadratic").
struct CostSpec {
  std::string name;
  std::function<double(const Eigen::RowVectorXd&, const Eigen::RowVectorXd&)> evaluate;
  std::function<Eigen::RowVectorXd(const Eigen::RowVectorXd&, const Eigen::RowVectorXd&)> grad_x;
  bool symmetric = true;
};

// c(x, y) = ||x - y||^2 / 2, the cost under which the entropic map is defined.
CostSpec quadratic_cost();

// Look up a built-in cost by name ("quadratic"); throws std::invalid_argument
// for unknown names.
CostSpec cost_by_name(const std::string& name);

// Dense cost matrix C[i][j] = c(a_i, b_j); validates every entry is finite.
// The quadratic cost is expanded via Gram products and clamped at zero.
CostMatrix build_cost_matrix(const DiscreteMeasure& a, const DiscreteMeasure& b,
                             const CostSpec& cost);

}  // namespace entropic
