#include "entropic/cost.hpp"

#include <cmath>
#include <stdexcept>

#include "entropic/errors.hpp"

namespace entropic {

CostSpec quadratic_cost() {
  CostSpec c;
  c.name = "quadratic";
  c.evaluate = [](const Eigen::RowVectorXd& x, const Eigen::RowVectorXd& y) {
    return 0.5 * (x - y).squaredNorm();
  };
  c.grad_x = [](const Eigen::RowVectorXd& x, const Eigen::RowVectorXd& y) {
    return Eigen::RowVectorXd(x - y);
  };
  c.symmetric = true;
  return c;
}

CostSpec cost_by_name(const std::string& name) {
  if (name == "quadratic") return quadratic_cost();
  throw std::invalid_argument("unknown cost: " + name + " (available: quadratic)");
}

CostMatrix build_cost_matrix(const DiscreteMeasure& a, const DiscreteMeasure& b,
                             const CostSpec& cost) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("cost matrix: measures live in different dimensions");
  if (!cost.symmetric) throw std::invalid_argument("cost matrix: cost must be symmetric");
  CostMatrix C(a.size(), b.size());
  if (cost.name == "quadratic") {
    // ||x - y||^2 / 2 = (||x||^2 + ||y||^2) / 2 - x . y via one Gram product;
    // rounding can leave tiny negatives near coincident points, clamp them.
    const Eigen::VectorXd sa = 0.5 * a.points().rowwise().squaredNorm();
    const Eigen::VectorXd sb = 0.5 * b.points().rowwise().squaredNorm();
    C = ((-(a.points() * b.points().transpose())).colwise() + sa).rowwise() + sb.transpose();
    C = C.cwiseMax(0.0);
  } else {
    if (!cost.evaluate) throw std::invalid_argument("cost matrix: cost has no evaluator");
    for (int i = 0; i < a.size(); ++i) {
      const Eigen::RowVectorXd x = a.point(i);
      for (int j = 0; j < b.size(); ++j) C(i, j) = cost.evaluate(x, b.point(j));
    }
  }
  if (!C.allFinite())
    throw SolverError("cost matrix: cost produced non-finite values", 0, 0.0);
  return C;
}

}  // namespace entropic
