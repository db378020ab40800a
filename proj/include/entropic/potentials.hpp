#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "entropic/sinkhorn.hpp"

namespace entropic {

// Out-of-sample potential at x via the fixed-point representation
//   phi_1(x) = -eps log int exp((phi_2(y) - c(x, y)) / eps) dmu2(y)
// (side 1; side 2 is the mirror image). On support atoms this reproduces the
// stored values up to 2 * eps * tol.
double extend_potential(const EotSolution& sol, const Eigen::RowVectorXd& x, int side);

// Gradient of the extended phi_1: softmax-weighted average of grad_x c(x, y_j)
// with weights proportional to exp((phi2_j - c(x, y_j)) / eps) * w2_j.
Eigen::RowVectorXd grad_potential_1(const EotSolution& sol, const Eigen::RowVectorXd& x);

struct MapEvaluation {
  Eigen::RowVectorXd query;
  Eigen::RowVectorXd barycentric;    // softmax-weighted average of target atoms
  Eigen::RowVectorXd gradient_form;  // x - grad phi_1(x)
};

// Entropic transport map estimate at x. Defined for the quadratic cost only
// (the two forms coincide there); throws std::invalid_argument otherwise.
MapEvaluation entropic_map(const EotSolution& sol, const Eigen::RowVectorXd& x);
std::vector<MapEvaluation> entropic_map(const EotSolution& sol, const Eigen::MatrixXd& grid);

// Axis-aligned uniform grid: resolution^d points over [lower, upper].
Eigen::MatrixXd uniform_grid(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                             int resolution);

// Default evaluation grid: about 64 points (per-axis resolution floor(64^(1/d)),
// at least 2) over the bounding box of the two supports pooled together.
Eigen::MatrixXd default_grid(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2);

// Grid specification, JSON text: either a list of points [[x1, ...], ...] or
// {"box": {"lower": [...], "upper": [...]}, "resolution": k}.
Eigen::MatrixXd parse_grid_json(const std::string& json_text);

}  // namespace entropic
