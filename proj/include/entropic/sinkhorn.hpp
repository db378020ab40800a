#pragma once

#include <Eigen/Dense>
#include <vector>

#include "entropic/cost.hpp"
#include "entropic/measures.hpp"

namespace entropic {

struct SinkhornConfig {
  double epsilon = 1.0;
  double tol = 1e-9;       // sup-norm cap on the marginal residuals
  int max_iter = 10000;    // full sweeps before giving up
  int reference_index_1 = 0;  // atoms pinned by the normalization
  int reference_index_2 = 0;  // phi1(ref1) == phi2(ref2) after the final shift
};

// Converged potentials for one regularized transport problem, in the
// normalized representation phi1(ref1) == phi2(ref2). Guarantees:
//   * both marginal residuals are <= config.tol in sup norm,
//   * max |phi_i| <= 3 max |c| over the support product,
//   * for a self problem (mu1 == mu2, equal reference indices) the two
//     potential vectors are the same array, so phi1 == phi2 exactly.
class EotSolution {
 public:
  EotSolution(DiscreteMeasure mu1, DiscreteMeasure mu2, CostSpec cost,
              SinkhornConfig config, CostMatrix cost_matrix,
              Eigen::VectorXd phi1, Eigen::VectorXd phi2, int iterations,
              double final_violation, std::vector<double> violation_history,
              bool symmetric_solve);

  const DiscreteMeasure& mu1() const { return mu1_; }
  const DiscreteMeasure& mu2() const { return mu2_; }
  const CostSpec& cost() const { return cost_; }
  const SinkhornConfig& config() const { return config_; }
  double epsilon() const { return config_.epsilon; }
  const CostMatrix& cost_matrix() const { return cost_matrix_; }
  const Eigen::VectorXd& phi1() const { return phi1_; }
  const Eigen::VectorXd& phi2() const { return phi2_; }
  int iterations() const { return iterations_; }
  double final_violation() const { return final_violation_; }
  const std::vector<double>& violation_history() const { return violation_history_; }
  bool symmetric_solve() const { return symmetric_solve_; }

  // Copy with potentials (phi1 + a, phi2 - a); the plan and all transport
  // values are invariant under this reparameterization.
  EotSolution gauge_shifted(double a) const;

 private:
  DiscreteMeasure mu1_;
  DiscreteMeasure mu2_;
  CostSpec cost_;
  SinkhornConfig config_;
  CostMatrix cost_matrix_;
  Eigen::VectorXd phi1_, phi2_;
  int iterations_;
  double final_violation_;
  std::vector<double> violation_history_;
  bool symmetric_solve_;
};

// Solves the two coupled marginal equations
//   int exp((phi1 + phi2 - c) / eps) dmu_j = 1   (j = 1, 2)
// by log-domain softmin fixed-point sweeps from phi = 0, then applies the
// normalization shift. Self problems (bitwise-equal measures, equal reference
// indices) run a damped symmetric iteration that keeps phi1 == phi2 exactly.
// Throws SolverError if max_iter is reached or non-finite values appear, and
// std::invalid_argument for bad inputs (epsilon <= 0, reference out of range,
// dimension mismatch).
EotSolution solve_schrodinger(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                              const CostSpec& cost, const SinkhornConfig& config);

// Same solver on a prebuilt cost matrix (row-major k1 x k2); used where the
// matrix has exploitable structure and is assembled by the caller.
struct MatrixSolveResult {
  Eigen::VectorXd phi1, phi2;
  int iterations = 0;
  double final_violation = 0.0;
  std::vector<double> violation_history;
};
MatrixSolveResult solve_on_matrix(const CostMatrix& cost_matrix,
                                  const Eigen::VectorXd& log_w1,
                                  const Eigen::VectorXd& log_w2,
                                  const SinkhornConfig& config,
                                  bool symmetric);

// Mass the optimal plan puts on the atom pair (i, j):
//   w1_i w2_j exp((phi1_i + phi2_j - c_ij) / eps).
double plan_mass(const EotSolution& sol, int i, int j);

// Full plan matrix (rows sum to w1, columns to w2, within tol).
Eigen::MatrixXd plan_matrix(const EotSolution& sol);

struct PrimalDual {
  double primal;     // cost term + eps * KL(plan || mu1 x mu2)
  double dual;       // int phi1 dmu1 + int phi2 dmu2 - eps int e^((..)/eps) + eps
  double cost_term;
  double kl_term;
  double gap() const { return primal - dual; }
};

// Primal and dual objective values of a converged solution; the KL term uses
// the log-density identity so vanishing plan entries contribute exactly zero.
PrimalDual primal_dual_values(const EotSolution& sol);

}  // namespace entropic
