#include "entropic/sinkhorn.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "entropic/errors.hpp"
#include "entropic/kernels.hpp"

namespace entropic {

namespace {

void check_config(const SinkhornConfig& c) {
  if (!(c.epsilon > 0.0) || !std::isfinite(c.epsilon))
    throw std::invalid_argument("sinkhorn: epsilon must be positive and finite");
  if (!(c.tol > 0.0)) throw std::invalid_argument("sinkhorn: tol must be positive");
  if (c.max_iter < 1) throw std::invalid_argument("sinkhorn: max_iter must be at least 1");
}

// Sup norm of the marginal residual, expressed through the next softmin
// iterate: sum_j w_j exp((phi_i + phi_j - c_ij)/eps) = exp((phi_i - tilde_i)/eps).
double max_violation(const Eigen::VectorXd& phi, const Eigen::VectorXd& tilde, double eps) {
  double v = 0.0;
  for (Eigen::Index i = 0; i < phi.size(); ++i)
    v = std::max(v, std::abs(std::expm1((phi[i] - tilde[i]) / eps)));
  return v;
}

void check_finite(const Eigen::VectorXd& v, int iterations, double violation) {
  if (!v.allFinite())
    throw SolverError("sinkhorn: potentials became non-finite", iterations, violation);
}

}  // namespace

MatrixSolveResult solve_on_matrix(const CostMatrix& cost_matrix, const Eigen::VectorXd& log_w1,
                                  const Eigen::VectorXd& log_w2, const SinkhornConfig& config,
                                  bool symmetric) {
  check_config(config);
  const int k1 = static_cast<int>(cost_matrix.rows());
  const int k2 = static_cast<int>(cost_matrix.cols());
  if (log_w1.size() != k1 || log_w2.size() != k2)
    throw std::invalid_argument("sinkhorn: weight/matrix size mismatch");
  if (symmetric && k1 != k2)
    throw std::invalid_argument("sinkhorn: symmetric solve needs a square matrix");
  const double eps = config.epsilon;

  CostMatrix Cs = cost_matrix / eps;

  MatrixSolveResult res;
  res.violation_history.reserve(64);

  if (symmetric) {
    // Damped fixed point phi <- (phi + softmin(phi)) / 2; both marginal
    // equations coincide, and phi1 == phi2 holds exactly at every step.
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(k1);
    Eigen::VectorXd shift(k1), tilde(k1);
    int updates = 0;
    while (true) {
      shift = phi / eps + log_w1;
      kernels::softmin_rows(Cs.data(), k1, k1, shift.data(), eps, tilde.data());
      check_finite(tilde, updates, res.violation_history.empty() ? 0.0 : res.violation_history.back());
      const double viol = max_violation(phi, tilde, eps);
      res.violation_history.push_back(viol);
      if (viol <= config.tol) {
        res.final_violation = viol;
        res.iterations = updates;
        break;
      }
      if (updates >= config.max_iter)
        throw SolverError("sinkhorn: max_iter reached (violation " + std::to_string(viol) + ")",
                          updates, viol);
      phi = 0.5 * (phi + tilde);
      ++updates;
    }
    res.phi1 = phi;
    res.phi2 = std::move(phi);
    return res;
  }

  // Alternating exact updates. After a full sweep the second equation holds
  // by construction, so the sup residual at the top of the next sweep is
  // carried entirely by the first equation and is measured there.
  Eigen::VectorXd phi1 = Eigen::VectorXd::Zero(k1);
  Eigen::VectorXd phi2 = Eigen::VectorXd::Zero(k2);
  Eigen::VectorXd shift1(k1), shift2(k2), tilde1(k1), tilde2(k2);
  int sweeps = 0;
  while (true) {
    shift2 = phi2 / eps + log_w2;
    kernels::softmin_rows(Cs.data(), k1, k2, shift2.data(), eps, tilde1.data());
    check_finite(tilde1, sweeps, res.violation_history.empty() ? 0.0 : res.violation_history.back());
    const double viol = max_violation(phi1, tilde1, eps);
    if (sweeps > 0) {
      res.violation_history.push_back(viol);
      if (viol <= config.tol) {
        res.final_violation = viol;
        res.iterations = sweeps;
        break;
      }
    }
    if (sweeps >= config.max_iter)
      throw SolverError("sinkhorn: max_iter reached (violation " + std::to_string(viol) + ")",
                        sweeps, viol);
    phi1 = tilde1;
    shift1 = phi1 / eps + log_w1;
    kernels::softmin_cols(Cs.data(), k1, k2, shift1.data(), eps, tilde2.data());
    check_finite(tilde2, sweeps, viol);
    phi2 = tilde2;
    ++sweeps;
  }
  res.phi1 = std::move(phi1);
  res.phi2 = std::move(phi2);
  return res;
}

EotSolution solve_schrodinger(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                              const CostSpec& cost, const SinkhornConfig& config) {
  check_config(config);
  if (mu1.dim() != mu2.dim())
    throw std::invalid_argument("sinkhorn: measures live in different dimensions");
  if (config.reference_index_1 < 0 || config.reference_index_1 >= mu1.size() ||
      config.reference_index_2 < 0 || config.reference_index_2 >= mu2.size())
    throw std::invalid_argument("sinkhorn: reference index out of range");

  CostMatrix C = build_cost_matrix(mu1, mu2, cost);
  const bool symmetric =
      mu1 == mu2 && config.reference_index_1 == config.reference_index_2;
  if (symmetric) {
    // Force exact matrix symmetry so the single marginal equation represents
    // both directions bit for bit.
    for (int i = 0; i < C.rows(); ++i)
      for (int j = 0; j < i; ++j) C(i, j) = C(j, i);
  }

  const Eigen::VectorXd lw1 = mu1.weights().array().log();
  const Eigen::VectorXd lw2 = mu2.weights().array().log();
  MatrixSolveResult r = solve_on_matrix(C, lw1, lw2, config, symmetric);

  // Pin the gauge: phi1(ref1) == phi2(ref2). A zero shift is skipped so the
  // symmetric representation keeps its two views bit-identical.
  const double a = 0.5 * (r.phi1[config.reference_index_1] - r.phi2[config.reference_index_2]);
  if (a != 0.0) {
    r.phi1.array() -= a;
    r.phi2.array() += a;
  }

  return EotSolution(mu1, mu2, cost, config, std::move(C), std::move(r.phi1), std::move(r.phi2),
                     r.iterations, r.final_violation, std::move(r.violation_history), symmetric);
}

EotSolution::EotSolution(DiscreteMeasure mu1, DiscreteMeasure mu2, CostSpec cost,
                         SinkhornConfig config, CostMatrix cost_matrix, Eigen::VectorXd phi1,
                         Eigen::VectorXd phi2, int iterations, double final_violation,
                         std::vector<double> violation_history, bool symmetric_solve)
    : mu1_(std::move(mu1)),
      mu2_(std::move(mu2)),
      cost_(std::move(cost)),
      config_(config),
      cost_matrix_(std::move(cost_matrix)),
      phi1_(std::move(phi1)),
      phi2_(std::move(phi2)),
      iterations_(iterations),
      final_violation_(final_violation),
      violation_history_(std::move(violation_history)),
      symmetric_solve_(symmetric_solve) {}

EotSolution EotSolution::gauge_shifted(double a) const {
  EotSolution s = *this;
  s.phi1_.array() += a;
  s.phi2_.array() -= a;
  return s;
}

double plan_mass(const EotSolution& sol, int i, int j) {
  if (i < 0 || i >= sol.mu1().size() || j < 0 || j >= sol.mu2().size())
    throw std::invalid_argument("plan_mass: index out of range");
  const double r =
      (sol.phi1()[i] + sol.phi2()[j] - sol.cost_matrix()(i, j)) / sol.epsilon();
  return sol.mu1().weights()[i] * sol.mu2().weights()[j] * std::exp(r);
}

Eigen::MatrixXd plan_matrix(const EotSolution& sol) {
  const int k1 = sol.mu1().size();
  const int k2 = sol.mu2().size();
  Eigen::MatrixXd P(k1, k2);
  const double eps = sol.epsilon();
  for (int i = 0; i < k1; ++i)
    for (int j = 0; j < k2; ++j) {
      const double r = (sol.phi1()[i] + sol.phi2()[j] - sol.cost_matrix()(i, j)) / eps;
      P(i, j) = sol.mu1().weights()[i] * sol.mu2().weights()[j] * std::exp(r);
    }
  return P;
}

PrimalDual primal_dual_values(const EotSolution& sol) {
  const int k1 = sol.mu1().size();
  const int k2 = sol.mu2().size();
  const double eps = sol.epsilon();
  const auto& w1 = sol.mu1().weights();
  const auto& w2 = sol.mu2().weights();
  double cost_term = 0.0, kl_term = 0.0, mass = 0.0;
  for (int i = 0; i < k1; ++i) {
    for (int j = 0; j < k2; ++j) {
      const double c = sol.cost_matrix()(i, j);
      const double r = (sol.phi1()[i] + sol.phi2()[j] - c) / eps;
      const double p = w1[i] * w2[j] * std::exp(r);
      cost_term += c * p;
      // p log(p / (w1 w2)) = p * r; a vanished entry contributes exactly 0.
      kl_term += p * r;
      mass += p;
    }
  }
  PrimalDual pd;
  pd.cost_term = cost_term;
  pd.kl_term = kl_term;
  pd.primal = cost_term + eps * kl_term;
  pd.dual = sol.phi1().dot(w1) + sol.phi2().dot(w2) - eps * mass + eps;
  return pd;
}

}  // namespace entropic
