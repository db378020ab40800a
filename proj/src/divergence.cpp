#include "entropic/divergence.hpp"

namespace entropic {

namespace {

SinkhornConfig self_config(const SinkhornConfig& base, int ref) {
  SinkhornConfig c = base;
  c.reference_index_1 = ref;
  c.reference_index_2 = ref;
  return c;
}

double weighted_variance(const Eigen::VectorXd& f, const Eigen::VectorXd& w) {
  const double mean = f.dot(w);
  double var = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) var += w[i] * (f[i] - mean) * (f[i] - mean);
  return var;
}

}  // namespace

DivergenceBundle sinkhorn_divergence(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                                     const CostSpec& cost, const SinkhornConfig& config) {
  if (mu1 == mu2) {
    // One symmetric solve serves all three subproblems, so the decomposition
    // cancels exactly.
    EotSolution sol =
        solve_schrodinger(mu1, mu1, cost, self_config(config, config.reference_index_1));
    const double s = primal_dual_values(sol).primal;
    return DivergenceBundle{s, s, s, 0.0, sol, sol, std::move(sol)};
  }
  EotSolution sol12 = solve_schrodinger(mu1, mu2, cost, config);
  EotSolution sol11 =
      solve_schrodinger(mu1, mu1, cost, self_config(config, config.reference_index_1));
  EotSolution sol22 =
      solve_schrodinger(mu2, mu2, cost, self_config(config, config.reference_index_2));
  const double s12 = primal_dual_values(sol12).primal;
  const double s11 = primal_dual_values(sol11).primal;
  const double s22 = primal_dual_values(sol22).primal;
  const double sbar = s12 - (s11 + s22) / 2.0;
  return DivergenceBundle{s12,    s11,
                          s22,    sbar,
                          std::move(sol12), std::move(sol11),
                          std::move(sol22)};
}

double sinkhorn_divergence_dual(const DivergenceBundle& b) {
  // int (phi1_cross - phi1_self) dmu1 + int (phi2_cross - phi2_self) dmu2.
  // Valid because the self potentials are in the symmetric representation,
  // where the self cost equals twice the potential integral.
  const double t1 = (b.sol12.phi1() - b.sol11.phi1()).dot(b.sol12.mu1().weights());
  const double t2 = (b.sol12.phi2() - b.sol22.phi2()).dot(b.sol12.mu2().weights());
  return t1 + t2;
}

double asymptotic_variance(const DivergenceBundle& b) {
  const double v1 =
      weighted_variance(b.sol12.phi1() - b.sol11.phi1(), b.sol12.mu1().weights());
  const double v2 =
      weighted_variance(b.sol12.phi2() - b.sol22.phi2(), b.sol12.mu2().weights());
  return v1 + v2;
}

}  // namespace entropic
