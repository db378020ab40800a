#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "entropic/divergence.hpp"
#include "entropic/rng.hpp"
#include "support/oracle.hpp"

using namespace entropic;

namespace {

DiscreteMeasure random_measure(int k, int d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd pts(k, d);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < d; ++j) pts(i, j) = rng.uniform(-1.0, 1.0);
  Eigen::VectorXd w(k);
  for (int i = 0; i < k; ++i) w[i] = 0.05 + rng.uniform01();
  w /= w.sum();
  return DiscreteMeasure(pts, w);
}

DiscreteMeasure two_atoms(double x0, double x1) {
  Eigen::MatrixXd pts(2, 1);
  pts << x0, x1;
  Eigen::VectorXd w(2);
  w << 0.5, 0.5;
  return DiscreteMeasure(pts, w);
}

SinkhornConfig tight_config(double eps = 1.0, double tol = 1e-12) {
  SinkhornConfig c;
  c.epsilon = eps;
  c.tol = tol;
  return c;
}

oracle::Problem oracle_problem(const DiscreteMeasure& a, const DiscreteMeasure& b, double eps) {
  oracle::Problem p;
  const CostMatrix C = build_cost_matrix(a, b, quadratic_cost());
  p.cost.assign(static_cast<std::size_t>(C.rows()),
                std::vector<double>(static_cast<std::size_t>(C.cols())));
  for (Eigen::Index i = 0; i < C.rows(); ++i)
    for (Eigen::Index j = 0; j < C.cols(); ++j)
      p.cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = C(i, j);
  p.w1.assign(a.weights().data(), a.weights().data() + a.size());
  p.w2.assign(b.weights().data(), b.weights().data() + b.size());
  p.epsilon = eps;
  return p;
}

double oracle_sbar(const DiscreteMeasure& a, const DiscreteMeasure& b, double eps) {
  const auto value = [eps](const DiscreteMeasure& x, const DiscreteMeasure& y) {
    const oracle::Problem p = oracle_problem(x, y, eps);
    return oracle::primal_value(p, oracle::solve(p));
  };
  return static_cast<double>(value(a, b) - (value(a, a) + value(b, b)) / 2.0L);
}

}  // namespace

TEST_CASE("two-atom divergence matches the reference and its frozen value") {
  const DiscreteMeasure mu1 = two_atoms(0.0, 1.0);
  const DiscreteMeasure mu2 = two_atoms(0.0, 2.0);
  const DivergenceBundle b = sinkhorn_divergence(mu1, mu2, quadratic_cost(), tight_config());
  CHECK(std::fabs(b.sbar - oracle_sbar(mu1, mu2, 1.0)) <= 1e-9);
  // Independently computed once at 50-digit precision for this exact input.
  CHECK(std::fabs(b.sbar - 0.23724081009331675) <= 1e-9);
  CHECK(std::fabs(b.s12 - 0.62988549304172248) <= 1e-9);
  CHECK(std::fabs(b.s11 - 0.21907019637983863) <= 1e-9);
  CHECK(std::fabs(b.s22 - 0.56621916951697281) <= 1e-9);
}

TEST_CASE("identical inputs give exactly zero divergence") {
  const DiscreteMeasure mu = random_measure(7, 2, 301);
  const DiscreteMeasure mu_copy(mu.points(), mu.weights());
  const DivergenceBundle b = sinkhorn_divergence(mu, mu_copy, quadratic_cost(), tight_config(0.5, 1e-9));
  CHECK(b.sbar == 0.0);
  CHECK(b.s12 == b.s11);
  CHECK(b.s12 == b.s22);
  CHECK(b.sol12.symmetric_solve());
}

TEST_CASE("the divergence is symmetric in its arguments") {
  const DiscreteMeasure a = random_measure(5, 2, 311);
  const DiscreteMeasure b = random_measure(6, 2, 312);
  const DivergenceBundle ab = sinkhorn_divergence(a, b, quadratic_cost(), tight_config());
  const DivergenceBundle ba = sinkhorn_divergence(b, a, quadratic_cost(), tight_config());
  CHECK(std::fabs(ab.sbar - ba.sbar) <= 1e-10);
  CHECK(std::fabs(ab.s12 - ba.s12) <= 1e-10);
  CHECK(ab.s11 == ba.s22);
}

TEST_CASE("the divergence is nonnegative on random instances") {
  for (std::uint64_t seed : {321, 322, 323, 324}) {
    const DiscreteMeasure a = random_measure(4, 2, seed);
    const DiscreteMeasure b = random_measure(5, 2, seed + 50);
    for (double eps : {0.5, 1.0}) {
      const DivergenceBundle d = sinkhorn_divergence(a, b, quadratic_cost(), tight_config(eps, 1e-10));
      CHECK(d.sbar >= -1e-8);
    }
  }
}

TEST_CASE("dual and primal forms of the divergence agree") {
  const double tol = 1e-10;
  for (std::uint64_t seed : {331, 332}) {
    const DiscreteMeasure a = random_measure(5, 2, seed);
    const DiscreteMeasure b = random_measure(7, 2, seed + 50);
    const DivergenceBundle d = sinkhorn_divergence(a, b, quadratic_cost(), tight_config(1.0, tol));
    const double cmax = d.sol12.cost_matrix().maxCoeff();
    CHECK(std::fabs(sinkhorn_divergence_dual(d) - d.sbar) <= 10.0 * tol * (1.0 + cmax));
  }
}

TEST_CASE("the variance estimate ignores the gauge") {
  const DiscreteMeasure a = random_measure(5, 2, 341);
  const DiscreteMeasure b = random_measure(6, 2, 342);
  DivergenceBundle d = sinkhorn_divergence(a, b, quadratic_cost(), tight_config());
  const double v = asymptotic_variance(d);
  DivergenceBundle shifted{d.s12,
                           d.s11,
                           d.s22,
                           d.sbar,
                           d.sol12.gauge_shifted(0.3),
                           d.sol11.gauge_shifted(-0.2),
                           d.sol22.gauge_shifted(1.7)};
  const double vs = asymptotic_variance(shifted);
  CHECK(std::fabs(v - vs) <= 1e-12 * (1.0 + v));
  CHECK(v > 1e-6);
}

TEST_CASE("point masses have zero asymptotic variance") {
  Eigen::MatrixXd p1(1, 1), p2(1, 1);
  p1 << 0.0;
  p2 << 3.0;
  Eigen::VectorXd w(1);
  w << 1.0;
  const DivergenceBundle d = sinkhorn_divergence(DiscreteMeasure(p1, w), DiscreteMeasure(p2, w),
                                                 quadratic_cost(), tight_config());
  CHECK(asymptotic_variance(d) == 0.0);
}
