#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "support/oracle.hpp"

namespace {

oracle::Problem canonical_cross() {
  // Two 2-atom measures at unit spacing: cost rows {0, 2} and {0.5, 0.5}.
  oracle::Problem p;
  p.cost = {{0.0, 2.0}, {0.5, 0.5}};
  p.w1 = {0.5, 0.5};
  p.w2 = {0.5, 0.5};
  p.epsilon = 1.0;
  return p;
}

long double marginal_violation(const oracle::Problem& p, const oracle::Potentials& pot) {
  long double worst = 0.0L;
  for (std::size_t i = 0; i < p.w1.size(); ++i) {
    long double s = 0.0L;
    for (std::size_t j = 0; j < p.w2.size(); ++j)
      s += static_cast<long double>(p.w2[j]) *
           std::exp((pot.phi1[i] + pot.phi2[j] - p.cost[i][j]) / p.epsilon);
    worst = std::max(worst, std::fabs(s - 1.0L));
  }
  for (std::size_t j = 0; j < p.w2.size(); ++j) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < p.w1.size(); ++i)
      s += static_cast<long double>(p.w1[i]) *
           std::exp((pot.phi1[i] + pot.phi2[j] - p.cost[i][j]) / p.epsilon);
    worst = std::max(worst, std::fabs(s - 1.0L));
  }
  return worst;
}

}  // namespace

TEST_CASE("oracle solve satisfies both marginal systems") {
  const oracle::Problem p = canonical_cross();
  const oracle::Potentials pot = oracle::solve(p);
  CHECK(pot.residual <= 1e-14L);
  CHECK(static_cast<double>(marginal_violation(p, pot)) <= 1e-13);
  CHECK(std::fabs(static_cast<double>(pot.phi1[0] - pot.phi2[0])) == 0.0);
}

TEST_CASE("oracle solve normalizes to the requested references") {
  oracle::Problem p;
  p.cost = {{0.3, 1.1, 0.2}, {0.9, 0.05, 1.4}};
  p.w1 = {0.6, 0.4};
  p.w2 = {0.2, 0.5, 0.3};
  p.epsilon = 0.7;
  const oracle::Potentials pot = oracle::solve(p, 1, 2);
  CHECK(pot.residual <= 1e-14L);
  CHECK(static_cast<double>(std::fabs(pot.phi1[1] - pot.phi2[2])) <= 1e-18);
}

TEST_CASE("oracle fixed point matches direct primal minimization") {
  const oracle::Problem p = canonical_cross();
  const oracle::Potentials pot = oracle::solve(p);
  const long double via_potentials = oracle::primal_value(p, pot);
  const long double via_search = oracle::primal_minimum_small(p);
  CHECK(static_cast<double>(std::fabs(via_potentials - via_search)) <= 1e-12);

  oracle::Problem q;
  q.cost = {{0.0, 0.8}, {1.3, 0.1}};
  q.w1 = {0.35, 0.65};
  q.w2 = {0.7, 0.3};
  q.epsilon = 0.5;
  const oracle::Potentials qpot = oracle::solve(q);
  CHECK(static_cast<double>(std::fabs(oracle::primal_value(q, qpot) -
                                      oracle::primal_minimum_small(q))) <= 1e-12);
}

TEST_CASE("oracle single-atom sides have a forced coupling") {
  oracle::Problem p;
  p.cost = {{0.4, 1.2}};
  p.w1 = {1.0};
  p.w2 = {0.25, 0.75};
  p.epsilon = 1.0;
  const long double direct = 0.25L * 0.4L + 0.75L * 1.2L;
  CHECK(static_cast<double>(std::fabs(oracle::primal_minimum_small(p) - direct)) <= 1e-15);
  const oracle::Potentials pot = oracle::solve(p);
  CHECK(static_cast<double>(std::fabs(oracle::primal_value(p, pot) - direct)) <= 1e-13);
}

TEST_CASE("oracle rejects malformed problems") {
  oracle::Problem p;
  p.cost = {{0.0, 1.0}};
  p.w1 = {1.0};
  p.w2 = {0.5, 0.5};
  p.epsilon = -1.0;
  CHECK_THROWS_AS(oracle::solve(p), std::invalid_argument);
  p.epsilon = 1.0;
  p.cost = {{0.0}};
  CHECK_THROWS_AS(oracle::solve(p), std::invalid_argument);
  oracle::Problem big;
  big.cost = {{0.0, 1.0, 2.0}, {1.0, 0.0, 1.0}, {2.0, 1.0, 0.0}};
  big.w1 = {0.3, 0.3, 0.4};
  big.w2 = {0.3, 0.3, 0.4};
  big.epsilon = 1.0;
  CHECK_THROWS_AS(oracle::primal_minimum_small(big), std::invalid_argument);
}
