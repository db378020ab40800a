#include "support/oracle.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace oracle {

namespace {

constexpr long double kResidualTarget = 1e-14L;
constexpr int kMaxSweeps = 1000000;

void validate(const Problem& p) {
  const std::size_t k1 = p.w1.size(), k2 = p.w2.size();
  if (k1 == 0 || k2 == 0 || p.cost.size() != k1)
    throw std::invalid_argument("oracle: inconsistent problem shape");
  for (const auto& row : p.cost)
    if (row.size() != k2) throw std::invalid_argument("oracle: inconsistent cost row");
  if (!(p.epsilon > 0.0)) throw std::invalid_argument("oracle: epsilon must be positive");
}

long double kahan_total(const std::vector<long double>& terms) {
  long double sum = 0.0L, comp = 0.0L;
  for (long double t : terms) {
    const long double y = t - comp;
    const long double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
  return sum;
}

}  // namespace

Potentials solve(const Problem& p, int ref1, int ref2) {
  validate(p);
  const int k1 = static_cast<int>(p.w1.size()), k2 = static_cast<int>(p.w2.size());
  if (ref1 < 0 || ref1 >= k1 || ref2 < 0 || ref2 >= k2)
    throw std::invalid_argument("oracle: reference out of range");
  const long double eps = p.epsilon;

  Potentials out;
  out.phi1.assign(static_cast<std::size_t>(k1), 0.0L);
  out.phi2.assign(static_cast<std::size_t>(k2), 0.0L);

  std::vector<long double> terms;
  const auto marginal_residual = [&]() {
    long double worst = 0.0L;
    for (int i = 0; i < k1; ++i) {
      terms.clear();
      for (int j = 0; j < k2; ++j)
        terms.push_back(static_cast<long double>(p.w2[static_cast<std::size_t>(j)]) *
                        std::exp((out.phi1[static_cast<std::size_t>(i)] +
                                  out.phi2[static_cast<std::size_t>(j)] -
                                  p.cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) /
                                 eps));
      worst = std::max(worst, std::fabs(kahan_total(terms) - 1.0L));
    }
    for (int j = 0; j < k2; ++j) {
      terms.clear();
      for (int i = 0; i < k1; ++i)
        terms.push_back(static_cast<long double>(p.w1[static_cast<std::size_t>(i)]) *
                        std::exp((out.phi1[static_cast<std::size_t>(i)] +
                                  out.phi2[static_cast<std::size_t>(j)] -
                                  p.cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) /
                                 eps));
      worst = std::max(worst, std::fabs(kahan_total(terms) - 1.0L));
    }
    return worst;
  };

  for (out.sweeps = 0; out.sweeps < kMaxSweeps; ++out.sweeps) {
    for (int i = 0; i < k1; ++i) {
      terms.clear();
      for (int j = 0; j < k2; ++j)
        terms.push_back(static_cast<long double>(p.w2[static_cast<std::size_t>(j)]) *
                        std::exp((out.phi2[static_cast<std::size_t>(j)] -
                                  p.cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) /
                                 eps));
      out.phi1[static_cast<std::size_t>(i)] = -eps * std::log(kahan_total(terms));
    }
    for (int j = 0; j < k2; ++j) {
      terms.clear();
      for (int i = 0; i < k1; ++i)
        terms.push_back(static_cast<long double>(p.w1[static_cast<std::size_t>(i)]) *
                        std::exp((out.phi1[static_cast<std::size_t>(i)] -
                                  p.cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) /
                                 eps));
      out.phi2[static_cast<std::size_t>(j)] = -eps * std::log(kahan_total(terms));
    }
    out.residual = marginal_residual();
    if (out.residual <= kResidualTarget) {
      const long double a = (out.phi1[static_cast<std::size_t>(ref1)] -
                             out.phi2[static_cast<std::size_t>(ref2)]) / 2.0L;
      for (auto& v : out.phi1) v -= a;
      for (auto& v : out.phi2) v += a;
      ++out.sweeps;
      return out;
    }
  }
  throw std::runtime_error("oracle: no convergence within the sweep limit");
}

long double primal_value(const Problem& p, const Potentials& pot) {
  validate(p);
  const int k1 = static_cast<int>(p.w1.size()), k2 = static_cast<int>(p.w2.size());
  const long double eps = p.epsilon;
  std::vector<long double> terms;
  for (int i = 0; i < k1; ++i)
    for (int j = 0; j < k2; ++j) {
      const long double c = p.cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      const long double r = (pot.phi1[static_cast<std::size_t>(i)] +
                             pot.phi2[static_cast<std::size_t>(j)] - c) / eps;
      const long double mass = static_cast<long double>(p.w1[static_cast<std::size_t>(i)]) *
                               static_cast<long double>(p.w2[static_cast<std::size_t>(j)]) *
                               std::exp(r);
      terms.push_back(mass * (c + eps * r));
    }
  return kahan_total(terms);
}

namespace {

// Primal objective of an explicit 2 x 2 coupling parameterized by its (0, 0)
// entry t; vanishing entries contribute zero to the entropy term.
long double objective_2x2(const Problem& p, long double t) {
  const long double a1 = p.w1[0], b1 = p.w2[0];
  const long double plan[2][2] = {{t, a1 - t}, {b1 - t, 1.0L - a1 - b1 + t}};
  std::vector<long double> terms;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const long double q = plan[i][j];
      if (q <= 0.0L) continue;
      const long double ref = static_cast<long double>(p.w1[static_cast<std::size_t>(i)]) *
                              static_cast<long double>(p.w2[static_cast<std::size_t>(j)]);
      terms.push_back(q * p.cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +
                      static_cast<long double>(p.epsilon) * q * std::log(q / ref));
    }
  return kahan_total(terms);
}

}  // namespace

long double primal_minimum_small(const Problem& p) {
  validate(p);
  const std::size_t k1 = p.w1.size(), k2 = p.w2.size();
  if (k1 == 1 || k2 == 1) {
    // One-row or one-column couplings are forced by the marginals and carry
    // zero relative entropy.
    std::vector<long double> terms;
    for (std::size_t i = 0; i < k1; ++i)
      for (std::size_t j = 0; j < k2; ++j)
        terms.push_back(static_cast<long double>(p.w1[i]) * static_cast<long double>(p.w2[j]) *
                        p.cost[i][j]);
    return kahan_total(terms);
  }
  if (k1 != 2 || k2 != 2)
    throw std::invalid_argument("oracle: direct minimization handles supports up to 2 x 2");

  const long double a1 = p.w1[0], b1 = p.w2[0];
  const long double lo = std::max(0.0L, a1 + b1 - 1.0L);
  const long double hi = std::min(a1, b1);

  const int grid = 2000;
  long double best_t = lo, best = objective_2x2(p, lo);
  for (int g = 1; g <= grid; ++g) {
    const long double t = lo + (hi - lo) * static_cast<long double>(g) / grid;
    const long double v = objective_2x2(p, t);
    if (v < best) {
      best = v;
      best_t = t;
    }
  }

  const long double h = (hi - lo) / grid;
  long double a = std::max(lo, best_t - h), b = std::min(hi, best_t + h);
  const long double inv_phi = 0.6180339887498948482L;
  long double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  long double f1 = objective_2x2(p, x1), f2 = objective_2x2(p, x2);
  for (int it = 0; it < 200 && b - a > 1e-30L; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = objective_2x2(p, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = objective_2x2(p, x2);
    }
  }
  return std::min({best, f1, f2});
}

}  // namespace oracle
