#pragma once

#include <vector>

// Slow reference implementations used only by tests: exp-domain alternating
// scaling in long double with compensated sums, and direct primal
// minimization for tiny supports. Independent of the library's log-domain
// solver in both arithmetic and algorithm.
namespace oracle {

struct Problem {
  std::vector<std::vector<double>> cost;  // k1 x k2
  std::vector<double> w1, w2;             // strictly positive, each sums to 1
  double epsilon = 1.0;
};

struct Potentials {
  std::vector<long double> phi1, phi2;
  long double residual = 0.0;  // max marginal violation at exit
  int sweeps = 0;
};

// Alternating fixed point iterated until both marginal residuals are below
// 1e-14 (throws after 1e6 sweeps), then normalized so that
// phi1[ref1] == phi2[ref2].
Potentials solve(const Problem& p, int ref1 = 0, int ref2 = 0);

// cost term + epsilon * KL(plan || w1 x w2) at the given potentials.
long double primal_value(const Problem& p, const Potentials& pot);

// Direct minimization of the primal over all couplings; supports of size one
// force the coupling, 2 x 2 reduces to one free parameter scanned and then
// refined by golden section. Throws for larger supports.
long double primal_minimum_small(const Problem& p);

}  // namespace oracle
