#pragma once

#include "entropic/sinkhorn.hpp"

namespace entropic {

// Sinkhorn divergence decomposition
//   sbar = s12 - (s11 + s22) / 2
// where s12 is the entropic cost between the two inputs and s11, s22 the
// self costs, all primal values at the shared config. The self problems are
// solved in the symmetric phi1 == phi2 representation. Identical inputs share
// one solve across all three terms, so sbar is exactly zero there.
struct DivergenceBundle {
  double s12, s11, s22, sbar;
  EotSolution sol12, sol11, sol22;
};

DivergenceBundle sinkhorn_divergence(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                                     const CostSpec& cost, const SinkhornConfig& config);

// Dual form of the divergence,
//   int (phi1_cross - phi1_self) dmu1 + int (phi2_cross - phi2_self) dmu2;
// agrees with bundle.sbar up to solver tolerance.
double sinkhorn_divergence_dual(const DivergenceBundle& b);

// Plug-in variance of the limiting normal law of sqrt(n) (sbar_n - sbar):
//   Var_mu1(phi1_cross - phi1_self) + Var_mu2(phi2_cross - phi2_self),
// weighted population variances. Invariant under gauge shifts; zero when both
// measures are point masses.
double asymptotic_variance(const DivergenceBundle& b);

}  // namespace entropic
