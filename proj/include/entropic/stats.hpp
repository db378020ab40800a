#pragma once

#include <vector>

namespace entropic {

// Standard normal quantile (inverse CDF). Rational approximation refined by
// one Halley step on erfc; absolute error well below 1e-12 on (1e-300, 1-1e-16).
double normal_quantile(double p);

// Median of a sample (copies, averages the two middle order statistics).
double median(std::vector<double> values);

// Kolmogorov-Smirnov sup distance between the empirical CDF of `values`
// and the U[0,1] CDF.
double ks_uniform_distance(std::vector<double> values);

// Least-squares slope of y against x.
double regression_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace entropic
