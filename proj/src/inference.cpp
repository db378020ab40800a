#include "entropic/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "entropic/errors.hpp"
#include "entropic/potentials.hpp"
#include "entropic/stats.hpp"
#include "entropic/threads.hpp"
#include "replicate_util.hpp"

namespace entropic {

using detail::run_replicates;

namespace {

// Right-continuous empirical quantile: order statistic ceil(alpha * B).
double order_quantile(const std::vector<double>& sorted, double alpha) {
  if (sorted.empty()) throw std::invalid_argument("quantile: no replicates");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("quantile: alpha must be in (0, 1]");
  const double b = static_cast<double>(sorted.size());
  auto k = static_cast<std::size_t>(std::ceil(alpha * b));
  k = std::min(std::max<std::size_t>(k, 1), sorted.size());
  return sorted[k - 1];
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must be in (0, 1)");
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& pts, const std::vector<int>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), pts.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = pts.row(idx[r]);
  return out;
}

}  // namespace

double ResampleReport::quantile(double alpha) const { return order_quantile(replicates, alpha); }

double ResampleReport::rank_of_observed() const {
  if (replicates.empty()) throw std::invalid_argument("rank_of_observed: no replicates");
  const auto le = std::upper_bound(replicates.begin(), replicates.end(), observed);
  return static_cast<double>(le - replicates.begin()) / static_cast<double>(replicates.size());
}

std::string ResampleReport::to_json() const {
  nlohmann::json j;
  j["statistic_name"] = statistic_name;
  j["observed"] = observed;
  j["replicates"] = replicates;
  j["b"] = b();
  j["n"] = n;
  j["m"] = m;
  j["seed"] = seed;
  j["warning"] = warning;
  return j.dump(2);
}

void ResampleReport::write_csv(std::ostream& out) const {
  out << "index,value\n";
  char buf[64];
  for (std::size_t i = 0; i < replicates.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", replicates[i]);
    out << i << "," << buf << "\n";
  }
}

CltInterval clt_interval(const Eigen::MatrixXd& sample1, const Eigen::MatrixXd& sample2,
                         double alpha, const CostSpec& cost, const SinkhornConfig& config) {
  check_alpha(alpha);
  if (sample1.rows() != sample2.rows())
    throw std::invalid_argument("clt_interval: samples must have equal size");
  const int n = static_cast<int>(sample1.rows());
  const DiscreteMeasure m1 = DiscreteMeasure::from_samples(sample1);
  const DiscreteMeasure m2 = DiscreteMeasure::from_samples(sample2);
  const DivergenceBundle bundle = sinkhorn_divergence(m1, m2, cost, config);

  CltInterval ci;
  ci.sbar = bundle.sbar;
  ci.sigma2 = asymptotic_variance(bundle);
  ci.alpha = alpha;
  ci.n = n;
  ci.degenerate = ci.sigma2 < 1e-12;
  const double hw =
      normal_quantile(1.0 - alpha / 2.0) * std::sqrt(ci.sigma2 / static_cast<double>(n));
  ci.lo = ci.sbar - hw;
  ci.hi = ci.sbar + hw;
  return ci;
}

ResampleReport mn_bootstrap_null(const Eigen::MatrixXd& sample1, const Eigen::MatrixXd& sample2,
                                 int m, int B, const CostSpec& cost,
                                 const SinkhornConfig& config, std::uint64_t seed) {
  if (sample1.rows() != sample2.rows())
    throw std::invalid_argument("mn_bootstrap_null: samples must have equal size");
  if (sample1.cols() != sample2.cols())
    throw std::invalid_argument("mn_bootstrap_null: samples must have equal dimension");
  const int n = static_cast<int>(sample1.rows());
  if (m < 2) throw std::invalid_argument("mn_bootstrap_null: need m >= 2");
  if (m > n / 2)
    throw std::invalid_argument("mn_bootstrap_null: m must be at most n/2 (m out of n needs m << n)");
  if (B < 1) throw std::invalid_argument("mn_bootstrap_null: need B >= 1");

  const DiscreteMeasure m1 = DiscreteMeasure::from_samples(sample1);
  const DiscreteMeasure m2 = DiscreteMeasure::from_samples(sample2);
  const double observed =
      static_cast<double>(n) * sinkhorn_divergence(m1, m2, cost, config).sbar;

  // Pooled sample; replicates draw iid rows from it with replacement.
  Eigen::MatrixXd pooled(2 * n, sample1.cols());
  pooled << sample1, sample2;

  std::vector<double> values = run_replicates(B, [&](int b) {
    Rng rng(seed + static_cast<std::uint64_t>(b));
    Eigen::MatrixXd first(m, pooled.cols()), second(m, pooled.cols());
    for (int r = 0; r < m; ++r)
      first.row(r) = pooled.row(static_cast<Eigen::Index>(rng.uniform_index(2 * n)));
    for (int r = 0; r < m; ++r)
      second.row(r) = pooled.row(static_cast<Eigen::Index>(rng.uniform_index(2 * n)));
    const DiscreteMeasure b1 = DiscreteMeasure::from_samples(first);
    const DiscreteMeasure b2 = DiscreteMeasure::from_samples(second);
    return static_cast<double>(m) * sinkhorn_divergence(b1, b2, cost, config).sbar;
  });
  std::sort(values.begin(), values.end());

  ResampleReport report;
  report.statistic_name = "scaled_sinkhorn_divergence";
  report.observed = observed;
  report.replicates = std::move(values);
  report.n = n;
  report.m = m;
  report.seed = seed;
  if (m > n / 5)
    report.warning = "m exceeds n/5; the null bootstrap needs m small relative to n";
  return report;
}

std::string ConfidenceBand::to_json() const {
  nlohmann::json j;
  j["alpha"] = alpha;
  j["coordinate"] = coordinate;
  j["n"] = n;
  j["b"] = b;
  j["seed"] = seed;
  j["half_width"] = half_width;
  nlohmann::json pts = nlohmann::json::array();
  nlohmann::json ctr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    nlohmann::json p = nlohmann::json::array();
    for (Eigen::Index k = 0; k < grid.cols(); ++k) p.push_back(grid(i, k));
    pts.push_back(std::move(p));
    ctr.push_back(center[i]);
  }
  j["grid"] = std::move(pts);
  j["center"] = std::move(ctr);
  return j.dump(2);
}

void ConfidenceBand::write_csv(std::ostream& out) const {
  for (Eigen::Index k = 0; k < grid.cols(); ++k) out << "x" << (k + 1) << ",";
  out << "center,lower,upper\n";
  char buf[64];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf << sep;
  };
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    for (Eigen::Index k = 0; k < grid.cols(); ++k) put(grid(i, k), ',');
    put(center[i], ',');
    put(center[i] - half_width, ',');
    std::snprintf(buf, sizeof(buf), "%.17g", center[i] + half_width);
    out << buf << "\n";
  }
}

ConfidenceBand map_confidence_band(const DiscreteMeasure& mu1, const Eigen::MatrixXd& sample2,
                                   int coordinate, const Eigen::MatrixXd& grid, double alpha,
                                   int B, const CostSpec& cost, const SinkhornConfig& config,
                                   std::uint64_t seed) {
  check_alpha(alpha);
  if (B < 1) throw std::invalid_argument("map_confidence_band: need B >= 1");
  if (sample2.cols() != mu1.dim())
    throw std::invalid_argument("map_confidence_band: sample dimension mismatch");
  if (grid.cols() != mu1.dim())
    throw std::invalid_argument("map_confidence_band: grid dimension mismatch");
  if (grid.rows() < 1) throw std::invalid_argument("map_confidence_band: empty grid");
  if (coordinate < 0 || coordinate >= mu1.dim())
    throw std::invalid_argument("map_confidence_band: coordinate out of range");
  const int n = static_cast<int>(sample2.rows());
  const int G = static_cast<int>(grid.rows());
  const double root_n = std::sqrt(static_cast<double>(n));

  const DiscreteMeasure m2 = DiscreteMeasure::from_samples(sample2);
  const EotSolution center_sol = solve_schrodinger(mu1, m2, cost, config);
  Eigen::VectorXd center(G);
  {
    const auto evals = entropic_map(center_sol, grid);
    for (int g = 0; g < G; ++g) center[g] = evals[static_cast<std::size_t>(g)].barycentric[coordinate];
  }

  std::vector<double> sups = run_replicates(B, [&](int b) {
    Rng rng(seed + static_cast<std::uint64_t>(b));
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r)
      idx[static_cast<std::size_t>(r)] = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    const DiscreteMeasure mb = DiscreteMeasure::from_samples(take_rows(sample2, idx));
    const EotSolution sol = solve_schrodinger(mu1, mb, cost, config);
    const auto evals = entropic_map(sol, grid);
    double sup = 0.0;
    for (int g = 0; g < G; ++g)
      sup = std::max(sup, std::abs(evals[static_cast<std::size_t>(g)].barycentric[coordinate] - center[g]));
    return root_n * sup;
  });
  std::sort(sups.begin(), sups.end());

  ConfidenceBand band;
  band.grid = grid;
  band.center = std::move(center);
  band.half_width = order_quantile(sups, 1.0 - alpha) / root_n;
  band.alpha = alpha;
  band.coordinate = coordinate;
  band.n = n;
  band.b = B;
  band.seed = seed;
  return band;
}

}  // namespace entropic
