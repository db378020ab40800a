#include "entropic/potentials.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace entropic {

namespace {

// Log-domain softmax weights over the opposite support:
//   p_j(x) proportional to exp((phi_j - c(x, y_j)) / eps) * w_j.
// Returns the weights through `p` and the stabilized log normalizer.
double softmax_weights(const EotSolution& sol, const Eigen::RowVectorXd& x, int side,
                       Eigen::VectorXd& p) {
  const bool side1 = (side == 1);
  const DiscreteMeasure& other = side1 ? sol.mu2() : sol.mu1();
  const Eigen::VectorXd& phi = side1 ? sol.phi2() : sol.phi1();
  const double eps = sol.epsilon();
  if (x.size() != other.dim())
    throw std::invalid_argument("potential extension: query dimension mismatch");
  const int k = other.size();
  Eigen::VectorXd arg(k);
  for (int j = 0; j < k; ++j) {
    const double c = sol.cost().evaluate(x, other.point(j));
    if (!std::isfinite(c))
      throw std::invalid_argument("potential extension: cost not finite at query");
    arg[j] = (phi[j] - c) / eps + std::log(other.weights()[j]);
  }
  const double m = arg.maxCoeff();
  p.resize(k);
  double acc = 0.0;
  for (int j = 0; j < k; ++j) {
    p[j] = std::exp(arg[j] - m);
    acc += p[j];
  }
  p /= acc;
  return std::log(acc) + m;
}

}  // namespace

double extend_potential(const EotSolution& sol, const Eigen::RowVectorXd& x, int side) {
  if (side != 1 && side != 2)
    throw std::invalid_argument("extend_potential: side must be 1 or 2");
  Eigen::VectorXd p;
  const double lse = softmax_weights(sol, x, side, p);
  return -sol.epsilon() * lse;
}

Eigen::RowVectorXd grad_potential_1(const EotSolution& sol, const Eigen::RowVectorXd& x) {
  if (!sol.cost().grad_x)
    throw std::invalid_argument("grad_potential_1: cost has no gradient");
  Eigen::VectorXd p;
  softmax_weights(sol, x, 1, p);
  Eigen::RowVectorXd g = Eigen::RowVectorXd::Zero(x.size());
  for (int j = 0; j < sol.mu2().size(); ++j)
    g += p[j] * sol.cost().grad_x(x, sol.mu2().point(j));
  return g;
}

MapEvaluation entropic_map(const EotSolution& sol, const Eigen::RowVectorXd& x) {
  if (sol.cost().name != "quadratic")
    throw std::invalid_argument("entropic map requires quadratic cost");
  Eigen::VectorXd p;
  softmax_weights(sol, x, 1, p);
  MapEvaluation e;
  e.query = x;
  e.barycentric = p.transpose() * sol.mu2().points();
  Eigen::RowVectorXd g = Eigen::RowVectorXd::Zero(x.size());
  for (int j = 0; j < sol.mu2().size(); ++j) g += p[j] * (x - sol.mu2().point(j));
  e.gradient_form = x - g;
  return e;
}

std::vector<MapEvaluation> entropic_map(const EotSolution& sol, const Eigen::MatrixXd& grid) {
  std::vector<MapEvaluation> out;
  out.reserve(static_cast<std::size_t>(grid.rows()));
  for (Eigen::Index i = 0; i < grid.rows(); ++i)
    out.push_back(entropic_map(sol, Eigen::RowVectorXd(grid.row(i))));
  return out;
}

Eigen::MatrixXd uniform_grid(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                             int resolution) {
  const int d = static_cast<int>(lower.size());
  if (d == 0 || upper.size() != d)
    throw std::invalid_argument("uniform_grid: bounds must have equal nonzero dimension");
  if (resolution < 2) throw std::invalid_argument("uniform_grid: resolution must be >= 2");
  for (int k = 0; k < d; ++k)
    if (!(lower[k] <= upper[k])) throw std::invalid_argument("uniform_grid: need lower <= upper");
  long long total = 1;
  for (int k = 0; k < d; ++k) {
    total *= resolution;
    if (total > 1000000) throw std::invalid_argument("uniform_grid: too many grid points");
  }
  Eigen::MatrixXd grid(total, d);
  for (long long r = 0; r < total; ++r) {
    long long rem = r;
    for (int k = d - 1; k >= 0; --k) {
      const int idx = static_cast<int>(rem % resolution);
      rem /= resolution;
      grid(r, k) = lower[k] + (upper[k] - lower[k]) * idx / (resolution - 1);
    }
  }
  return grid;
}

Eigen::MatrixXd default_grid(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2) {
  if (mu1.dim() != mu2.dim()) throw std::invalid_argument("default_grid: dimension mismatch");
  const int d = mu1.dim();
  Eigen::VectorXd lo = mu1.points().colwise().minCoeff().cwiseMin(
      mu2.points().colwise().minCoeff());
  Eigen::VectorXd hi = mu1.points().colwise().maxCoeff().cwiseMax(
      mu2.points().colwise().maxCoeff());
  int res = static_cast<int>(std::floor(std::pow(64.0, 1.0 / d) + 1e-9));
  res = std::max(res, 2);
  // Degenerate axes (single coordinate value) keep a zero-width box.
  return uniform_grid(lo, hi, res);
}

Eigen::MatrixXd parse_grid_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  if (j.is_array()) {
    if (j.empty()) throw std::invalid_argument("grid: empty point list");
    const std::size_t d = j.front().is_array() ? j.front().size() : 1;
    if (d == 0) throw std::invalid_argument("grid: empty point");
    Eigen::MatrixXd grid(j.size(), d);
    for (std::size_t i = 0; i < j.size(); ++i) {
      const auto& row = j[i];
      if (row.is_number()) {
        if (d != 1) throw std::invalid_argument("grid: inconsistent point dimensions");
        grid(static_cast<Eigen::Index>(i), 0) = row.get<double>();
        continue;
      }
      if (!row.is_array() || row.size() != d)
        throw std::invalid_argument("grid: inconsistent point dimensions");
      for (std::size_t k = 0; k < d; ++k)
        grid(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k].get<double>();
    }
    if (!grid.allFinite()) throw std::invalid_argument("grid: points must be finite");
    return grid;
  }
  if (j.is_object() && j.contains("box")) {
    const auto& box = j["box"];
    const auto lo = box.at("lower").get<std::vector<double>>();
    const auto hi = box.at("upper").get<std::vector<double>>();
    if (lo.size() != hi.size() || lo.empty())
      throw std::invalid_argument("grid: box bounds must have equal nonzero dimension");
    const int res = j.value("resolution", 8);
    Eigen::VectorXd l = Eigen::Map<const Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size()));
    Eigen::VectorXd h = Eigen::Map<const Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size()));
    return uniform_grid(l, h, res);
  }
  throw std::invalid_argument("grid: expected a point list or {\"box\": ..., \"resolution\": ...}");
}

}  // namespace entropic
