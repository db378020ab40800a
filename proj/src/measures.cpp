#include "entropic/measures.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace entropic {

namespace {

// Atoms are identified by the exact bit pattern of their coordinate row, so
// merging never invents ties that were not in the data (-0.0 and 0.0 differ).
std::string row_key(const Eigen::MatrixXd& pts, int i) {
  std::string key(sizeof(double) * static_cast<std::size_t>(pts.cols()), '\0');
  for (int j = 0; j < pts.cols(); ++j) {
    const double v = pts(i, j);
    std::memcpy(key.data() + sizeof(double) * static_cast<std::size_t>(j), &v, sizeof(double));
  }
  return key;
}

void check_points(const Eigen::MatrixXd& pts) {
  if (pts.rows() == 0 || pts.cols() == 0)
    throw std::invalid_argument("measure: need at least one point with at least one coordinate");
  if (!pts.allFinite()) throw std::invalid_argument("measure: points must be finite");
}

// Merges bitwise-duplicate rows; weights add. First-occurrence order.
void merge_rows(const Eigen::MatrixXd& pts, const Eigen::VectorXd& w,
                Eigen::MatrixXd& out_pts, Eigen::VectorXd& out_w) {
  const int n = static_cast<int>(pts.rows());
  std::unordered_map<std::string, int> index;
  index.reserve(static_cast<std::size_t>(n));
  std::vector<int> first;   // representative input row per merged atom
  std::vector<double> mass;
  first.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto [it, inserted] = index.try_emplace(row_key(pts, i), static_cast<int>(first.size()));
    if (inserted) {
      first.push_back(i);
      mass.push_back(w[i]);
    } else {
      mass[static_cast<std::size_t>(it->second)] += w[i];
    }
  }
  const int k = static_cast<int>(first.size());
  out_pts.resize(k, pts.cols());
  out_w.resize(k);
  for (int r = 0; r < k; ++r) {
    out_pts.row(r) = pts.row(first[static_cast<std::size_t>(r)]);
    out_w[r] = mass[static_cast<std::size_t>(r)];
  }
}

double kahan_total(const Eigen::VectorXd& w) {
  double s = 0.0, comp = 0.0;
  for (int i = 0; i < w.size(); ++i) {
    const double y = w[i] - comp;
    const double t = s + y;
    comp = (t - s) - y;
    s = t;
  }
  return s;
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(Eigen::MatrixXd points, Eigen::VectorXd weights) {
  check_points(points);
  if (points.rows() != weights.size())
    throw std::invalid_argument("measure: one weight per point required");
  for (int i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
      throw std::invalid_argument("measure: weights must be strictly positive and finite");
  }
  const double total = kahan_total(weights);
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("measure: weights must sum to one");
  if (total != 1.0) weights /= total;
  merge_rows(points, weights, points_, weights_);
}

DiscreteMeasure DiscreteMeasure::from_samples(const Eigen::MatrixXd& points) {
  check_points(points);
  const int n = static_cast<int>(points.rows());
  Eigen::MatrixXd merged;
  Eigen::VectorXd counts;
  merge_rows(points, Eigen::VectorXd::Ones(n), merged, counts);
  DiscreteMeasure m;
  m.points_ = std::move(merged);
  m.weights_ = counts / static_cast<double>(n);
  return m;
}

bool DiscreteMeasure::operator==(const DiscreteMeasure& other) const {
  if (points_.rows() != other.points_.rows() || points_.cols() != other.points_.cols())
    return false;
  if (std::memcmp(points_.data(), other.points_.data(),
                  sizeof(double) * static_cast<std::size_t>(points_.size())) != 0)
    return false;
  return std::memcmp(weights_.data(), other.weights_.data(),
                     sizeof(double) * static_cast<std::size_t>(weights_.size())) == 0;
}

Eigen::MatrixXd DiscreteMeasure::sample(int n, Rng& rng) const {
  if (n < 1) throw std::invalid_argument("sample: need n >= 1");
  Eigen::VectorXd cdf(weights_.size());
  double acc = 0.0;
  for (int i = 0; i < weights_.size(); ++i) {
    acc += weights_[i];
    cdf[i] = acc;
  }
  cdf[weights_.size() - 1] = 1.0;
  Eigen::MatrixXd out(n, points_.cols());
  for (int r = 0; r < n; ++r) {
    const double u = rng.uniform01();
    int lo = 0, hi = static_cast<int>(weights_.size()) - 1;
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (u < cdf[mid])
        hi = mid;
      else
        lo = mid + 1;
    }
    out.row(r) = points_.row(lo);
  }
  return out;
}

DiscreteMeasure::DiscreteMeasure() = default;

PairedSample::PairedSample(Eigen::MatrixXd v_in, Eigen::MatrixXd w_in)
    : v(std::move(v_in)), w(std::move(w_in)) {
  check_points(v);
  check_points(w);
  if (v.rows() != w.rows())
    throw std::invalid_argument("paired sample: v and w must have the same number of rows");
}

Eigen::MatrixXd PairedSample::joined() const {
  Eigen::MatrixXd j(v.rows(), v.cols() + w.cols());
  j << v, w;
  return j;
}

DiscreteMeasure pool(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("pool: dimension mismatch");
  Eigen::MatrixXd pts(a.size() + b.size(), a.dim());
  pts << a.points(), b.points();
  Eigen::VectorXd w(a.size() + b.size());
  w << a.weights() / 2.0, b.weights() / 2.0;
  return DiscreteMeasure(std::move(pts), std::move(w));
}

DiscreteMeasure joint_measure(const PairedSample& s) {
  return DiscreteMeasure::from_samples(s.joined());
}

DiscreteMeasure product_marginals(const PairedSample& s) {
  const int n = s.size();
  const int d1 = static_cast<int>(s.v.cols());
  const int d2 = static_cast<int>(s.w.cols());
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(n) * n, d1 + d2);
  Eigen::Index r = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j, ++r) {
      pts.block(r, 0, 1, d1) = s.v.row(i);
      pts.block(r, d1, 1, d2) = s.w.row(j);
    }
  const double wn = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  return DiscreteMeasure(std::move(pts), Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n) * n, wn));
}

Eigen::MatrixXd sample_uniform_box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                   int n, std::uint64_t seed) {
  if (lower.size() != upper.size() || lower.size() == 0)
    throw std::invalid_argument("sample_uniform_box: bounds must have equal nonzero dimension");
  for (int k = 0; k < lower.size(); ++k)
    if (!(lower[k] < upper[k]))
      throw std::invalid_argument("sample_uniform_box: need lower < upper in every coordinate");
  if (n < 1) throw std::invalid_argument("sample_uniform_box: need n >= 1");
  Rng rng(seed);
  Eigen::MatrixXd pts(n, lower.size());
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < lower.size(); ++k) pts(i, k) = rng.uniform(lower[k], upper[k]);
  return pts;
}

namespace {

bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    std::string field = line.substr(pos, comma - pos);
    // Trim blanks and a possible trailing carriage return.
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
      field.pop_back();
    std::size_t start = 0;
    while (start < field.size() && (field[start] == ' ' || field[start] == '\t')) ++start;
    field = field.substr(start);
    if (field.empty()) return false;
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size()) return false;
    out.push_back(v);
    pos = comma + 1;
    if (comma == line.size()) break;
  }
  return !out.empty();
}

}  // namespace

Eigen::MatrixXd load_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open points file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    if (!parse_row(line, row)) {
      if (first) {
        first = false;  // header row
        continue;
      }
      throw std::invalid_argument(path + ": unparseable row at line " + std::to_string(line_no));
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument(path + ": inconsistent column count at line " + std::to_string(line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument(path + ": no data rows");
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j)
      pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  if (!pts.allFinite()) throw std::invalid_argument(path + ": points must be finite");
  return pts;
}

void save_points_csv(const std::string& path, const Eigen::MatrixXd& points) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write points file: " + path);
  char buf[64];
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", points(i, j));
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw std::invalid_argument("write failed: " + path);
}

}  // namespace entropic
