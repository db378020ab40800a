#include "entropic/independence.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "replicate_util.hpp"

namespace entropic {

namespace {

// Largest product support the direct (non-separable cost) path will solve;
// beyond this the self problem's matrix alone is in the hundreds of MB.
constexpr int kDirectProductAtoms = 3000;

std::string point_key(const Eigen::MatrixXd& pts, int i) {
  std::string key(sizeof(double) * static_cast<std::size_t>(pts.cols()), '\0');
  for (int j = 0; j < pts.cols(); ++j) {
    const double v = pts(i, j);
    std::memcpy(key.data() + sizeof(double) * static_cast<std::size_t>(j), &v, sizeof(double));
  }
  return key;
}

// Index of every sample row in the merged support (same bitwise identity and
// first-occurrence order as DiscreteMeasure's merging).
std::vector<int> merged_index(const Eigen::MatrixXd& rows, int merged_size) {
  std::unordered_map<std::string, int> index;
  index.reserve(static_cast<std::size_t>(rows.rows()));
  std::vector<int> out(static_cast<std::size_t>(rows.rows()));
  for (int i = 0; i < rows.rows(); ++i) {
    auto [it, inserted] =
        index.try_emplace(point_key(rows, i), static_cast<int>(index.size()));
    out[static_cast<std::size_t>(i)] = it->second;
  }
  if (static_cast<int>(index.size()) != merged_size)
    throw std::logic_error("independence: inconsistent support merge");
  return out;
}

double primal_value(const CostMatrix& C, const Eigen::VectorXd& w1, const Eigen::VectorXd& w2,
                    const Eigen::VectorXd& phi1, const Eigen::VectorXd& phi2, double eps) {
  double cost_term = 0.0, kl_term = 0.0;
  for (Eigen::Index i = 0; i < C.rows(); ++i) {
    const double p1 = phi1[i];
    const double wi = w1[i];
    for (Eigen::Index j = 0; j < C.cols(); ++j) {
      const double c = C(i, j);
      const double r = (p1 + phi2[j] - c) / eps;
      const double p = wi * w2[j] * std::exp(r);
      cost_term += c * p;
      kl_term += p * r;
    }
  }
  return cost_term + eps * kl_term;
}

// Quadratic-cost evaluator. The quadratic cost adds across the v and w
// blocks, so the product-of-marginals self problem factorizes into the two
// marginal self problems and every cost matrix assembles from two merged
// marginal blocks; permutations of the w column only re-index those blocks.
class SeparableWorkspace {
 public:
  SeparableWorkspace(const PairedSample& s, const CostSpec& cost, const SinkhornConfig& config)
      : config_(config),
        mv_(DiscreteMeasure::from_samples(s.v)),
        mw_(DiscreteMeasure::from_samples(s.w)),
        iv_(merged_index(s.v, mv_.size())),
        iw_(merged_index(s.w, mw_.size())),
        n_(s.size()) {
    Cv_ = build_cost_matrix(mv_, mv_, cost);
    Cw_ = build_cost_matrix(mw_, mw_, cost);
    // Exact block symmetry keeps every assembled self matrix exactly
    // symmetric, as the symmetric solve path expects.
    for (int i = 0; i < Cv_.rows(); ++i)
      for (int j = 0; j < i; ++j) Cv_(i, j) = Cv_(j, i);
    for (int i = 0; i < Cw_.rows(); ++i)
      for (int j = 0; j < i; ++j) Cw_(i, j) = Cw_(j, i);

    lwv_ = mv_.weights().array().log();
    lww_ = mw_.weights().array().log();
    const int kv = mv_.size(), kw = mw_.size();
    wprod_.resize(static_cast<Eigen::Index>(kv) * kw);
    lwprod_.resize(static_cast<Eigen::Index>(kv) * kw);
    for (int k = 0; k < kv; ++k)
      for (int l = 0; l < kw; ++l) {
        wprod_[static_cast<Eigen::Index>(k) * kw + l] = mv_.weights()[k] * mw_.weights()[l];
        lwprod_[static_cast<Eigen::Index>(k) * kw + l] = lwv_[k] + lww_[l];
      }

    // Product self cost via the factorization: potentials add across blocks,
    // the plan is the product plan, and the primal value splits as a sum.
    const MatrixSolveResult rv = solve_on_matrix(Cv_, lwv_, lwv_, config_, true);
    const MatrixSolveResult rw = solve_on_matrix(Cw_, lww_, lww_, config_, true);
    s22_ = primal_value(Cv_, mv_.weights(), mv_.weights(), rv.phi1, rv.phi2, config_.epsilon) +
           primal_value(Cw_, mw_.weights(), mw_.weights(), rw.phi1, rw.phi2, config_.epsilon);
  }

  int n() const { return n_; }

  // Divergence between the empirical measure of the pairs (v_r, w_{pairing(r)})
  // and the fixed product of marginals.
  double eval(const std::vector<int>& pairing) const {
    const int kv = mv_.size(), kw = mw_.size();
    // Merge the paired atoms: identity is the merged-index pair (a, b).
    std::unordered_map<long long, int> seen;
    seen.reserve(static_cast<std::size_t>(n_));
    std::vector<int> a, b;
    std::vector<double> count;
    a.reserve(static_cast<std::size_t>(n_));
    b.reserve(static_cast<std::size_t>(n_));
    for (int r = 0; r < n_; ++r) {
      const int av = iv_[static_cast<std::size_t>(r)];
      const int bw = iw_[static_cast<std::size_t>(pairing[static_cast<std::size_t>(r)])];
      const long long key = static_cast<long long>(av) * kw + bw;
      auto [it, inserted] = seen.try_emplace(key, static_cast<int>(a.size()));
      if (inserted) {
        a.push_back(av);
        b.push_back(bw);
        count.push_back(1.0);
      } else {
        count[static_cast<std::size_t>(it->second)] += 1.0;
      }
    }
    const int kj = static_cast<int>(a.size());
    Eigen::VectorXd wj(kj), lwj(kj);
    for (int r = 0; r < kj; ++r) {
      wj[r] = count[static_cast<std::size_t>(r)] / static_cast<double>(n_);
      lwj[r] = std::log(wj[r]);
    }

    // Cross matrix joint x product, assembled by adds from the two blocks.
    CostMatrix M(kj, static_cast<Eigen::Index>(kv) * kw);
    for (int r = 0; r < kj; ++r) {
      double* row = M.data() + static_cast<long long>(r) * kv * kw;
      const double* cw_row = Cw_.data() + static_cast<long long>(b[static_cast<std::size_t>(r)]) * kw;
      const double* cv_row = Cv_.data() + static_cast<long long>(a[static_cast<std::size_t>(r)]) * kv;
      for (int k = 0; k < kv; ++k) {
        const double cv = cv_row[k];
        double* cell = row + static_cast<long long>(k) * kw;
        for (int l = 0; l < kw; ++l) cell[l] = cv + cw_row[l];
      }
    }
    const MatrixSolveResult cross = solve_on_matrix(M, lwj, lwprod_, config_, false);
    const double s12 = primal_value(M, wj, wprod_, cross.phi1, cross.phi2, config_.epsilon);

    // Joint self problem at joint support size.
    CostMatrix Mj(kj, kj);
    for (int r = 0; r < kj; ++r)
      for (int s = 0; s < kj; ++s)
        Mj(r, s) = Cv_(a[static_cast<std::size_t>(r)], a[static_cast<std::size_t>(s)]) +
                   Cw_(b[static_cast<std::size_t>(r)], b[static_cast<std::size_t>(s)]);
    const MatrixSolveResult selfj = solve_on_matrix(Mj, lwj, lwj, config_, true);
    const double s11 = primal_value(Mj, wj, wj, selfj.phi1, selfj.phi2, config_.epsilon);

    return s12 - 0.5 * (s11 + s22_);
  }

 private:
  SinkhornConfig config_;
  DiscreteMeasure mv_, mw_;
  std::vector<int> iv_, iw_;
  int n_;
  CostMatrix Cv_, Cw_;
  Eigen::VectorXd lwv_, lww_, wprod_, lwprod_;
  double s22_ = 0.0;
};

std::vector<int> identity_pairing(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
  return p;
}

double statistic_general(const PairedSample& s, const CostSpec& cost,
                         const SinkhornConfig& config) {
  const DiscreteMeasure joint = joint_measure(s);
  const DiscreteMeasure prod = product_marginals(s);
  if (prod.size() > kDirectProductAtoms)
    throw std::invalid_argument(
        "independence: product support too large for a non-separable cost; "
        "subsample the data or use the quadratic cost");
  return sinkhorn_divergence(joint, prod, cost, config).sbar;
}

void check_cap(const PairedSample& s, int cap) {
  if (cap < 1) throw std::invalid_argument("independence: cap must be positive");
  if (s.size() > cap)
    throw std::invalid_argument(
        "independence: n = " + std::to_string(s.size()) + " exceeds the cap " +
        std::to_string(cap) +
        " (the product side has n^2 atoms); subsample the data or raise the cap knowingly");
}

}  // namespace

double independence_statistic(const PairedSample& s, const CostSpec& cost,
                              const SinkhornConfig& config, int cap) {
  check_cap(s, cap);
  if (cost.name == "quadratic") {
    SeparableWorkspace ws(s, cost, config);
    return ws.eval(identity_pairing(s.size()));
  }
  return statistic_general(s, cost, config);
}

IndependenceResult independence_test(const PairedSample& s, int B, const CostSpec& cost,
                                     const SinkhornConfig& config, std::uint64_t seed,
                                     int cap) {
  check_cap(s, cap);
  if (s.size() < 4) throw std::invalid_argument("independence test: need n >= 4");
  if (B < 1) throw std::invalid_argument("independence test: need B >= 1");
  const int n = s.size();
  const double nd = static_cast<double>(n);

  IndependenceResult res;
  res.n = n;

  std::vector<double> scaled_replicates;
  if (cost.name == "quadratic") {
    const SeparableWorkspace ws(s, cost, config);
    res.d_n = ws.eval(identity_pairing(n));
    res.scaled = nd * res.d_n;
    scaled_replicates = detail::run_replicates(B, [&](int b) {
      Rng rng(seed + static_cast<std::uint64_t>(b));
      return nd * ws.eval(rng.permutation(n));
    });
  } else {
    res.d_n = statistic_general(s, cost, config);
    res.scaled = nd * res.d_n;
    scaled_replicates = detail::run_replicates(B, [&](int b) {
      Rng rng(seed + static_cast<std::uint64_t>(b));
      const std::vector<int> perm = rng.permutation(n);
      Eigen::MatrixXd wp(s.w.rows(), s.w.cols());
      for (int r = 0; r < n; ++r) wp.row(r) = s.w.row(perm[static_cast<std::size_t>(r)]);
      return nd * statistic_general(PairedSample(s.v, wp), cost, config);
    });
  }

  int ge = 0;
  for (double v : scaled_replicates)
    if (v >= res.scaled) ++ge;
  res.p_value = (1.0 + ge) / (1.0 + static_cast<double>(B));

  std::sort(scaled_replicates.begin(), scaled_replicates.end());
  res.calibration.statistic_name = "scaled_independence_statistic_permutation";
  res.calibration.observed = res.scaled;
  res.calibration.replicates = std::move(scaled_replicates);
  res.calibration.n = n;
  res.calibration.m = 0;
  res.calibration.seed = seed;
  return res;
}

UStatCheck ustat_decomposition_check(
    const PairedSample& s,
    const std::function<double(const Eigen::RowVectorXd&, const Eigen::RowVectorXd&)>& f) {
  const int n = s.size();
  if (n < 2) throw std::invalid_argument("ustat check: need n >= 2");
  if (!f) throw std::invalid_argument("ustat check: missing function");

  Eigen::MatrixXd F(n, n);
  for (int i = 0; i < n; ++i) {
    const Eigen::RowVectorXd vi = s.v.row(i);
    for (int j = 0; j < n; ++j) F(i, j) = f(vi, s.w.row(j));
  }
  if (!F.allFinite()) throw std::invalid_argument("ustat check: f produced non-finite values");

  double u = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      u += F(i, i) + F(j, j) - F(i, j) - F(j, i);
    }
  u /= static_cast<double>(n) * (static_cast<double>(n) - 1.0);

  const double joint_mean = F.diagonal().mean();
  const double prod_mean = F.mean();

  UStatCheck out;
  out.u_n = u;
  out.two_delta = 2.0 * (joint_mean - prod_mean);
  out.remainder = out.u_n - out.two_delta;
  out.bound = 4.0 * F.cwiseAbs().maxCoeff() / static_cast<double>(n);
  return out;
}

}  // namespace entropic
