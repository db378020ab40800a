#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace entropic {

// Deterministic random stream with a 64-bit seed contract: identical seeds
// give identical output on every platform. Built on mt19937_64; all
// conversions (uniform doubles, bounded integers) are done by hand rather
// than through std distributions, whose output is implementation-defined.
// Independent replicate streams are derived as seed = base_seed + index.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  // Uniform on [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform on {0, ..., n-1} via rejection (exact, no modulo bias).
  std::uint64_t uniform_index(std::uint64_t n);

  // Fisher-Yates permutation of {0, ..., n-1}.
  std::vector<int> permutation(int n);

  // Standard normal (Box-Muller, spare value cached).
  double normal();

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace entropic
