#include "entropic/rng.hpp"

#include <cmath>
#include <numeric>

namespace entropic {

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) return 0;
  if ((n & (n - 1)) == 0) return gen_() & (n - 1);
  // Reject above the largest multiple of n to avoid modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = gen_();
  } while (x >= limit);
  return x % n;
}

std::vector<int> Rng::permutation(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(uniform_index(static_cast<std::uint64_t>(i) + 1));
    std::swap(p[i], p[j]);
  }
  return p;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 is kept away from zero so the log is finite.
  double u1 = 0.0;
  do {
    u1 = uniform01();
  } while (u1 <= 0.0);
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 6.283185307179586476925286766559 * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

}  // namespace entropic
