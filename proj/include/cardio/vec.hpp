#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace cardio {

// Small dense vector kernels shared by the solvers. All loops are sequential,
// so results are bitwise reproducible for identical inputs.

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
}

inline double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// Projects x onto the zero-mean subspace (orthogonal complement of constants).
inline void remove_mean(std::span<double> x) {
  const double m = mean(x);
  for (double& v : x) v -= m;
}

inline std::vector<double> zeros(std::size_t n) { return std::vector<double>(n, 0.0); }

// Deterministic pseudo-random vector generator (xorshift64*), used where a
// solver needs an arbitrary but reproducible start vector.
class DeterministicSequence {
 public:
  explicit DeterministicSequence(std::uint64_t seed = 0x9e3779b97f4a7c15ull) : state_(seed) {
    if (state_ == 0) state_ = 1;
  }

  double next_unit() {  // uniform in (-1, 1)
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    const std::uint64_t z = state_ * 0x2545f4914f6cdd1dull;
    return 2.0 * (static_cast<double>(z >> 11) / 9007199254740992.0) - 1.0;
  }

  std::vector<double> vector(std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = next_unit();
    return v;
  }

 private:
  std::uint64_t state_;
};

}  // namespace cardio
