#pragma once

#include <cstdint>
#include <random>

#include "inverseset/types.hpp"

namespace inverseset {

/// Seedable generator with platform-independent output. mt19937_64 is
/// specified bit-exactly by the standard; the uniform/normal draws below
/// avoid std::uniform_real_distribution, whose output is
/// implementation-defined. Runs record the identifier so artifacts can
/// be reproduced anywhere.
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64/canonical53";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0,1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo,hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::uint64_t next_u64() { return engine_(); }

  Vec uniform_vec(std::size_t n, double lo, double hi) {
    Vec v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

  Mat uniform_mat(std::size_t rows, std::size_t cols, double lo, double hi) {
    Mat m(rows, cols);
    for (auto& x : m.data) x = uniform(lo, hi);
    return m;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace inverseset
