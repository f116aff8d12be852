#pragma once

#include <cstdint>
#include <random>

#include "quasispec/types.hpp"

namespace quasispec {

// Deterministic cross-platform random stream. std::mt19937_64's raw output is
// pinned by the standard; the scaling below is done by hand because
// std::uniform_real_distribution is implementation-defined.
class DetRng {
 public:
  explicit DetRng(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0, 1) with 53-bit resolution.
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform in [-1, 1).
  double sym() { return 2.0 * unit() - 1.0; }

  // Uniform in the square [-1,1) x [-1,1).
  Scalar csym() {
    const double re = sym();
    const double im = sym();
    return {re, im};
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace quasispec
