#pragma once

#include <cstdint>
#include <random>

#include "jacobi2p/types.hpp"

namespace jacobi2p {

/// Seeded generator with portable uniform draws (bit-identical across
/// standard libraries, unlike std::uniform_real_distribution).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  /// Uniform over the disk |z| <= r.
  Complex in_disk(double r) {
    while (true) {
      const double x = uniform(-1.0, 1.0), y = uniform(-1.0, 1.0);
      if (x * x + y * y <= 1.0) return {r * x, r * y};
    }
  }

  Complex in_rect(Complex lo, Complex hi) {
    return {uniform(lo.real(), hi.real()), uniform(lo.imag(), hi.imag())};
  }

  int index(int n) { return static_cast<int>(eng_() % static_cast<std::uint64_t>(n)); }

  bool flip() { return (eng_() & 1u) != 0; }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace jacobi2p
