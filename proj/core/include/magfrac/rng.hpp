#pragma once

#include <cstdint>
#include <random>

#include "magfrac/types.hpp"

namespace magfrac {

/// Deterministic random numbers. std::mt19937_64 is pinned by the standard,
/// but the distribution adapters are not; the transforms here are written
/// out so streams are identical across platforms and library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via Box-Muller (pair cached).
  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Vec unit_vector(int dim) {
    Vec v(dim);
    double n2 = 0;
    do {
      for (int i = 0; i < dim; ++i) v[i] = gauss();
      n2 = v.norm2();
    } while (n2 < 1e-12);
    return (1.0 / std::sqrt(n2)) * v;
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0;
  bool have_spare_ = false;
};

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

}  // namespace magfrac
