//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef S2G_RNG_HPP_
#define S2G_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>

namespace s2g {

// Deterministic random source. The normal sampler is a hand-rolled
// Box-Muller transform instead of std::normal_distribution, whose output
// is not pinned down by the standard and varies across library versions.
// Reproducibility of training runs and sampling depends on this class
// producing the same stream for the same seed on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
  }

  // Standard normal via Box-Muller; generates pairs, caches the second.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace s2g

#endif  // S2G_RNG_HPP_
