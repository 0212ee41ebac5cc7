// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef WPTBEAM_RNG_HPP_
#define WPTBEAM_RNG_HPP_

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace wptbeam {

// splitmix64 step; also used to derive independent per-trial seeds.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for trial `index` of a run keyed by `base_seed`. Independent of the
// order trials execute in, so parallel and sequential runs agree.
inline std::uint64_t derive_trial_seed(std::uint64_t base_seed,
                                       std::uint64_t index) {
  std::uint64_t s = base_seed;
  (void)splitmix64_next(s);
  s ^= 0xa0761d6478bd642fULL * (index + 1);
  return splitmix64_next(s);
}

// xoshiro256++ with splitmix64 seeding. Fixed algorithm, not the C++
// standard library engines, so streams are reproducible across platforms
// and languages.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64_next(s);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in (0, 1]: 53-bit mantissa, never exactly zero.
  double next_unit_open() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Uniform double in [0, 1).
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal pair via the Box-Muller transform.
  void next_gaussian_pair(double& z0, double& z1) {
    const double u1 = next_unit_open();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    z0 = r * std::cos(phi);
    z1 = r * std::sin(phi);
  }

  // Circular-symmetric complex Gaussian with unit variance per entry.
  std::complex<double> next_cscg_unit() {
    double z0 = 0.0, z1 = 0.0;
    next_gaussian_pair(z0, z1);
    return {z0 * std::numbers::sqrt2 / 2.0, z1 * std::numbers::sqrt2 / 2.0};
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4] = {};
};

}  // namespace wptbeam

#endif  // WPTBEAM_RNG_HPP_
