// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "wptbeam/fixedpoint.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "wptbeam/errors.hpp"

namespace wptbeam {

namespace {

constexpr int kZFracBits = 28;        // internal CORDIC precision (Q2.28)
constexpr int kPrescaleFloor = 1 << 20;
// atan(2^-k) in Q2.28, k = 0..13.
constexpr std::int64_t kAtanTable[kCordicIterations] = {
    210828714, 124459457, 65760959, 33381290, 16755422, 8385879, 4193963,
    2097109,   1048571,   524287,   262144,   131072,   65536,   32768};
constexpr std::int64_t kPiZ = 843314857;       // pi in Q2.28
constexpr std::int64_t kHalfPiZ = 421657428;   // pi/2 in Q2.28
// 1 / (CORDIC gain of k+1 iterations) in Q2.13, k = 0..13.
constexpr std::int32_t kGainInvRaw[kCordicIterations] = {
    5793, 5181, 5026, 4988, 4978, 4975, 4975, 4975, 4975, 4975, 4975, 4975,
    4975, 4975};

FxWord saturate(std::int64_t v, FxFlags& flags) {
  if (v > kFxMax) {
    flags.overflow = true;
    return kFxMax;
  }
  if (v < kFxMin) {
    flags.overflow = true;
    return kFxMin;
  }
  return static_cast<FxWord>(v);
}

// Rounds v / 2^shift to nearest, ties to even.
std::int64_t round_shift_half_even(std::int64_t v, int shift) {
  if (shift == 0) return v;
  std::int64_t q = v >> shift;
  const std::int64_t r = v & ((std::int64_t{1} << shift) - 1);
  const std::int64_t half = std::int64_t{1} << (shift - 1);
  if (r > half || (r == half && (q & 1))) ++q;
  return q;
}

// Rounds num / den to nearest, ties to even magnitude, sign symmetric.
std::int64_t round_div_half_even(std::int64_t num, std::int64_t den) {
  const bool neg = (num < 0) != (den < 0);
  const std::uint64_t n = static_cast<std::uint64_t>(std::llabs(num));
  const std::uint64_t d = static_cast<std::uint64_t>(std::llabs(den));
  std::uint64_t q = n / d;
  const std::uint64_t r = n % d;
  if (2 * r > d || (2 * r == d && (q & 1))) ++q;
  const std::int64_t sq = static_cast<std::int64_t>(q);
  return neg ? -sq : sq;
}

}  // namespace

FxWord fx_from_real(double v, FxFlags& flags) {
  if (std::isnan(v)) {
    flags.invalid = true;
    return 0;
  }
  const double scaled = v * static_cast<double>(kFxOne);
  if (scaled >= static_cast<double>(kFxMax) + 0.5) {
    flags.overflow = true;
    return kFxMax;
  }
  if (scaled < static_cast<double>(kFxMin) - 0.5) {
    flags.overflow = true;
    return kFxMin;
  }
  const double f = std::floor(scaled);
  const double frac = scaled - f;
  std::int64_t q = static_cast<std::int64_t>(f);
  if (frac > 0.5 || (frac == 0.5 && (q & 1))) ++q;
  return saturate(q, flags);
}

double fx_to_real(FxWord v) {
  return static_cast<double>(v) / static_cast<double>(kFxOne);
}

FxWord fx_add(FxWord a, FxWord b, FxFlags& flags) {
  return saturate(static_cast<std::int64_t>(a) + b, flags);
}

FxWord fx_sub(FxWord a, FxWord b, FxFlags& flags) {
  return saturate(static_cast<std::int64_t>(a) - b, flags);
}

FxWord fx_mul(FxWord a, FxWord b, FxFlags& flags) {
  const std::int64_t prod = static_cast<std::int64_t>(a) * b;  // Q4.26
  return saturate(round_shift_half_even(prod, kFxFracBits), flags);
}

FxWord fx_div(FxWord a, FxWord b, FxFlags& flags) {
  if (b == 0) {
    flags.invalid = true;
    if (a == 0) return 0;
    return a > 0 ? kFxMax : kFxMin;
  }
  const std::int64_t num = static_cast<std::int64_t>(a) << kFxFracBits;
  return saturate(round_div_half_even(num, b), flags);
}

FxWord fx_sqrt(FxWord a, FxFlags& flags) {
  if (a < 0) {
    flags.invalid = true;
    return 0;
  }
  if (a == 0) return 0;
  // sqrt of Q4.26 yields Q2.13.
  const std::int64_t x = static_cast<std::int64_t>(a) << kFxFracBits;
  std::int64_t q = static_cast<std::int64_t>(std::sqrt(static_cast<double>(x)));
  while (q * q > x) --q;
  while ((q + 1) * (q + 1) <= x) ++q;
  // Round to nearest: (q + 1/2)^2 is never an integer, so no ties.
  if (x - q * q > q) ++q;
  return saturate(q, flags);
}

namespace {
void check_iterations(int iterations) {
  if (iterations < 1 || iterations > kCordicIterations) {
    throw parameter_error("cordic: iterations must be in [1, " +
                          std::to_string(kCordicIterations) + "], got " +
                          std::to_string(iterations));
  }
}
}  // namespace

FxWord cordic_atan2(FxWord y_in, FxWord x_in, FxFlags& flags,
                    int iterations) {
  check_iterations(iterations);
  if (x_in == 0 && y_in == 0) {
    throw degenerate_angle_error("cordic_atan2: both inputs are zero");
  }
  std::int64_t x = x_in;
  std::int64_t y = y_in;
  // Prescale so the vectoring iterations keep enough significant bits.
  while (std::llabs(x) < kPrescaleFloor && std::llabs(y) < kPrescaleFloor) {
    x <<= 1;
    y <<= 1;
  }
  std::int64_t base = 0;
  if (x < 0) {
    // Pre-rotate into the right half-plane.
    if (y >= 0) {
      const std::int64_t t = x;
      x = y;
      y = -t;
      base = kHalfPiZ;
    } else {
      const std::int64_t t = x;
      x = -y;
      y = t;
      base = -kHalfPiZ;
    }
  }
  std::int64_t z = 0;
  for (int k = 0; k < iterations; ++k) {
    if (y > 0) {
      const std::int64_t xn = x + (y >> k);
      y = y - (x >> k);
      x = xn;
      z += kAtanTable[k];
    } else {
      const std::int64_t xn = x - (y >> k);
      y = y + (x >> k);
      x = xn;
      z -= kAtanTable[k];
    }
  }
  std::int64_t raw = round_shift_half_even(base + z, kZFracBits - kFxFracBits);
  if (raw > kFxPi) raw -= 2 * static_cast<std::int64_t>(kFxPi);
  if (raw <= -kFxPi) raw += 2 * static_cast<std::int64_t>(kFxPi);
  return saturate(raw, flags);
}

std::pair<FxWord, FxWord> cordic_sincos(FxWord theta, FxFlags& flags,
                                        int iterations) {
  check_iterations(iterations);
  std::int64_t z = static_cast<std::int64_t>(theta)
                   << (kZFracBits - kFxFracBits);
  bool negate = false;
  if (z > kHalfPiZ) {
    z -= kPiZ;
    negate = true;
  } else if (z < -kHalfPiZ) {
    z += kPiZ;
    negate = true;
  }
  std::int64_t x = static_cast<std::int64_t>(kGainInvRaw[iterations - 1])
                   << (kZFracBits - kFxFracBits);
  std::int64_t y = 0;
  for (int k = 0; k < iterations; ++k) {
    if (z >= 0) {
      const std::int64_t xn = x - (y >> k);
      y = y + (x >> k);
      x = xn;
      z -= kAtanTable[k];
    } else {
      const std::int64_t xn = x + (y >> k);
      y = y - (x >> k);
      x = xn;
      z += kAtanTable[k];
    }
  }
  std::int64_t c = round_shift_half_even(x, kZFracBits - kFxFracBits);
  std::int64_t s = round_shift_half_even(y, kZFracBits - kFxFracBits);
  if (negate) {
    c = -c;
    s = -s;
  }
  return {saturate(s, flags), saturate(c, flags)};
}

}  // namespace wptbeam
