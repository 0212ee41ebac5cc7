// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef WPTBEAM_FIXEDPOINT_HPP_
#define WPTBEAM_FIXEDPOINT_HPP_

#include <cstdint>
#include <utility>

namespace wptbeam {

// 16-bit signed fixed-point word, Q2.13: 13 fractional bits, range
// [-4.0, 4.0). Every operation rounds half-to-even (ties away from zero
// never occur in the datapath) and saturates on overflow.
using FxWord = std::int16_t;

inline constexpr int kFxFracBits = 13;
inline constexpr std::int32_t kFxOne = 1 << kFxFracBits;  // 8192
inline constexpr FxWord kFxMax = 32767;
inline constexpr FxWord kFxMin = -32768;
// pi in Q2.13.
inline constexpr FxWord kFxPi = 25736;

// Sticky event flags threaded through a fixed-point computation.
struct FxFlags {
  bool overflow = false;  // some result saturated
  bool invalid = false;   // divide by zero or sqrt of a negative

  void merge(const FxFlags& other) {
    overflow = overflow || other.overflow;
    invalid = invalid || other.invalid;
  }
  bool any() const { return overflow || invalid; }
};

FxWord fx_from_real(double v, FxFlags& flags);
double fx_to_real(FxWord v);

inline constexpr int kCordicIterations = 14;

FxWord fx_add(FxWord a, FxWord b, FxFlags& flags);
FxWord fx_sub(FxWord a, FxWord b, FxFlags& flags);
FxWord fx_mul(FxWord a, FxWord b, FxFlags& flags);
// Saturates to the sign of the numerator on divide-by-zero (invalid flag).
FxWord fx_div(FxWord a, FxWord b, FxFlags& flags);
// Returns 0 with the invalid flag set for negative inputs.
FxWord fx_sqrt(FxWord a, FxFlags& flags);

// Four-quadrant angle of (x, y) by vectoring rotations on a Q2.28 internal
// accumulator; result in Q2.13 radians, range (-pi, pi]. Throws
// degenerate_angle_error on (0, 0).
FxWord cordic_atan2(FxWord y, FxWord x, FxFlags& flags,
                    int iterations = kCordicIterations);

// {sin, cos} of a Q2.13 angle by rotation iterations with gain
// compensation. Any Q2.13 input converges; the nominal domain is [-pi, pi].
std::pair<FxWord, FxWord> cordic_sincos(FxWord theta, FxFlags& flags,
                                        int iterations = kCordicIterations);

}  // namespace wptbeam

#endif  // WPTBEAM_FIXEDPOINT_HPP_
