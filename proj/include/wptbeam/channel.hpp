// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef WPTBEAM_CHANNEL_HPP_
#define WPTBEAM_CHANNEL_HPP_

#include <cstdint>

#include "wptbeam/complexmath.hpp"

namespace wptbeam {

// Complex baseband channel from the N-antenna transmitter to the device.
using ChannelVector = cvec;

// Unit-norm transmit weighting applied across the antennas.
using BeamformingVector = cvec;

struct ChannelParams {
  int n_antennas = 5;
  // Ratio of line-of-sight to scattered power; +infinity selects the pure
  // deterministic line-of-sight channel.
  double rician_factor = 2.0;
  double distance_m = 5.0;
  double pathloss_exponent = 3.0;
  double transmit_power_w = 10.0;
  double antenna_gain = 1.0;

  void validate() const;
};

// Deterministic line-of-sight component: unit-magnitude phase ramp for a
// uniform linear array steered 30 degrees off broadside.
ChannelVector los_component(int n_antennas);

// Draw one channel realization. Per-entry model:
//   sqrt(L^-beta) * ( sqrt(kf/(kf+1)) * los + sqrt(1/(kf+1)) * scatter )
// with unit-variance circular-symmetric Gaussian scatter. Deterministic for
// a fixed (params, seed) pair.
ChannelVector sample_channel(const ChannelParams& params, std::uint64_t seed);

// Power delivered to the harvester input: G * P_t * |<h, w>|^2.
double received_power(const ChannelVector& h, const BeamformingVector& w,
                      const ChannelParams& params);

// Best possible beamforming vector: the channel direction itself.
BeamformingVector genie_optimal_vector(const ChannelVector& h);

}  // namespace wptbeam

#endif  // WPTBEAM_CHANNEL_HPP_
