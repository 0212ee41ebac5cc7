// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "wptbeam/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "wptbeam/errors.hpp"
#include "wptbeam/rng.hpp"

namespace wptbeam {

namespace {
// sin(30 degrees), the fixed steering angle of the line-of-sight ramp.
constexpr double kSinSteering = 0.5;
}  // namespace

void ChannelParams::validate() const {
  if (n_antennas < 1) {
    throw parameter_error("ChannelParams.n_antennas must be >= 1, got " +
                          std::to_string(n_antennas));
  }
  if (std::isnan(rician_factor) || rician_factor < 0.0) {
    throw parameter_error("ChannelParams.rician_factor must be >= 0");
  }
  if (!(distance_m > 0.0) || !std::isfinite(distance_m)) {
    throw parameter_error("ChannelParams.distance_m must be positive");
  }
  if (pathloss_exponent < 0.0 || !std::isfinite(pathloss_exponent)) {
    throw parameter_error("ChannelParams.pathloss_exponent must be >= 0");
  }
  if (!(transmit_power_w > 0.0) || !std::isfinite(transmit_power_w)) {
    throw parameter_error("ChannelParams.transmit_power_w must be positive");
  }
  if (!(antenna_gain > 0.0) || !std::isfinite(antenna_gain)) {
    throw parameter_error("ChannelParams.antenna_gain must be positive");
  }
}

ChannelVector los_component(int n_antennas) {
  if (n_antennas < 1) {
    throw parameter_error("los_component: n_antennas must be >= 1");
  }
  ChannelVector los(static_cast<std::size_t>(n_antennas));
  for (int k = 0; k < n_antennas; ++k) {
    const double phase = -std::numbers::pi * k * kSinSteering;
    los[static_cast<std::size_t>(k)] = {std::cos(phase), std::sin(phase)};
  }
  return los;
}

ChannelVector sample_channel(const ChannelParams& params, std::uint64_t seed) {
  params.validate();
  const std::size_t n = static_cast<std::size_t>(params.n_antennas);
  const double amplitude =
      std::sqrt(std::pow(params.distance_m, -params.pathloss_exponent));
  ChannelVector h = los_component(params.n_antennas);
  if (std::isinf(params.rician_factor)) {
    for (std::size_t k = 0; k < n; ++k) h[k] *= amplitude;
    return h;
  }
  const double kf = params.rician_factor;
  const double w_los = std::sqrt(kf / (kf + 1.0));
  const double w_scatter = std::sqrt(1.0 / (kf + 1.0));
  Rng rng(seed);
  for (std::size_t k = 0; k < n; ++k) {
    h[k] = amplitude * (w_los * h[k] + w_scatter * rng.next_cscg_unit());
  }
  return h;
}

double received_power(const ChannelVector& h, const BeamformingVector& w,
                      const ChannelParams& params) {
  params.validate();
  if (h.size() != w.size()) {
    throw shape_error("received_power: channel has " +
                      std::to_string(h.size()) + " entries, vector has " +
                      std::to_string(w.size()));
  }
  return params.antenna_gain * params.transmit_power_w * std::norm(inner(h, w));
}

BeamformingVector genie_optimal_vector(const ChannelVector& h) {
  if (!(squared_norm(h) > 0.0)) {
    throw parameter_error("genie_optimal_vector: zero channel");
  }
  return normalized(h);
}

}  // namespace wptbeam
