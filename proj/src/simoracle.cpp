// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "wptbeam/simoracle.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "wptbeam/errors.hpp"

namespace wptbeam {

SimulatedHarvesterOracle::SimulatedHarvesterOracle(ChannelVector h,
                                                   ChannelParams params,
                                                   StorageCircuit circuit,
                                                   EfficiencyModel model,
                                                   double norm_tol)
    : h_(std::move(h)),
      params_(std::move(params)),
      circuit_(std::move(circuit)),
      model_(std::move(model)),
      norm_tol_(norm_tol),
      q_now_c_(circuit_.q_initial_c) {
  params_.validate();
  circuit_.validate();
  validate_model(model_);
  if (static_cast<int>(h_.size()) != params_.n_antennas) {
    throw shape_error("SimulatedHarvesterOracle: channel length " +
                      std::to_string(h_.size()) + " != n_antennas " +
                      std::to_string(params_.n_antennas));
  }
  if (!(norm_tol_ >= 0.0)) {
    throw parameter_error("SimulatedHarvesterOracle: norm_tol must be >= 0");
  }
}

ProbeOutcome SimulatedHarvesterOracle::measure(const BeamformingVector& w,
                                               double deadline_s) {
  if (std::isnan(deadline_s) || deadline_s <= 0.0) {
    throw parameter_error("measure: deadline must be positive");
  }
  const double err = std::abs(norm(w) - 1.0);
  if (err > norm_tol_) {
    throw parameter_error("measure: transmit vector norm is off by " +
                          std::to_string(err));
  }
  const double p_r = received_power(h_, w, params_);
  const double p_h = harvested_power(model_, p_r);
  const double t_need =
      time_to_recharge(circuit_, q_now_c_, circuit_.q_full_c, p_h);
  ++probes_;
  if (std::isfinite(t_need) && t_need <= deadline_s) {
    q_now_c_ = circuit_.q_initial_c;
    return {t_need, true};
  }
  if (!std::isfinite(deadline_s)) {
    return {std::numeric_limits<double>::infinity(), false};
  }
  q_now_c_ = charge_after(circuit_, q_now_c_, p_h, deadline_s);
  return {deadline_s, false};
}

void SimulatedHarvesterOracle::reset() { q_now_c_ = circuit_.q_initial_c; }

TtrConverter make_abs_dot_converter(const StorageCircuit& circuit,
                                    const EfficiencyModel& model,
                                    const ChannelParams& params) {
  circuit.validate();
  validate_model(model);
  params.validate();
  return [circuit, model, params](double t_s) {
    return abs_dot_from_ttr(circuit, model, params, t_s);
  };
}

}  // namespace wptbeam
