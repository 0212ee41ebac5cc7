// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef WPTBEAM_SIMORACLE_HPP_
#define WPTBEAM_SIMORACLE_HPP_

#include <limits>

#include "wptbeam/beamformer.hpp"
#include "wptbeam/channel.hpp"
#include "wptbeam/harvester.hpp"
#include "wptbeam/oracle.hpp"

namespace wptbeam {

// Closed-loop simulation of the receiver: a fixed channel drives the
// harvester, the harvester charges the storage circuit, and the only output
// is the recharge feedback timing. State (the accumulated charge) persists
// across deadline-cut windows exactly as a physical device's would.
class SimulatedHarvesterOracle final : public ProbeOracle {
 public:
  SimulatedHarvesterOracle(ChannelVector h, ChannelParams params,
                           StorageCircuit circuit, EfficiencyModel model,
                           double norm_tol = 1e-12);

  ProbeOutcome measure(const BeamformingVector& w,
                       double deadline_s =
                           std::numeric_limits<double>::infinity()) override;

  // Number of measure() calls so far (one per transmission slot).
  int probe_count() const { return probes_; }
  // Charge currently sitting in the storage element, in coulombs.
  double charge_now_c() const { return q_now_c_; }
  // Drains the storage element back to its initial charge.
  void reset();

  const ChannelVector& channel() const { return h_; }
  const StorageCircuit& circuit() const { return circuit_; }
  const EfficiencyModel& model() const { return model_; }

 private:
  ChannelVector h_;
  ChannelParams params_;
  StorageCircuit circuit_;
  EfficiencyModel model_;
  double norm_tol_;
  double q_now_c_;
  int probes_ = 0;
};

// Converter that maps an observed recharge time back to the beam-alignment
// magnitude |<h, w>| for the given link, circuit, and harvester model.
TtrConverter make_abs_dot_converter(const StorageCircuit& circuit,
                                    const EfficiencyModel& model,
                                    const ChannelParams& params);

}  // namespace wptbeam

#endif  // WPTBEAM_SIMORACLE_HPP_
