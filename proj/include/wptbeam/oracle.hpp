// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef WPTBEAM_ORACLE_HPP_
#define WPTBEAM_ORACLE_HPP_

#include <limits>

#include "wptbeam/channel.hpp"

namespace wptbeam {

struct ProbeOutcome {
  // Seconds spent transmitting with the probed vector in this slot.
  double elapsed_s = 0.0;
  // True when the device signalled a full recharge (which resets its
  // storage); false when the deadline cut the slot short, leaving the
  // accumulated charge in place.
  bool fed_back = false;
};

// The only feedback channel available to the transmitter: hand over a
// beamforming vector, get back time.
class ProbeOracle {
 public:
  virtual ~ProbeOracle() = default;

  // Transmit with w until the device feeds back or deadline_s elapses.
  // An infinite elapsed_s with fed_back=false means feedback would never
  // arrive under w.
  virtual ProbeOutcome measure(
      const BeamformingVector& w,
      double deadline_s = std::numeric_limits<double>::infinity()) = 0;
};

}  // namespace wptbeam

#endif  // WPTBEAM_ORACLE_HPP_
