// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>

#include "doctest.h"
#include "wptbeam/channel.hpp"
#include "wptbeam/complexmath.hpp"
#include "wptbeam/errors.hpp"
#include "wptbeam/harvester.hpp"
#include "wptbeam/simoracle.hpp"

using namespace wptbeam;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ChannelParams simple_params() {
  ChannelParams p;
  p.n_antennas = 2;
  p.distance_m = 1.0;
  p.transmit_power_w = 10.0;
  return p;
}

}  // namespace

TEST_CASE("a strong probe reports the exact recharge time") {
  const ChannelParams p = simple_params();
  const StorageCircuit circ{};
  const EfficiencyModel model = PiecewiseLinearEfficiency{};
  const ChannelVector h = {cxd(0.6, 0.1), cxd(-0.2, 0.4)};
  SimulatedHarvesterOracle oracle(h, p, circ, model);
  const BeamformingVector w = {1.0, 0.0};

  const ProbeOutcome out = oracle.measure(w);
  CHECK(out.fed_back);
  const double p_r = received_power(h, w, p);
  const double want = time_to_recharge(circ, circ.q_initial_c, circ.q_full_c,
                                       harvested_power(model, p_r));
  CHECK(out.elapsed_s == doctest::Approx(want).epsilon(1e-12));
  CHECK(oracle.probe_count() == 1);

  // The converter inverts the whole pipeline back to |<h, w>|.
  const TtrConverter conv = make_abs_dot_converter(circ, model, p);
  CHECK(conv(out.elapsed_s) ==
        doctest::Approx(std::abs(inner(h, w))).epsilon(1e-9));
}

TEST_CASE("feedback resets the stored charge, a timeout banks it") {
  const ChannelParams p = simple_params();
  const StorageCircuit circ{};
  const EfficiencyModel model = ConstantEfficiency{};
  // Weak but harvesting direction: long recharge, partial banking.
  const ChannelVector h = {cxd(2e-3, 0.0), cxd(0.0, 0.0)};
  SimulatedHarvesterOracle oracle(h, p, circ, model);
  const BeamformingVector w = {1.0, 0.0};

  const double p_h = harvested_power(model, received_power(h, w, p));
  const double t_full =
      time_to_recharge(circ, circ.q_initial_c, circ.q_full_c, p_h);
  REQUIRE(t_full > 50.0);

  const ProbeOutcome timed = oracle.measure(w, 50.0);
  CHECK(!timed.fed_back);
  CHECK(timed.elapsed_s == 50.0);
  const double q_expected = charge_after(circ, circ.q_initial_c, p_h, 50.0);
  CHECK(oracle.charge_now_c() == doctest::Approx(q_expected).epsilon(1e-12));

  // A following full recharge completes in the residual time.
  const ProbeOutcome rest = oracle.measure(w, kInf);
  CHECK(rest.fed_back);
  CHECK(rest.elapsed_s ==
        doctest::Approx(t_full - 50.0).epsilon(1e-9));
  CHECK(oracle.charge_now_c() == circ.q_initial_c);

  oracle.measure(w, 10.0);
  CHECK(oracle.charge_now_c() > circ.q_initial_c);
  oracle.reset();
  CHECK(oracle.charge_now_c() == circ.q_initial_c);
}

TEST_CASE("a dark direction never feeds back and banks nothing") {
  const ChannelParams p = simple_params();
  const StorageCircuit circ{};
  const EfficiencyModel model = PiecewiseLinearEfficiency{};
  const ChannelVector h = {cxd(1e-4, 0.0), cxd(0.0, 0.0)};  // P_r = 1e-7 W
  SimulatedHarvesterOracle oracle(h, p, circ, model);
  const BeamformingVector w = {1.0, 0.0};

  const ProbeOutcome forever = oracle.measure(w, kInf);
  CHECK(!forever.fed_back);
  CHECK(std::isinf(forever.elapsed_s));

  const ProbeOutcome capped = oracle.measure(w, 30.0);
  CHECK(!capped.fed_back);
  CHECK(capped.elapsed_s == 30.0);
  CHECK(oracle.charge_now_c() == circ.q_initial_c);
}

TEST_CASE("oracle rejects malformed probes") {
  const ChannelParams p = simple_params();
  const StorageCircuit circ{};
  const EfficiencyModel model = PiecewiseLinearEfficiency{};
  const ChannelVector h = {cxd(0.6, 0.1), cxd(-0.2, 0.4)};
  SimulatedHarvesterOracle oracle(h, p, circ, model);

  const BeamformingVector not_unit = {0.5, 0.0};
  CHECK_THROWS_AS(oracle.measure(not_unit), parameter_error);
  const BeamformingVector wrong_shape = {1.0, 0.0, 0.0};
  CHECK_THROWS_AS(oracle.measure(wrong_shape), shape_error);
  const BeamformingVector w = {1.0, 0.0};
  CHECK_THROWS_AS(oracle.measure(w, 0.0), parameter_error);
  CHECK_THROWS_AS(oracle.measure(w, -5.0), parameter_error);
  CHECK_THROWS_AS(oracle.measure(w, std::nan("")), parameter_error);
}

TEST_CASE("oracle construction validates its inputs") {
  ChannelParams p = simple_params();
  const StorageCircuit circ{};
  const EfficiencyModel model = PiecewiseLinearEfficiency{};
  const ChannelVector h = {cxd(0.6, 0.1), cxd(-0.2, 0.4)};
  const ChannelVector h_wrong = {cxd(0.6, 0.1)};
  CHECK_THROWS_AS(SimulatedHarvesterOracle(h_wrong, p, circ, model),
                  shape_error);
  p.transmit_power_w = 0.0;
  CHECK_THROWS_AS(SimulatedHarvesterOracle(h, p, circ, model),
                  parameter_error);
}
