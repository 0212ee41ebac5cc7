// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "wptbeam/basis.hpp"
#include "wptbeam/channel.hpp"
#include "wptbeam/complexmath.hpp"
#include "wptbeam/errors.hpp"
#include "wptbeam/harvester.hpp"
#include "wptbeam/oeb.hpp"
#include "wptbeam/rng.hpp"
#include "wptbeam/simoracle.hpp"

using namespace wptbeam;

namespace {

// Pushes the controller through the seed load and all five column probes
// with the given strength words.
void drive_columns(OebState& state, const std::array<FxWord, kOebN>& taus) {
  block1_step(state, circulant_seed_values());
  for (int c = 0; c < kOebN; ++c) {
    oeb_send(state);
    block1_step(state, taus[c]);
  }
}

ChannelParams unit_params() {
  ChannelParams p;
  p.n_antennas = kOebN;
  p.distance_m = 1.0;
  p.transmit_power_w = 10.0;
  return p;
}

}  // namespace

TEST_CASE("seed values form a constant-amplitude orthonormal family") {
  const auto seeds = circulant_seed_values();
  const double mag = 1.0 / std::sqrt(5.0);
  for (const cxd& s : seeds) {
    CHECK(std::abs(s) == doctest::Approx(mag).epsilon(1e-12));
  }
  // Known phases of the five entries.
  const double pi5 = std::numbers::pi / 5.0;
  CHECK(std::abs(seeds[0] - std::polar(mag, -pi5)) < 1e-12);
  CHECK(std::abs(seeds[1] - std::polar(mag, -pi5)) < 1e-12);
  CHECK(std::abs(seeds[2] - std::polar(mag, pi5)) < 1e-12);
  CHECK(std::abs(seeds[3] - std::polar(mag, std::numbers::pi)) < 1e-12);
  CHECK(std::abs(seeds[4] - std::polar(mag, pi5)) < 1e-12);
  // The float column bank built from them is exactly orthonormal.
  CHECK_NOTHROW(validate_orthonormal(circulant_basis_float(), 1e-10));
}

TEST_CASE("quantized seed registers hold the pinned raws") {
  FxFlags f;
  const CirculantQ q = quantize_seed(circulant_seed_values(), f);
  CHECK(!f.overflow);
  CHECK(!f.invalid);
  const std::array<FxWord, 5> want_re = {2964, 2964, 2964, -3664, 2964};
  const std::array<FxWord, 5> want_im = {-2153, -2153, 2153, 0, 2153};
  for (int k = 0; k < 5; ++k) {
    CHECK(q.seed_re[k] == want_re[k]);
    CHECK(q.seed_im[k] == want_im[k]);
  }
}

TEST_CASE("column wiring is a cyclic shift of the seed registers") {
  FxFlags f;
  const CirculantQ q = quantize_seed(circulant_seed_values(), f);
  for (int c = 0; c < kOebN; ++c) {
    const FxVec col = q.column(c);
    for (int k = 0; k < kOebN; ++k) {
      const int src = ((k - c) % kOebN + kOebN) % kOebN;
      CHECK(col.re[k] == q.seed_re[src]);
      CHECK(col.im[k] == q.seed_im[src]);
    }
  }
  // Quantization keeps the columns orthonormal to register precision.
  double worst = 0.0;
  for (int i = 0; i < kOebN; ++i) {
    for (int j = 0; j < kOebN; ++j) {
      const double g =
          std::abs(inner(fxvec_to_cvec(q.column(i)), fxvec_to_cvec(q.column(j))));
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  }
  CHECK(worst < std::pow(2.0, -10.0));
}

TEST_CASE("inputs outside the handshake are protocol errors") {
  OebState state;
  // Strength word before the seed load.
  CHECK_THROWS_AS(block1_step(state, FxWord{100}), protocol_error);
  // Nothing staged yet, nothing to send.
  CHECK_THROWS_AS(oeb_send(state), protocol_error);
  block1_step(state, circulant_seed_values());
  // Second seed load is rejected.
  CHECK_THROWS_AS(block1_step(state, circulant_seed_values()),
                  protocol_error);
  // A strength word before the column went out is rejected.
  CHECK_THROWS_AS(block1_step(state, FxWord{100}), protocol_error);
  oeb_send(state);
  // Double transmission of the same staged vector is rejected.
  CHECK_THROWS_AS(oeb_send(state), protocol_error);
  // The angle pipeline cannot run during column probing.
  CHECK_THROWS_AS(block2_iteration(state, FxWord{100}), protocol_error);
}

TEST_CASE("strength words are kept in arrival order") {
  OebState state;
  drive_columns(state, {100, 200, 300, 400, 500});
  CHECK(state.rb3_count == 5);
  CHECK(state.rb3[0] == 100);
  CHECK(state.rb3[4] == 500);
  // After the fifth word the accumulator starts from column 0.
  CHECK(state.dot == 100);
  for (int k = 0; k < kOebN; ++k) {
    CHECK(state.w_opt.re[k] == state.rb2[0].re[k]);
    CHECK(state.w_opt.im[k] == state.rb2[0].im[k]);
  }
  CHECK(state.probes == 5);
}

TEST_CASE("worked angle iteration in registers") {
  OebState state;
  // Columns 0 and 1 at full strength, the rest silent: one real angle
  // iteration followed by three skips.
  drive_columns(state, {8192, 8192, 0, 0, 0});
  REQUIRE(state.phase == OebPhase::kAngleIter);
  REQUIRE(state.stage == OebAngleStage::kW1Sent);
  CHECK(state.a1 == 8192);
  CHECK(state.a2 == 8192);
  CHECK(state.mu26 == (std::int64_t{1} << 27));
  CHECK(state.k1_26 == (std::int64_t{1} << 26));
  CHECK(state.k2_26 == (std::int64_t{1} << 25));
  CHECK(state.den26 == std::int64_t{23170} * 4096);

  // sqrt(1 + sqrt2/2) and sqrt(1 - sqrt2/2) in Q2.13.
  oeb_send(state);
  block2_iteration(state, 10703);
  REQUIRE(state.stage == OebAngleStage::kW2Sent);
  oeb_send(state);
  block2_iteration(state, 4433);

  // The recovered rotation is ~pi/2 and the strength ~sqrt(2).
  const OebTraceRow* update = nullptr;
  for (const OebTraceRow& row : state.trace) {
    if (row.event == "update") update = &row;
  }
  REQUIRE(update != nullptr);
  CHECK(std::abs(update->theta - 12868) <= 8);
  CHECK(std::abs(update->gi + 8192) <= 2);
  CHECK(std::abs(update->gr) <= 2);
  CHECK(update->sign_flip == 0);
  CHECK(std::abs(state.dot - 11585) <= 2);

  // Remaining iterations skip on silent columns and the run completes.
  CHECK(state.phase == OebPhase::kDone);
  int skips = 0;
  for (const OebTraceRow& row : state.trace) {
    if (row.event == "skip") ++skips;
  }
  CHECK(skips == 3);
  CHECK(state.probes == 7);
}

TEST_CASE("a silent accumulator hands over to the next strong column") {
  OebState state;
  drive_columns(state, {16, 8192, 0, 0, 0});
  CHECK(state.phase == OebPhase::kDone);
  CHECK(state.dot == 8192);
  for (int k = 0; k < kOebN; ++k) {
    CHECK(state.w_opt.re[k] == state.rb2[1].re[k]);
    CHECK(state.w_opt.im[k] == state.rb2[1].im[k]);
  }
  bool saw_takeover = false;
  for (const OebTraceRow& row : state.trace) {
    if (row.event == "takeover") saw_takeover = true;
  }
  CHECK(saw_takeover);
}

TEST_CASE("wildly inconsistent observations saturate instead of wrapping") {
  OebState state;
  drive_columns(state, {8192, 8192, 0, 0, 0});
  oeb_send(state);
  block2_iteration(state, kFxMax);
  oeb_send(state);
  block2_iteration(state, kFxMax);
  CHECK(state.flags.overflow);
  CHECK(state.phase == OebPhase::kDone);
}

TEST_CASE("full run against a live oracle aligns and is repeatable") {
  const ChannelParams params = unit_params();
  const StorageCircuit circ{};
  const EfficiencyModel model = PiecewiseLinearEfficiency{};
  ChannelVector h = sample_channel(params, 314);
  h = scaled(h, cxd(1.0 / norm(h), 0.0));
  const TtrConverter conv = make_abs_dot_converter(circ, model, params);

  SimulatedHarvesterOracle o1(h, params, circ, model);
  const OebRunResult r1 = run_oeb(o1, conv, circulant_seed_values());
  CHECK(r1.probes == 3 * kOebN - 2);
  CHECK(!r1.flags.overflow);
  CHECK(!r1.flags.invalid);
  const double align =
      std::abs(inner(h, r1.w_float)) / (norm(h) * norm(r1.w_float));
  CHECK(align >= 0.999);
  // The tracked strength register matches the true norm to register
  // precision.
  CHECK(std::abs(fx_to_real(r1.dot) - norm(h)) < std::pow(2.0, -8.0));

  SimulatedHarvesterOracle o2(h, params, circ, model);
  const OebRunResult r2 = run_oeb(o2, conv, circulant_seed_values());
  CHECK(oeb_trace_csv(r1.trace) == oeb_trace_csv(r2.trace));
  for (int k = 0; k < kOebN; ++k) {
    CHECK(r1.w_raw.re[k] == r2.w_raw.re[k]);
    CHECK(r1.w_raw.im[k] == r2.w_raw.im[k]);
  }
}

TEST_CASE("trace CSV is structured and integer-valued") {
  OebState state;
  drive_columns(state, {8192, 8192, 0, 0, 0});
  const std::string csv = oeb_trace_csv(state.trace);
  CHECK(csv.rfind("step,event,", 0) == 0);
  CHECK(csv.find("seed") != std::string::npos);
  CHECK(csv.find("init") != std::string::npos);
  CHECK(csv.find('.') == std::string::npos);  // raw integers only
}

TEST_CASE("a dark probe direction surfaces as a timeout") {
  const ChannelParams params = unit_params();
  const StorageCircuit circ{};
  const EfficiencyModel model = PiecewiseLinearEfficiency{};
  // Channel so weak no probe ever recharges the storage.
  const ChannelVector h = {1e-8, 1e-8, 1e-8, 1e-8, 1e-8};
  const TtrConverter conv = make_abs_dot_converter(circ, model, params);
  SimulatedHarvesterOracle oracle(h, params, circ, model);
  CHECK_THROWS_AS(run_oeb(oracle, conv, circulant_seed_values()),
                  timeout_error);
}
