// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef WPTBEAM_OEB_HPP_
#define WPTBEAM_OEB_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "wptbeam/basis.hpp"
#include "wptbeam/beamformer.hpp"
#include "wptbeam/fixedpoint.hpp"
#include "wptbeam/oracle.hpp"

namespace wptbeam {

// The register datapath is wired for a fixed five-antenna array.
inline constexpr int kOebN = 5;

// Basis-column strengths whose raw word falls below this threshold are
// treated as degenerate and their angle step is skipped.
inline constexpr FxWord kOebSkipThresholdRaw = 32;

// One five-lane complex register (split real/imaginary banks).
struct FxVec {
  std::array<FxWord, kOebN> re{};
  std::array<FxWord, kOebN> im{};
};

cvec fxvec_to_cvec(const FxVec& v);

// Constant-amplitude probing seed: the inverse DFT of a unit-modulus
// spectrum, so every cyclic shift keeps unit norm and mutual orthogonality.
std::array<cxd, kOebN> circulant_seed_values();

// Quantized seed registers plus the cyclic-shift column wiring
// (column c, entry k = seed[(k - c) mod N]).
struct CirculantQ {
  std::array<FxWord, kOebN> seed_re{};
  std::array<FxWord, kOebN> seed_im{};

  FxVec column(int c) const;
};

CirculantQ quantize_seed(const std::array<cxd, kOebN>& seeds, FxFlags& flags);

// Exact-valued (unquantized) column bank, for the floating-point reference
// path.
OrthonormalBasis circulant_basis_float();

enum class OebPhase : int {
  kLoadSeed = 0,    // waiting for the seed registers
  kProbeColumn,     // basis column staged in the emit register
  kAwaitTau,        // basis column transmitted, waiting for the ack word
  kAngleIter,       // inside an angle iteration (see OebAngleStage)
  kDone
};

enum class OebAngleStage : int {
  kW1Sent = 0,  // first phase-offset combination staged/transmitted
  kW2Sent,      // second phase-offset combination staged/transmitted
  kUpdate       // transient: registers being updated from both observations
};

const char* oeb_phase_name(OebPhase phase);

// One snapshot per protocol transition; every field is an integer raw so a
// dumped trace diffs byte-for-byte across runs.
struct OebTraceRow {
  int step = 0;
  std::string event;  // seed|stage|send|tau|init|w1|tau1|w2|tau2|update|
                      // skip|takeover|done
  int iter = -1;
  int col = -1;
  FxWord tau_in = 0;
  FxWord a1 = 0;
  FxWord a2 = 0;
  FxWord gr = 0;
  FxWord gi = 0;
  FxWord theta = 0;
  FxWord cos_v = 0;
  FxWord sin_v = 0;
  FxWord dot = 0;
  std::int64_t mu26 = 0;
  std::int64_t k1_26 = 0;
  std::int64_t k2_26 = 0;
  std::int64_t den26 = 0;
  std::int64_t al26 = 0;
  int sign_flip = 0;
  int flag_overflow = 0;
  int flag_invalid = 0;
  FxVec w;  // emitted or updated register image for this event
};

std::string oeb_trace_csv(const std::vector<OebTraceRow>& trace);

// Complete controller state. The handshake contract: a staged vector in
// w_emit is transmitted by oeb_send; the environment answers with exactly
// one strength word (the ack), delivered through block1_step while a basis
// column is outstanding or block2_iteration while an angle probe is.
struct OebState {
  OebPhase phase = OebPhase::kLoadSeed;
  OebAngleStage stage = OebAngleStage::kW1Sent;
  int col = 0;   // basis column being probed
  int iter = 0;  // angle iteration, 1..N-1

  CirculantQ rb1;                      // seed registers
  std::array<FxVec, kOebN> rb2;        // column bank
  std::array<FxWord, kOebN> rb3{};     // strength FIFO, arrival order
  int rb3_count = 0;

  FxVec w_opt;            // accumulated beamforming registers
  FxWord dot = 0;         // tracked strength register
  FxVec w_emit;           // staged transmit vector
  bool emit_valid = false;
  bool awaiting_tau = false;

  // Iteration latches.
  FxWord a1 = 0;
  FxWord a2 = 0;
  FxWord tau1 = 0;
  std::int64_t mu26 = 0;
  std::int64_t k1_26 = 0;
  std::int64_t k2_26 = 0;
  std::int64_t den26 = 0;

  FxWord skip_threshold = kOebSkipThresholdRaw;
  FxFlags flags;
  int probes = 0;
  int step = 0;
  std::vector<OebTraceRow> trace;
};

// Seed load or a basis-probe strength word.
using Block1Input = std::variant<std::array<cxd, kOebN>, FxWord>;

// Register steering: loads the seed bank and forms the five columns, or
// routes an incoming strength word into the FIFO. A strength word arriving
// outside kAwaitTau is a protocol error.
void block1_step(OebState& state, const Block1Input& input);

// Marks the staged vector as transmitted; the controller then blocks until
// the matching strength word arrives.
void oeb_send(OebState& state);

// Arithmetic pipeline for one angle observation: latches the first
// observation and stages the second combination, or, on the second
// observation, recovers the phase and updates the beamforming registers.
void block2_iteration(OebState& state, FxWord tau_tilde);

struct OebRunResult {
  BeamformingVector w_float;  // unit-norm image of the final registers
  FxVec w_raw;
  FxWord dot = 0;
  FxFlags flags;
  int probes = 0;
  std::vector<OebTraceRow> trace;
};

// Drives the full state machine against a live oracle: 5 column probes,
// then up to 4 angle iterations of 2 combination probes each.
OebRunResult run_oeb(ProbeOracle& oracle, const TtrConverter& converter,
                     const std::array<cxd, kOebN>& seeds,
                     FxWord skip_threshold = kOebSkipThresholdRaw);

}  // namespace wptbeam

#endif  // WPTBEAM_OEB_HPP_
