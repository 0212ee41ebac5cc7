// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "wptbeam/oeb.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <utility>

#include "wptbeam/complexmath.hpp"
#include "wptbeam/errors.hpp"

namespace wptbeam {

namespace {

// cos(pi/4) = sin(pi/4) in Q2.13.
constexpr FxWord kCosQuarterPi = 5793;
// 2*sqrt(2) in Q2.13.
constexpr FxWord kTwoSqrtTwo = 23170;

FxWord saturate16(std::int64_t v, FxFlags& flags) {
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

// Rounds v / 2^shift to nearest, ties to even (arithmetic-shift based,
// matching the scalar fixed-point units).
std::int64_t round_shift(std::int64_t v, int shift) {
  std::int64_t q = v >> shift;
  const std::int64_t r = v & ((std::int64_t{1} << shift) - 1);
  const std::int64_t half = std::int64_t{1} << (shift - 1);
  if (r > half || (r == half && (q & 1))) ++q;
  return q;
}

std::int64_t round_div(std::int64_t num, std::int64_t den) {
  const bool neg = (num < 0) != (den < 0);
  const std::uint64_t n =
      static_cast<std::uint64_t>(num < 0 ? -num : num);
  const std::uint64_t d =
      static_cast<std::uint64_t>(den < 0 ? -den : den);
  std::uint64_t q = n / d;
  const std::uint64_t r = n % d;
  if (2 * r > d || (2 * r == d && (q & 1))) ++q;
  const std::int64_t sq = static_cast<std::int64_t>(q);
  return neg ? -sq : sq;
}

// Round-to-nearest integer square root (no ties: (q+1/2)^2 is never
// an integer).
std::int64_t isqrt_round(std::int64_t x) {
  if (x <= 0) return 0;
  std::int64_t q =
      static_cast<std::int64_t>(std::sqrt(static_cast<double>(x)));
  while (q > 0 && q * q > x) --q;
  while ((q + 1) * (q + 1) <= x) ++q;
  if (x - q * q > q) ++q;
  return q;
}

OebTraceRow& push_row(OebState& st, const char* event) {
  OebTraceRow row;
  row.step = st.step++;
  row.event = event;
  row.flag_overflow = st.flags.overflow ? 1 : 0;
  row.flag_invalid = st.flags.invalid ? 1 : 0;
  st.trace.push_back(std::move(row));
  return st.trace.back();
}

void refresh_flags(OebState& st, OebTraceRow& row) {
  row.flag_overflow = st.flags.overflow ? 1 : 0;
  row.flag_invalid = st.flags.invalid ? 1 : 0;
}

// (a1*w + a2*(c + j*s)*q) / sqrt(mu), elementwise in Q2.13.
FxVec combine_registers(OebState& st, const FxVec& w, const FxVec& q,
                        FxWord a1, FxWord a2, FxWord c, FxWord s) {
  const FxWord root = saturate16(isqrt_round(st.mu26), st.flags);
  FxVec out;
  for (int k = 0; k < kOebN; ++k) {
    const FxWord rot_re =
        fx_sub(fx_mul(c, q.re[k], st.flags), fx_mul(s, q.im[k], st.flags),
               st.flags);
    const FxWord rot_im =
        fx_add(fx_mul(c, q.im[k], st.flags), fx_mul(s, q.re[k], st.flags),
               st.flags);
    const FxWord xr =
        fx_add(fx_mul(a1, w.re[k], st.flags), fx_mul(a2, rot_re, st.flags),
               st.flags);
    const FxWord xi =
        fx_add(fx_mul(a1, w.im[k], st.flags), fx_mul(a2, rot_im, st.flags),
               st.flags);
    out.re[k] = fx_div(xr, root, st.flags);
    out.im[k] = fx_div(xi, root, st.flags);
  }
  return out;
}

void stage_basis_column(OebState& st, int col) {
  st.col = col;
  st.phase = OebPhase::kProbeColumn;
  st.w_emit = st.rb1.column(col);
  st.emit_valid = true;
  st.awaiting_tau = false;
  OebTraceRow& row = push_row(st, "stage");
  row.col = col;
  row.w = st.w_emit;
}

// Enters the next angle iteration, skipping degenerate directions, and
// stages its first phase-offset combination. Lands in kDone after the
// last column.
void advance_iteration(OebState& st) {
  while (true) {
    ++st.iter;
    if (st.iter >= kOebN) {
      st.phase = OebPhase::kDone;
      st.emit_valid = false;
      st.awaiting_tau = false;
      OebTraceRow& row = push_row(st, "done");
      row.dot = st.dot;
      row.w = st.w_opt;
      return;
    }
    const int i = st.iter;
    st.a1 = st.dot;
    st.a2 = st.rb3[i];
    if (st.a2 < st.skip_threshold) {
      OebTraceRow& row = push_row(st, "skip");
      row.iter = i;
      row.col = i;
      row.a1 = st.a1;
      row.a2 = st.a2;
      continue;
    }
    if (st.a1 < st.skip_threshold) {
      // The accumulated vector is too weak to measure against; restart
      // from this column.
      st.w_opt = st.rb2[i];
      st.dot = st.a2;
      OebTraceRow& row = push_row(st, "takeover");
      row.iter = i;
      row.col = i;
      row.a1 = st.a1;
      row.a2 = st.a2;
      row.dot = st.dot;
      row.w = st.w_opt;
      continue;
    }
    const std::int64_t s1 =
        static_cast<std::int64_t>(st.a1) * st.a1;  // Q4.26
    const std::int64_t s2 = static_cast<std::int64_t>(st.a2) * st.a2;
    st.mu26 = s1 + s2;
    st.k1_26 = round_div(s1 * s1 + s2 * s2, st.mu26);
    st.k2_26 = round_div(s1 * s2, st.mu26);
    st.den26 = round_shift(static_cast<std::int64_t>(kTwoSqrtTwo) * st.k2_26,
                           kFxFracBits);
    if (st.den26 == 0) {
      // Phase system singular; treat the direction as degenerate.
      OebTraceRow& row = push_row(st, "skip");
      row.iter = i;
      row.col = i;
      row.a1 = st.a1;
      row.a2 = st.a2;
      continue;
    }
    st.phase = OebPhase::kAngleIter;
    st.stage = OebAngleStage::kW1Sent;
    st.w_emit = combine_registers(st, st.w_opt, st.rb2[i], st.a1, st.a2,
                                  kCosQuarterPi, kCosQuarterPi);
    st.emit_valid = true;
    st.awaiting_tau = false;
    OebTraceRow& row = push_row(st, "w1");
    row.iter = i;
    row.col = i;
    row.a1 = st.a1;
    row.a2 = st.a2;
    row.mu26 = st.mu26;
    row.k1_26 = st.k1_26;
    row.k2_26 = st.k2_26;
    row.den26 = st.den26;
    row.w = st.w_emit;
    refresh_flags(st, row);
    return;
  }
}

}  // namespace

cvec fxvec_to_cvec(const FxVec& v) {
  cvec out(kOebN);
  for (int k = 0; k < kOebN; ++k) {
    out[static_cast<std::size_t>(k)] = cxd{fx_to_real(v.re[k]),
                                           fx_to_real(v.im[k])};
  }
  return out;
}

std::array<cxd, kOebN> circulant_seed_values() {
  const double amp = 1.0 / std::sqrt(5.0);
  const double phi = std::numbers::pi / 5.0;
  const cxd minus{std::cos(phi), -std::sin(phi)};
  const cxd plus{std::cos(phi), std::sin(phi)};
  return {amp * minus, amp * minus, amp * plus, cxd{-amp, 0.0}, amp * plus};
}

FxVec CirculantQ::column(int c) const {
  if (c < 0 || c >= kOebN) {
    throw parameter_error("CirculantQ::column: index out of range");
  }
  FxVec out;
  for (int k = 0; k < kOebN; ++k) {
    const int src = (k - c + kOebN) % kOebN;
    out.re[k] = seed_re[static_cast<std::size_t>(src)];
    out.im[k] = seed_im[static_cast<std::size_t>(src)];
  }
  return out;
}

CirculantQ quantize_seed(const std::array<cxd, kOebN>& seeds, FxFlags& flags) {
  CirculantQ q;
  for (int k = 0; k < kOebN; ++k) {
    q.seed_re[static_cast<std::size_t>(k)] =
        fx_from_real(seeds[static_cast<std::size_t>(k)].real(), flags);
    q.seed_im[static_cast<std::size_t>(k)] =
        fx_from_real(seeds[static_cast<std::size_t>(k)].imag(), flags);
  }
  return q;
}

OrthonormalBasis circulant_basis_float() {
  const std::array<cxd, kOebN> seed = circulant_seed_values();
  OrthonormalBasis basis;
  basis.n = kOebN;
  basis.columns.assign(kOebN, cvec(kOebN));
  for (int c = 0; c < kOebN; ++c) {
    for (int k = 0; k < kOebN; ++k) {
      basis.columns[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)] =
          seed[static_cast<std::size_t>((k - c + kOebN) % kOebN)];
    }
  }
  return basis;
}

const char* oeb_phase_name(OebPhase phase) {
  switch (phase) {
    case OebPhase::kLoadSeed: return "LoadSeed";
    case OebPhase::kProbeColumn: return "ProbeColumn";
    case OebPhase::kAwaitTau: return "AwaitTau";
    case OebPhase::kAngleIter: return "AngleIter";
    case OebPhase::kDone: return "Done";
  }
  return "?";
}

void block1_step(OebState& state, const Block1Input& input) {
  if (std::holds_alternative<std::array<cxd, kOebN>>(input)) {
    if (state.phase != OebPhase::kLoadSeed) {
      throw protocol_error(std::string("block1_step: seed load in phase ") +
                           oeb_phase_name(state.phase));
    }
    state.rb1 = quantize_seed(std::get<std::array<cxd, kOebN>>(input),
                              state.flags);
    for (int c = 0; c < kOebN; ++c) {
      state.rb2[static_cast<std::size_t>(c)] = state.rb1.column(c);
    }
    OebTraceRow& row = push_row(state, "seed");
    row.w.re = state.rb1.seed_re;
    row.w.im = state.rb1.seed_im;
    refresh_flags(state, row);
    stage_basis_column(state, 0);
    return;
  }
  const FxWord tau = std::get<FxWord>(input);
  if (state.phase != OebPhase::kAwaitTau) {
    throw protocol_error(
        std::string("block1_step: strength word in phase ") +
        oeb_phase_name(state.phase));
  }
  state.rb3[static_cast<std::size_t>(state.rb3_count++)] = tau;
  state.awaiting_tau = false;
  OebTraceRow& row = push_row(state, "tau");
  row.col = state.col;
  row.tau_in = tau;
  if (state.col + 1 < kOebN) {
    stage_basis_column(state, state.col + 1);
    return;
  }
  // All columns observed: initialize the accumulated registers and start
  // the angle iterations.
  state.w_opt = state.rb2[0];
  state.dot = state.rb3[0];
  OebTraceRow& init_row = push_row(state, "init");
  init_row.dot = state.dot;
  init_row.w = state.w_opt;
  state.iter = 0;
  advance_iteration(state);
}

void oeb_send(OebState& state) {
  if (!state.emit_valid || state.awaiting_tau) {
    throw protocol_error(std::string("oeb_send: no staged vector in phase ") +
                         oeb_phase_name(state.phase));
  }
  if (state.phase == OebPhase::kProbeColumn) {
    state.phase = OebPhase::kAwaitTau;
  } else if (state.phase != OebPhase::kAngleIter) {
    throw protocol_error(std::string("oeb_send: invalid phase ") +
                         oeb_phase_name(state.phase));
  }
  state.awaiting_tau = true;
  ++state.probes;
  OebTraceRow& row = push_row(state, "send");
  row.col = state.phase == OebPhase::kAwaitTau ? state.col : -1;
  row.iter = state.phase == OebPhase::kAngleIter ? state.iter : -1;
  row.w = state.w_emit;
}

void block2_iteration(OebState& state, FxWord tau_tilde) {
  if (state.phase != OebPhase::kAngleIter || !state.awaiting_tau) {
    throw protocol_error(
        std::string("block2_iteration: strength word in phase ") +
        oeb_phase_name(state.phase));
  }
  const int i = state.iter;
  if (state.stage == OebAngleStage::kW1Sent) {
    state.tau1 = tau_tilde;
    state.awaiting_tau = false;
    OebTraceRow& row = push_row(state, "tau1");
    row.iter = i;
    row.tau_in = tau_tilde;
    // Stage the second combination (phase offset 7*pi/4: cos +, sin -).
    state.stage = OebAngleStage::kW2Sent;
    state.w_emit = combine_registers(
        state, state.w_opt, state.rb2[static_cast<std::size_t>(i)], state.a1,
        state.a2, kCosQuarterPi, static_cast<FxWord>(-kCosQuarterPi));
    state.emit_valid = true;
    OebTraceRow& row2 = push_row(state, "w2");
    row2.iter = i;
    row2.w = state.w_emit;
    refresh_flags(state, row2);
    return;
  }
  if (state.stage != OebAngleStage::kW2Sent) {
    throw protocol_error("block2_iteration: unexpected stage");
  }
  state.awaiting_tau = false;
  OebTraceRow& row = push_row(state, "tau2");
  row.iter = i;
  row.tau_in = tau_tilde;
  state.stage = OebAngleStage::kUpdate;

  // Phase recovery from the two squared observations (wide Q4.26 partials).
  const std::int64_t t1s =
      static_cast<std::int64_t>(state.tau1) * state.tau1;
  const std::int64_t t2s =
      static_cast<std::int64_t>(tau_tilde) * tau_tilde;
  const std::int64_t num_r = t1s + t2s - 2 * state.k1_26;
  const std::int64_t num_i = t2s - t1s;
  const FxWord gr = saturate16(
      round_div(num_r << kFxFracBits, state.den26), state.flags);
  const FxWord gi = saturate16(
      round_div(num_i << kFxFracBits, state.den26), state.flags);

  if (gr == 0 && gi == 0) {
    // No phase information in the observations; leave the registers as
    // they are.
    OebTraceRow& srow = push_row(state, "skip");
    srow.iter = i;
    srow.a1 = state.a1;
    srow.a2 = state.a2;
    advance_iteration(state);
    return;
  }

  const FxWord neg_gi = saturate16(-static_cast<std::int64_t>(gi),
                                   state.flags);
  FxWord theta = cordic_atan2(neg_gi, gr, state.flags);
  auto [sin_v, cos_v] = cordic_sincos(theta, state.flags);
  std::int64_t al26 = static_cast<std::int64_t>(gr) * cos_v -
                      static_cast<std::int64_t>(gi) * sin_v;
  int sign_flip = 0;
  if (al26 < 0) {
    // MSB of the alignment selects the antipodal angle.
    sign_flip = 1;
    theta = static_cast<FxWord>(theta > 0 ? theta - kFxPi : theta + kFxPi);
    auto cs = cordic_sincos(theta, state.flags);
    sin_v = cs.first;
    cos_v = cs.second;
    al26 = static_cast<std::int64_t>(gr) * cos_v -
           static_cast<std::int64_t>(gi) * sin_v;
  }

  state.w_opt = combine_registers(
      state, state.w_opt, state.rb2[static_cast<std::size_t>(i)], state.a1,
      state.a2, cos_v, sin_v);
  std::int64_t dot26 =
      state.k1_26 + round_shift(2 * state.k2_26 * al26, 26);
  if (dot26 < 0) dot26 = 0;
  state.dot = saturate16(isqrt_round(dot26), state.flags);

  OebTraceRow& urow = push_row(state, "update");
  urow.iter = i;
  urow.a1 = state.a1;
  urow.a2 = state.a2;
  urow.gr = gr;
  urow.gi = gi;
  urow.theta = theta;
  urow.cos_v = cos_v;
  urow.sin_v = sin_v;
  urow.dot = state.dot;
  urow.mu26 = state.mu26;
  urow.k1_26 = state.k1_26;
  urow.k2_26 = state.k2_26;
  urow.den26 = state.den26;
  urow.al26 = al26;
  urow.sign_flip = sign_flip;
  urow.w = state.w_opt;
  refresh_flags(state, urow);

  advance_iteration(state);
}

OebRunResult run_oeb(ProbeOracle& oracle, const TtrConverter& converter,
                     const std::array<cxd, kOebN>& seeds,
                     FxWord skip_threshold) {
  OebState state;
  state.skip_threshold = skip_threshold;
  block1_step(state, Block1Input{seeds});
  while (state.phase != OebPhase::kDone) {
    if (!state.emit_valid) {
      throw protocol_error(std::string("run_oeb: stalled in phase ") +
                           oeb_phase_name(state.phase));
    }
    const FxVec raw = state.w_emit;
    oeb_send(state);
    const BeamformingVector w = normalized(fxvec_to_cvec(raw));
    const ProbeOutcome out = oracle.measure(w);
    if (!out.fed_back || !std::isfinite(out.elapsed_s)) {
      throw timeout_error("run_oeb: probe would never recharge");
    }
    const FxWord tau = fx_from_real(converter(out.elapsed_s), state.flags);
    if (state.phase == OebPhase::kAwaitTau) {
      block1_step(state, Block1Input{tau});
    } else {
      block2_iteration(state, tau);
    }
  }
  OebRunResult result;
  result.w_raw = state.w_opt;
  result.w_float = normalized(fxvec_to_cvec(state.w_opt));
  result.dot = state.dot;
  result.flags = state.flags;
  result.probes = state.probes;
  result.trace = std::move(state.trace);
  return result;
}

std::string oeb_trace_csv(const std::vector<OebTraceRow>& trace) {
  std::string out =
      "step,event,iter,col,tau,a1,a2,gr,gi,theta,cos,sin,dot,mu26,k1_26,"
      "k2_26,den26,al26,sflip,ovf,inv";
  for (int k = 0; k < kOebN; ++k) {
    char h[24];
    std::snprintf(h, sizeof(h), ",w%dre,w%dim", k, k);
    out += h;
  }
  out += "\n";
  for (const OebTraceRow& r : trace) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "%d,%s,%d,%d,%d,%d,%d,%d,%d,%d,%d,%d,%d,%lld,%lld,%lld,"
                  "%lld,%lld,%d,%d,%d",
                  r.step, r.event.c_str(), r.iter, r.col, r.tau_in, r.a1,
                  r.a2, r.gr, r.gi, r.theta, r.cos_v, r.sin_v, r.dot,
                  static_cast<long long>(r.mu26),
                  static_cast<long long>(r.k1_26),
                  static_cast<long long>(r.k2_26),
                  static_cast<long long>(r.den26),
                  static_cast<long long>(r.al26), r.sign_flip,
                  r.flag_overflow, r.flag_invalid);
    out += buf;
    for (int k = 0; k < kOebN; ++k) {
      std::snprintf(buf, sizeof(buf), ",%d,%d", r.w.re[k], r.w.im[k]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace wptbeam
