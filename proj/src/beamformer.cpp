// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "wptbeam/beamformer.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "wptbeam/errors.hpp"

namespace wptbeam {

namespace {

constexpr double kPhiA = std::numbers::pi / 4.0;
constexpr double kPhiB = 7.0 * std::numbers::pi / 4.0;
constexpr double kOrthogonalityTol = 1e-8;
// Residual times this close to a full recharge cycle leave no measurable
// charge contribution from the timed-out direction.
constexpr double kChargeRecoveryFloor = 1e-9;

int record_slot(FapTrace* trace, SlotKind kind, double elapsed_s, double tau,
                bool timed_out, int basis_col, int iteration,
                const BeamformingVector& w) {
  if (trace == nullptr) return -1;
  FapSlot slot;
  slot.ordinal = static_cast<int>(trace->slots.size());
  slot.kind = kind;
  slot.elapsed_s = elapsed_s;
  slot.tau = tau;
  slot.timed_out = timed_out;
  slot.basis_col = basis_col;
  slot.iteration = iteration;
  slot.w = w;
  trace->slots.push_back(std::move(slot));
  return static_cast<int>(trace->slots.size()) - 1;
}

// Strength of a direction that failed to recharge within the limit,
// reconstructed from the residual recharge time t_res_s observed after
// switching to a vector with known full-cycle time t_full_known_s. Returns
// zero when the direction left no recoverable charge.
double recover_weak_tau(const StorageCircuit& circuit,
                        const TtrConverter& converter, double t_lim_s,
                        double t_res_s, double t_full_known_s) {
  const double q0 = circuit.q_initial_c;
  const double qm = circuit.q_full_c;
  const double p_known =
      invert_time_to_recharge(circuit, q0, qm, t_full_known_s);
  const double t_to_qs = time_to_recharge(circuit, q0, qm, p_known) - t_res_s;
  if (t_to_qs <= 0.0) return 0.0;
  const double q_s = charge_after(circuit, q0, p_known, t_to_qs);
  if (q_s - q0 <= kChargeRecoveryFloor * (qm - q0)) return 0.0;
  try {
    const double p_weak = invert_time_to_recharge(circuit, q0, q_s, t_lim_s);
    return converter(time_to_recharge(circuit, q0, qm, p_weak));
  } catch (const non_invertible_error&) {
    return 0.0;
  }
}

}  // namespace

std::pair<double, double> solve_gammas(double tau_tilde1, double tau_tilde2,
                                       double kappa1, double kappa2) {
  if (tau_tilde1 < 0.0 || tau_tilde2 < 0.0 || kappa1 < 0.0) {
    throw parameter_error("solve_gammas: negative observation or kappa1");
  }
  if (!(kappa2 > 0.0)) {
    throw degenerate_coefficient_error(
        "solve_gammas: kappa2 = " + std::to_string(kappa2) +
        " leaves the phase system singular");
  }
  const double denom = 2.0 * std::numbers::sqrt2 * kappa2;
  const double t1s = tau_tilde1 * tau_tilde1;
  const double t2s = tau_tilde2 * tau_tilde2;
  return {(t1s + t2s - 2.0 * kappa1) / denom, (t2s - t1s) / denom};
}

double select_theta(double gamma_r, double gamma_i) {
  if (gamma_r == 0.0 && gamma_i == 0.0) {
    throw degenerate_angle_error("select_theta: both components are zero");
  }
  return std::atan2(-gamma_i, gamma_r);
}

BeamformingVector intermediate_vector(const BeamformingVector& w_cur,
                                      const cvec& q_next, double alpha1,
                                      double alpha2, double phi) {
  if (w_cur.size() != q_next.size()) {
    throw shape_error("intermediate_vector: size mismatch");
  }
  if (alpha1 < 0.0 || alpha2 < 0.0) {
    throw parameter_error("intermediate_vector: coefficients must be >= 0");
  }
  if (alpha1 == 0.0 && alpha2 == 0.0) {
    throw degenerate_coefficient_error(
        "intermediate_vector: both coefficients are zero");
  }
  if (alpha2 == 0.0) return w_cur;
  const cxd rot{std::cos(phi), std::sin(phi)};
  if (alpha1 == 0.0) return scaled(q_next, rot);
  const double overlap = std::abs(inner(w_cur, q_next));
  if (overlap > kOrthogonalityTol) {
    throw parameter_error(
        "intermediate_vector: vectors are not orthogonal, |<w,q>| = " +
        std::to_string(overlap));
  }
  return normalized(combined(w_cur, alpha1, q_next, alpha2 * rot));
}

double brute_force_theta(const ChannelVector& h, const BeamformingVector& w_cur,
                         const cvec& q_next, double alpha1, double alpha2,
                         int grid_points) {
  if (grid_points < 360) {
    throw parameter_error("brute_force_theta: need at least 360 grid points");
  }
  double best_theta = 0.0;
  double best_val = -1.0;
  for (int g = 1; g <= grid_points; ++g) {
    const double theta =
        -std::numbers::pi +
        2.0 * std::numbers::pi * static_cast<double>(g) /
            static_cast<double>(grid_points);
    const BeamformingVector w =
        intermediate_vector(w_cur, q_next, alpha1, alpha2, theta);
    const double val = std::abs(inner(h, w));
    if (val > best_val) {
      best_val = val;
      best_theta = theta;
    }
  }
  return best_theta;
}

std::vector<double> probe_basis(ProbeOracle& oracle,
                                const OrthonormalBasis& basis,
                                const TtrConverter& converter,
                                FapTrace* trace) {
  const std::size_t n = basis.columns.size();
  std::vector<double> taus(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const ProbeOutcome out = oracle.measure(basis.columns[i]);
    if (!out.fed_back || !std::isfinite(out.elapsed_s)) {
      throw timeout_error("probe_basis: column " + std::to_string(i) +
                          " would never recharge; enable a time limit");
    }
    taus[i] = converter(out.elapsed_s);
    record_slot(trace, SlotKind::kBasisProbe, out.elapsed_s, taus[i], false,
                static_cast<int>(i), -1, basis.columns[i]);
  }
  return taus;
}

TimedProbeResult probe_with_time_limit(ProbeOracle& oracle,
                                       const OrthonormalBasis& basis,
                                       const StorageCircuit& circuit,
                                       const TtrConverter& converter,
                                       double t_lim_s, FapTrace* trace) {
  circuit.validate();
  if (!(t_lim_s > 0.0)) {
    throw parameter_error("probe_with_time_limit: time limit must be > 0");
  }
  const std::size_t n = basis.columns.size();
  TimedProbeResult result;
  result.taus.assign(n, 0.0);
  result.full_cycle_s.assign(n, 0.0);
  std::vector<int> slot_of_col(n, -1);
  std::vector<std::size_t> pending;
  int best = -1;

  auto resolve_pending = [&](double t_res_s, double t_full_known_s) {
    if (pending.size() == 1) {
      const std::size_t k = pending.front();
      const double tau =
          recover_weak_tau(circuit, converter, t_lim_s, t_res_s,
                           t_full_known_s);
      result.taus[k] = tau;
      result.events.push_back(
          {static_cast<int>(k), t_res_s, tau, tau == 0.0});
      if (trace != nullptr && slot_of_col[k] >= 0) {
        trace->slots[static_cast<std::size_t>(slot_of_col[k])].tau = tau;
      }
    } else {
      // Several consecutive windows share unknown boundary charges; the
      // split is under-determined, so every one of them is written off.
      for (std::size_t j : pending) {
        result.events.push_back({static_cast<int>(j), t_res_s, 0.0, true});
      }
    }
    pending.clear();
  };

  for (std::size_t i = 0; i < n; ++i) {
    const cvec& q = basis.columns[i];
    const ProbeOutcome out = oracle.measure(q, t_lim_s);
    if (!out.fed_back && !std::isfinite(t_lim_s)) {
      // An unlimited slot only fails to feed back when it never would.
      throw timeout_error("probe_with_time_limit: column " +
                          std::to_string(i) +
                          " would never recharge; enable a finite limit");
    }
    if (out.fed_back && pending.empty()) {
      const double tau = converter(out.elapsed_s);
      result.taus[i] = tau;
      result.full_cycle_s[i] = out.elapsed_s;
      slot_of_col[i] = record_slot(trace, SlotKind::kBasisProbe, out.elapsed_s,
                                   tau, false, static_cast<int>(i), -1, q);
      if (best < 0 || tau > result.taus[static_cast<std::size_t>(best)]) {
        best = static_cast<int>(i);
      }
    } else if (out.fed_back) {
      // Feedback arrived on top of charge accumulated by the pending
      // timed-out windows: this is a residual measurement, not a clean
      // cycle, so re-probe the same column from the reset charge.
      const double t_res = out.elapsed_s;
      const int fb_slot = record_slot(trace, SlotKind::kTimeoutFallback, t_res,
                                      0.0, false, static_cast<int>(i), -1, q);
      const ProbeOutcome clean = oracle.measure(q, t_lim_s);
      if (!clean.fed_back) {
        for (std::size_t j : pending) {
          result.events.push_back({static_cast<int>(j), t_res, 0.0, true});
        }
        pending.clear();
        pending.push_back(i);
        slot_of_col[i] = record_slot(trace, SlotKind::kBasisProbe, t_lim_s,
                                     0.0, true, static_cast<int>(i), -1, q);
      } else {
        const double tau = converter(clean.elapsed_s);
        result.taus[i] = tau;
        result.full_cycle_s[i] = clean.elapsed_s;
        slot_of_col[i] =
            record_slot(trace, SlotKind::kBasisProbe, clean.elapsed_s, tau,
                        false, static_cast<int>(i), -1, q);
        if (trace != nullptr && fb_slot >= 0) {
          trace->slots[static_cast<std::size_t>(fb_slot)].tau = tau;
        }
        if (best < 0 || tau > result.taus[static_cast<std::size_t>(best)]) {
          best = static_cast<int>(i);
        }
        resolve_pending(t_res, clean.elapsed_s);
      }
    } else if (best >= 0) {
      // Timed out with a known strong vector available: switch to it and
      // time the residual recharge.
      slot_of_col[i] = record_slot(trace, SlotKind::kBasisProbe, t_lim_s, 0.0,
                                   true, static_cast<int>(i), -1, q);
      const std::size_t b = static_cast<std::size_t>(best);
      const ProbeOutcome fb = oracle.measure(basis.columns[b], t_lim_s);
      if (!fb.fed_back) {
        throw numeric_error(
            "probe_with_time_limit: fallback vector failed to recharge "
            "within the limit it previously met");
      }
      record_slot(trace, SlotKind::kTimeoutFallback, fb.elapsed_s,
                  result.taus[b], false, best, -1, basis.columns[b]);
      const double tau = recover_weak_tau(circuit, converter, t_lim_s,
                                          fb.elapsed_s, result.full_cycle_s[b]);
      result.taus[i] = tau;
      result.events.push_back(
          {static_cast<int>(i), fb.elapsed_s, tau, tau == 0.0});
      if (trace != nullptr && slot_of_col[i] >= 0) {
        trace->slots[static_cast<std::size_t>(slot_of_col[i])].tau = tau;
      }
    } else {
      // No completed probe yet; move on to the next basis column.
      pending.push_back(i);
      slot_of_col[i] = record_slot(trace, SlotKind::kBasisProbe, t_lim_s, 0.0,
                                   true, static_cast<int>(i), -1, q);
    }
  }
  if (best < 0) {
    throw channel_unreachable_error(
        "probe_with_time_limit: every basis direction timed out");
  }
  return result;
}

FapTrace find_optimal_beamformer(ProbeOracle& oracle,
                                 const OrthonormalBasis& basis,
                                 const TtrConverter& converter,
                                 const BeamformerOptions& options) {
  const std::size_t n = basis.columns.size();
  if (n == 0) throw parameter_error("find_optimal_beamformer: empty basis");
  const bool limited = std::isfinite(options.time_limit_s);
  if (limited && !options.circuit.has_value()) {
    throw parameter_error(
        "find_optimal_beamformer: a finite time limit requires the storage "
        "circuit for timeout recovery");
  }

  FapTrace trace;
  std::vector<double> taus;
  std::vector<double> full_cycle(n, 0.0);
  if (limited) {
    TimedProbeResult probed = probe_with_time_limit(
        oracle, basis, *options.circuit, converter, options.time_limit_s,
        &trace);
    taus = std::move(probed.taus);
    full_cycle = std::move(probed.full_cycle_s);
  } else {
    taus = probe_basis(oracle, basis, converter, &trace);
    // A clean unlimited probe of column i took its full cycle.
    for (std::size_t i = 0; i < n; ++i) {
      full_cycle[i] = trace.slots[i].elapsed_s;
    }
  }

  // Effective column order for the angle phase.
  std::vector<int> order(n);
  std::vector<cvec> cols;
  std::vector<double> etaus;
  std::vector<double> efull;
  if (options.reorder_by_strength) {
    ReorderedBasis r = reorder_basis_descending(basis, taus);
    cols = std::move(r.basis.columns);
    etaus = std::move(r.taus);
    order = std::move(r.order);
    efull.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      efull[i] = full_cycle[static_cast<std::size_t>(order[i])];
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
    cols = basis.columns;
    etaus = taus;
    efull = full_cycle;
  }
  trace.probe_order = order;

  // Strongest column with a known clean full cycle, the fallback target
  // for angle-probe timeouts.
  int best_pos = -1;
  for (std::size_t i = 0; i < n; ++i) {
    if (efull[i] > 0.0 &&
        (best_pos < 0 || etaus[i] > etaus[static_cast<std::size_t>(best_pos)])) {
      best_pos = static_cast<int>(i);
    }
  }
  if (best_pos < 0 || !(etaus[static_cast<std::size_t>(best_pos)] > 0.0)) {
    throw channel_unreachable_error(
        "find_optimal_beamformer: no basis direction produced feedback");
  }

  auto probe_combination = [&](const BeamformingVector& w, int iteration,
                               SlotKind kind) -> double {
    const ProbeOutcome out = oracle.measure(w, options.time_limit_s);
    if (out.fed_back) {
      const double tau_tilde = converter(out.elapsed_s);
      record_slot(&trace, kind, out.elapsed_s, tau_tilde, false, -1, iteration,
                  w);
      return tau_tilde;
    }
    if (!limited) {
      throw timeout_error(
          "find_optimal_beamformer: combination probe would never recharge; "
          "enable a time limit");
    }
    const int slot_idx = record_slot(&trace, kind, options.time_limit_s, 0.0,
                                     true, -1, iteration, w);
    const std::size_t b = static_cast<std::size_t>(best_pos);
    const ProbeOutcome fb = oracle.measure(cols[b], options.time_limit_s);
    if (!fb.fed_back) {
      throw numeric_error(
          "find_optimal_beamformer: fallback vector failed to recharge "
          "within the limit it previously met");
    }
    record_slot(&trace, SlotKind::kTimeoutFallback, fb.elapsed_s, etaus[b],
                false, order[b], iteration, cols[b]);
    const double tau_tilde =
        recover_weak_tau(*options.circuit, converter, options.time_limit_s,
                         fb.elapsed_s, efull[b]);
    trace.slots[static_cast<std::size_t>(slot_idx)].tau = tau_tilde;
    return tau_tilde;
  };

  BeamformingVector w_opt = cols[0];
  double dot_prod = etaus[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double alpha1 = dot_prod;
    const double alpha2 = etaus[i];
    const double thr = options.degeneracy_rel_threshold;
    if (alpha2 <= thr * alpha1 || alpha2 == 0.0) continue;
    if (alpha1 <= thr * alpha2) {
      // The accumulated vector carries nothing measurable; restart from
      // this stronger column.
      w_opt = cols[i];
      dot_prod = alpha2;
      continue;
    }
    const double a1s = alpha1 * alpha1;
    const double a2s = alpha2 * alpha2;
    const double mu = a1s + a2s;
    const double kappa1 = (a1s * a1s + a2s * a2s) / mu;
    const double kappa2 = a1s * a2s / mu;
    const int iteration = static_cast<int>(i);
    const BeamformingVector w1 =
        intermediate_vector(w_opt, cols[i], alpha1, alpha2, kPhiA);
    const double tau_t1 =
        probe_combination(w1, iteration, SlotKind::kAngleProbeA);
    const BeamformingVector w2 =
        intermediate_vector(w_opt, cols[i], alpha1, alpha2, kPhiB);
    const double tau_t2 =
        probe_combination(w2, iteration, SlotKind::kAngleProbeB);

    double theta = 0.0;
    double aligned = 0.0;
    try {
      const auto [gamma_r, gamma_i] =
          solve_gammas(tau_t1, tau_t2, kappa1, kappa2);
      theta = select_theta(gamma_r, gamma_i);
      aligned = gamma_r * std::cos(theta) - gamma_i * std::sin(theta);
    } catch (const degenerate_angle_error&) {
      // Both probes matched kappa1 exactly; no phase information, so the
      // new column is left out of the running combination.
      continue;
    }
    w_opt = intermediate_vector(w_opt, cols[i], alpha1, alpha2, theta);
    dot_prod = std::sqrt(std::max(0.0, kappa1 + 2.0 * kappa2 * aligned));
  }
  trace.w_opt = std::move(w_opt);
  trace.dot_prod = dot_prod;
  return trace;
}

}  // namespace wptbeam
