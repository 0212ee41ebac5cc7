// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wptbeam/basis.hpp"
#include "wptbeam/beamformer.hpp"
#include "wptbeam/channel.hpp"
#include "wptbeam/complexmath.hpp"
#include "wptbeam/config.hpp"
#include "wptbeam/errors.hpp"
#include "wptbeam/experiments.hpp"
#include "wptbeam/fixedpoint.hpp"
#include "wptbeam/harvester.hpp"
#include "wptbeam/oeb.hpp"
#include "wptbeam/rng.hpp"
#include "wptbeam/simoracle.hpp"

namespace {

using namespace wptbeam;

double parse_maybe_inf(const std::string& text, const char* what) {
  if (text == "inf" || text == "Inf" || text == "INF") {
    return std::numeric_limits<double>::infinity();
  }
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw parameter_error(std::string(what) + ": cannot parse '" + text +
                          "' (expected a number or 'inf')");
  }
}

long parse_long(const std::string& text, const char* what) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw parameter_error(std::string(what) + ": cannot parse '" + text + "'");
  }
}

// String-typed overrides so presence detection and 'inf' handling stay
// uniform; empty string means "keep the config value".
struct CliOverrides {
  std::string config_path;
  std::string n;
  std::string kf;
  std::string dist;
  std::string pt;
  std::string seed;
  std::string trials;
  std::string t_lim;
  std::string basis;
  std::string model;
};

void add_common_options(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--n", o.n, "antenna count (replaces the config n list)");
  cmd->add_option("--kf", o.kf,
                  "line-of-sight power ratio, a number or 'inf' "
                  "(replaces the config kf list)");
  cmd->add_option("--dist", o.dist, "link distance in meters");
  cmd->add_option("--pt", o.pt, "transmit power in watts");
  cmd->add_option("--seed", o.seed, "base RNG seed (default 12345)");
  cmd->add_option("--trials", o.trials, "Monte-Carlo trials per point");
  cmd->add_option("--t-lim", o.t_lim,
                  "per-slot time limit in seconds, a number or 'inf'");
  cmd->add_option("--basis", o.basis, "dft | identity | file:PATH");
  cmd->add_option("--model", o.model,
                  "piecewise | linear | sigmoid | rational");
}

ExperimentConfig build_config(const CliOverrides& o) {
  ExperimentConfig cfg = o.config_path.empty()
                             ? ExperimentConfig{}
                             : config_from_json_file(o.config_path);
  if (!o.n.empty()) {
    cfg.n_list = {static_cast<int>(parse_long(o.n, "--n"))};
  }
  if (!o.kf.empty()) cfg.kf_list = {parse_maybe_inf(o.kf, "--kf")};
  if (!o.dist.empty()) cfg.distance_m = parse_maybe_inf(o.dist, "--dist");
  if (!o.pt.empty()) cfg.transmit_power_w = parse_maybe_inf(o.pt, "--pt");
  if (!o.seed.empty()) {
    cfg.base_seed = static_cast<std::uint64_t>(parse_long(o.seed, "--seed"));
  }
  if (!o.trials.empty()) {
    cfg.trials = static_cast<int>(parse_long(o.trials, "--trials"));
  }
  if (!o.t_lim.empty()) cfg.time_limit_s = parse_maybe_inf(o.t_lim, "--t-lim");
  if (!o.basis.empty()) cfg.basis_name = o.basis;
  if (!o.model.empty()) cfg.model_name = o.model;
  cfg.validate();
  return cfg;
}

std::string kf_text(double kf) {
  if (std::isinf(kf)) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", kf);
  return buf;
}

const char* slot_kind_name(SlotKind kind) {
  switch (kind) {
    case SlotKind::kBasisProbe:
      return "basis";
    case SlotKind::kAngleProbeA:
      return "angle_a";
    case SlotKind::kAngleProbeB:
      return "angle_b";
    case SlotKind::kTimeoutFallback:
      return "fallback";
  }
  return "?";
}

void print_run_header(const ExperimentConfig& cfg, int n, double kf) {
  std::printf(
      "n=%d  kf=%s  dist=%g m  pt=%g W  model=%s  basis=%s  t_lim=%s s  "
      "base seed=%llu\n",
      n, kf_text(kf).c_str(), cfg.distance_m, cfg.transmit_power_w,
      cfg.model_name.c_str(), cfg.basis_name.c_str(),
      std::isinf(cfg.time_limit_s) ? "inf"
                                   : kf_text(cfg.time_limit_s).c_str(),
      static_cast<unsigned long long>(cfg.base_seed));
}

int cmd_probe_demo(const CliOverrides& o, bool force_weak) {
  const ExperimentConfig cfg = build_config(o);
  const int n = cfg.n_list.front();
  const double kf = cfg.kf_list.front();
  const ChannelParams params = make_channel_params(cfg, n, kf);
  const EfficiencyModel model = make_model(cfg.model_name);
  const OrthonormalBasis basis = make_basis(cfg.basis_name, n);
  ChannelVector h =
      sample_channel(params, derive_trial_seed(cfg.base_seed, 0));
  if (force_weak) {
    if (n < 3) {
      throw parameter_error("--force-weak-direction needs at least 3 antennas");
    }
    // Replace the channel's component along basis column 2 with one whose
    // received power is 2e-6 W, far below what recharges within the limit.
    const cvec& q = basis.columns[2];
    const cxd present = inner(q, h);
    const double weak = std::sqrt(
        2e-6 / (params.antenna_gain * params.transmit_power_w));
    h = combined(h, 1.0, q, cxd(weak, 0.0) - present);
  }

  SimulatedHarvesterOracle oracle(h, params, cfg.circuit, model);
  const TtrConverter converter =
      make_abs_dot_converter(cfg.circuit, model, params);
  BeamformerOptions options;
  options.time_limit_s = cfg.time_limit_s;
  if (std::isfinite(cfg.time_limit_s)) {
    options.circuit = cfg.circuit;
    options.reorder_by_strength = true;
  }
  const FapTrace trace = find_optimal_beamformer(oracle, basis, converter,
                                                 options);

  print_run_header(cfg, n, kf);
  std::printf("%-5s %-9s %14s %12s %9s %4s %5s\n", "slot", "kind",
              "elapsed_s", "strength", "timed_out", "col", "iter");
  for (const FapSlot& slot : trace.slots) {
    std::printf("%-5d %-9s %14.6g %12.6g %9s %4d %5d\n", slot.ordinal,
                slot_kind_name(slot.kind), slot.elapsed_s, slot.tau,
                slot.timed_out ? "yes" : "no", slot.basis_col,
                slot.iteration);
  }
  const double alignment = std::abs(inner(h, trace.w_opt)) / norm(h);
  std::printf("slots: %zu\n", trace.slots.size());
  std::printf("alignment |<h,w>|/|h|: %.9f\n", alignment);
  std::printf("recovered dot: %.9g  (channel norm %.9g)\n", trace.dot_prod,
              norm(h));
  std::printf("acquisition duration: %.9g s\n", fap_duration(trace));
  std::printf("harvested energy: %.9g J\n",
              harvested_energy_during_fap(trace, model, params));
  return 0;
}

int cmd_sweep(const CliOverrides& o, const std::string& kind,
              const std::string& out_prefix) {
  const ExperimentConfig cfg = build_config(o);
  SweepResult result;
  if (kind == "power") {
    result = sweep_transmit_power(cfg);
  } else if (kind == "distance") {
    result = sweep_distance(cfg);
  } else {
    throw parameter_error("--kind must be 'power' or 'distance'");
  }
  const std::string prefix =
      out_prefix.empty() ? ("sweep_" + kind) : out_prefix;
  write_sweep_csv(result, prefix + ".csv");
  write_text_file(prefix + ".json", sweep_summary_json(cfg, result));
  std::printf("wrote %s.csv and %s.json (%zu points, %d trials each, "
              "base seed %llu)\n",
              prefix.c_str(), prefix.c_str(), result.points.size(),
              cfg.trials, static_cast<unsigned long long>(cfg.base_seed));
  return 0;
}

int cmd_fap_stats(const CliOverrides& o, const std::string& out_path) {
  const ExperimentConfig cfg = build_config(o);
  const FapStatistics stats = run_fap_statistics(cfg);
  const std::string out = out_path.empty() ? "fap_stats.csv" : out_path;
  write_fap_csv(stats, out);
  print_run_header(cfg, stats.n, cfg.kf_list.front());
  std::printf("%-5s %16s %16s %8s\n", "slot", "mean_ttr_s", "mean_ph_w",
              "trials");
  for (int p = 0; p < stats.slot_count; ++p) {
    const std::size_t i = static_cast<std::size_t>(p);
    std::printf("%-5d %16.9g %16.9g %8ld\n", p + 1, stats.mean_ttr_s[i],
                stats.mean_ph_w[i], stats.slot_trials[i]);
  }
  std::printf("mean acquisition duration: %.9g s\n", stats.mean_duration_s);
  std::printf("mean harvested energy: %.9g J\n", stats.mean_energy_j);
  std::printf("mean alignment: %.9f\n", stats.mean_alignment);
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int cmd_curves(const CliOverrides& o, const std::string& out_path) {
  const ExperimentConfig cfg = build_config(o);
  const EfficiencyModel piecewise = make_model("piecewise");
  const EfficiencyModel linear = make_model("linear");
  const EfficiencyModel sigmoid = make_model("sigmoid");
  const EfficiencyModel rational = make_model("rational");
  std::string csv =
      "p_r_w,eta_piecewise,ph_piecewise_w,eta_linear,ph_linear_w,"
      "eta_sigmoid,ph_sigmoid_w,eta_rational,ph_rational_w,"
      "ttr_piecewise_s\n";
  const int per_decade = 30;
  const double lo = 1e-8;
  const int decades = 7;
  char buf[512];
  for (int i = 0; i <= decades * per_decade; ++i) {
    const double p_r =
        lo * std::pow(10.0, static_cast<double>(i) / per_decade);
    const double ph_pw = harvested_power(piecewise, p_r);
    const double ttr = time_to_recharge(cfg.circuit, cfg.circuit.q_initial_c,
                                        cfg.circuit.q_full_c, ph_pw);
    std::snprintf(buf, sizeof(buf),
                  "%.15g,%.15g,%.15g,%.15g,%.15g,%.15g,%.15g,%.15g,%.15g,"
                  "%.15g\n",
                  p_r, efficiency(piecewise, p_r), ph_pw,
                  efficiency(linear, p_r), harvested_power(linear, p_r),
                  efficiency(sigmoid, p_r), harvested_power(sigmoid, p_r),
                  efficiency(rational, p_r), harvested_power(rational, p_r),
                  ttr);
    csv += buf;
  }
  const std::string out = out_path.empty() ? "curves.csv" : out_path;
  write_text_file(out, csv);
  std::printf("wrote %s (%d samples from %.3g W to %.3g W)\n", out.c_str(),
              decades * per_decade + 1, lo, lo * std::pow(10.0, decades));
  return 0;
}

// ---------------------------------------------------------------------------
// validate: fast self-checks with one PASS/FAIL line each.

struct CheckList {
  bool all_ok = true;
  void report(const char* name, bool ok, const std::string& detail = "") {
    all_ok = all_ok && ok;
    if (detail.empty()) {
      std::printf("%s  %s\n", ok ? "PASS" : "FAIL", name);
    } else {
      std::printf("%s  %s  (%s)\n", ok ? "PASS" : "FAIL", name,
                  detail.c_str());
    }
  }
};

double rel_err(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

double wrap_angle(double a) {
  while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
  while (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

int cmd_validate(bool quick, bool inject_gamma_sign_flip) {
  CheckList checks;
  const StorageCircuit circ{};
  char detail[160];

  {
    const double got = y_aux(circ, 1.5e-3, 3.16e-5);
    std::snprintf(detail, sizeof(detail), "got %.9f, want 714.023915942",
                  got);
    checks.report("charge_aux_anchor", rel_err(got, 714.023915942) < 1e-9,
                  detail);
  }
  {
    const double p_minus15dbm = std::pow(10.0, -1.5) * 1e-3;
    const double got = time_to_recharge(circ, circ.q_initial_c,
                                        circ.q_full_c, p_minus15dbm);
    std::snprintf(detail, sizeof(detail), "got %.9f s, want 106.796133136 s",
                  got);
    checks.report("recharge_time_anchor", rel_err(got, 106.796133136) < 1e-9,
                  detail);
  }
  {
    const int samples = quick ? 25 : 200;
    double worst = 0.0;
    for (int i = 0; i <= samples; ++i) {
      const double p = 1e-6 * std::pow(10.0, 4.0 * i / samples);
      const double t = time_to_recharge(circ, circ.q_initial_c,
                                        circ.q_full_c, p);
      const double back = invert_time_to_recharge(circ, circ.q_initial_c,
                                                  circ.q_full_c, t);
      worst = std::max(worst, rel_err(back, p));
    }
    std::snprintf(detail, sizeof(detail), "worst rel err %.3g", worst);
    checks.report("recharge_inversion_round_trip", worst < 1e-9, detail);
  }
  {
    double worst = 0.0;
    for (int n : {5, 10}) {
      const OrthonormalBasis b = dft_basis(n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const double want = i == j ? 1.0 : 0.0;
          worst = std::max(worst, std::abs(std::abs(inner(
                                      b.columns[static_cast<std::size_t>(i)],
                                      b.columns[static_cast<std::size_t>(j)]))
                                  - want));
        }
      }
    }
    std::snprintf(detail, sizeof(detail), "worst Gram deviation %.3g", worst);
    checks.report("basis_orthonormality", worst < 1e-10, detail);
  }
  {
    const double t1 = std::sqrt(1.0 + std::numbers::sqrt2 / 2.0);
    const double t2 = std::sqrt(1.0 - std::numbers::sqrt2 / 2.0);
    const auto [gr, gi] = solve_gammas(t1, t2, 1.0, 0.5);
    const double theta = select_theta(gr, gi);
    const bool ok = std::abs(gr) < 1e-12 && std::abs(gi + 1.0) < 1e-12 &&
                    std::abs(theta - std::numbers::pi / 2.0) < 1e-12;
    std::snprintf(detail, sizeof(detail),
                  "gammas (%.3g, %.3g), theta %.9f", gr, gi, theta);
    checks.report("phase_solver_worked_example", ok, detail);
  }
  {
    // Forward-model random instances, recover the phase, and compare with
    // a dense grid argmax. The hidden fault-injection flag flips the sign
    // of the recovered imaginary part first, which must break this check.
    const int instances = quick ? 50 : 400;
    const int grid = 4096;
    Rng rng(0xC0FFEEULL);
    double worst = 0.0;
    for (int k = 0; k < instances; ++k) {
      const double a1 = 0.05 + rng.next_unit_open();
      const double a2 = 0.05 + rng.next_unit_open();
      const double mu = a1 * a1 + a2 * a2;
      const double k1 = (a1 * a1 * a1 * a1 + a2 * a2 * a2 * a2) / mu;
      const double k2 = (a1 * a1) * (a2 * a2) / mu;
      const double psi =
          (2.0 * rng.next_unit_open() - 1.0) * std::numbers::pi;
      const double gr_true = std::cos(psi);
      const double gi_true = std::sin(psi);
      const double c = std::numbers::sqrt2 / 2.0;
      const double t1sq = k1 + 2.0 * k2 * (gr_true * c - gi_true * c);
      const double t2sq = k1 + 2.0 * k2 * (gr_true * c + gi_true * c);
      auto [gr, gi] = solve_gammas(std::sqrt(t1sq), std::sqrt(t2sq), k1, k2);
      if (inject_gamma_sign_flip) gi = -gi;
      const double theta = select_theta(gr, gi);
      // Dense argmax of the aligned component as an independent reference.
      double best_v = -1e300;
      double best_theta = 0.0;
      for (int g = 1; g <= grid; ++g) {
        const double cand =
            -std::numbers::pi + 2.0 * std::numbers::pi * g / grid;
        const double v =
            gr_true * std::cos(cand) - gi_true * std::sin(cand);
        if (v > best_v) {
          best_v = v;
          best_theta = cand;
        }
      }
      worst = std::max(worst,
                       std::abs(wrap_angle(theta - best_theta)));
    }
    const double tol = 2.0 * std::numbers::pi / grid + 1e-12;
    std::snprintf(detail, sizeof(detail),
                  "worst angle error %.6g rad over %d instances", worst,
                  instances);
    checks.report("phase_recovery_vs_grid", worst <= tol, detail);
  }
  {
    const int channels = quick ? 5 : 25;
    ExperimentConfig cfg;
    cfg.time_limit_s = std::numeric_limits<double>::infinity();
    double worst = 1.0;
    for (int s = 0; s < channels; ++s) {
      const TrialOutcome out =
          run_trial(cfg, 5, 2.0, static_cast<std::uint64_t>(s));
      worst = std::min(worst, out.alignment);
    }
    std::snprintf(detail, sizeof(detail), "worst alignment %.12f", worst);
    checks.report("noiseless_alignment", worst >= 1.0 - 1e-7, detail);
  }
  {
    const int samples = quick ? 500 : 5000;
    Rng rng(0xFACADEULL);
    double worst_atan = 0.0;
    double worst_trig = 0.0;
    FxFlags flags;
    for (int k = 0; k < samples; ++k) {
      const double theta =
          (2.0 * rng.next_unit_open() - 1.0) * std::numbers::pi;
      const FxWord tq = fx_from_real(theta, flags);
      const auto [s, c] = cordic_sincos(tq, flags);
      const double want_s = std::sin(fx_to_real(tq));
      const double want_c = std::cos(fx_to_real(tq));
      worst_trig = std::max({worst_trig, std::abs(fx_to_real(s) - want_s),
                             std::abs(fx_to_real(c) - want_c)});
      const double r = 0.3 + 0.7 * rng.next_unit_open();
      const FxWord xq = fx_from_real(r * std::cos(theta), flags);
      const FxWord yq = fx_from_real(r * std::sin(theta), flags);
      if (xq == 0 && yq == 0) continue;
      const FxWord aq = cordic_atan2(yq, xq, flags);
      const double want =
          std::atan2(fx_to_real(yq), fx_to_real(xq));
      worst_atan = std::max(
          worst_atan, std::abs(wrap_angle(fx_to_real(aq) - want)));
    }
    const double bound = std::pow(2.0, -11.0);
    std::snprintf(detail, sizeof(detail),
                  "max |atan2 err| %.6g, max |sin/cos err| %.6g, bound %.6g",
                  worst_atan, worst_trig, bound);
    checks.report("cordic_error_bound",
                  worst_atan < bound && worst_trig < bound, detail);
  }
  {
    FxFlags flags;
    const CirculantQ qb = quantize_seed(circulant_seed_values(), flags);
    double worst = 0.0;
    for (int i = 0; i < kOebN; ++i) {
      for (int j = 0; j < kOebN; ++j) {
        const cvec ci = fxvec_to_cvec(qb.column(i));
        const cvec cj = fxvec_to_cvec(qb.column(j));
        const double want = i == j ? 1.0 : 0.0;
        worst = std::max(worst, std::abs(std::abs(inner(ci, cj)) - want));
      }
    }
    std::snprintf(detail, sizeof(detail),
                  "worst Gram deviation %.3g (quantized registers)", worst);
    checks.report("probe_rom_gram", worst < std::pow(2.0, -10.0), detail);
  }

  std::printf("%s\n", checks.all_ok ? "ALL CHECKS PASSED"
                                    : "SOME CHECKS FAILED");
  return checks.all_ok ? 0 : 1;
}

int cmd_fixed_vs_float(const CliOverrides& o, const std::string& out_path,
                       const std::string& trace_path) {
  const ExperimentConfig cfg = build_config(o);
  if (cfg.n_list.front() != kOebN) {
    throw parameter_error("fixed-vs-float: the register datapath is built "
                          "for 5 antennas");
  }
  const double kf = cfg.kf_list.front();
  const EfficiencyModel model = make_model(cfg.model_name);
  const ChannelParams params = make_channel_params(cfg, kOebN, kf);
  const OrthonormalBasis float_basis = circulant_basis_float();
  const auto seeds = circulant_seed_values();
  const TtrConverter converter =
      make_abs_dot_converter(cfg.circuit, model, params);

  std::string csv =
      "trial,align_float,align_fixed,cosine_similarity,probes,"
      "flag_overflow,flag_invalid\n";
  double min_fx = 1.0;
  double sum_fx = 0.0;
  double min_fl = 1.0;
  double sum_fl = 0.0;
  double min_cos = 1.0;
  int flagged = 0;
  char buf[256];
  for (int t = 0; t < cfg.trials; ++t) {
    ChannelVector h = sample_channel(
        params, derive_trial_seed(cfg.base_seed,
                                  static_cast<std::uint64_t>(t)));
    h = scaled(h, cxd(1.0 / norm(h), 0.0));  // register-range contract

    SimulatedHarvesterOracle float_oracle(h, params, cfg.circuit, model);
    const FapTrace trace = find_optimal_beamformer(float_oracle, float_basis,
                                                   converter, {});
    const double align_fl = std::abs(inner(h, trace.w_opt)) / norm(h);

    SimulatedHarvesterOracle fx_oracle(h, params, cfg.circuit, model);
    const OebRunResult run = run_oeb(fx_oracle, converter, seeds);
    const double align_fx =
        std::abs(inner(h, run.w_float)) / (norm(h) * norm(run.w_float));
    const double cos_sim = std::abs(inner(trace.w_opt, run.w_float)) /
                           (norm(trace.w_opt) * norm(run.w_float));

    min_fx = std::min(min_fx, align_fx);
    min_fl = std::min(min_fl, align_fl);
    min_cos = std::min(min_cos, cos_sim);
    sum_fx += align_fx;
    sum_fl += align_fl;
    if (run.flags.overflow || run.flags.invalid) ++flagged;
    std::snprintf(buf, sizeof(buf), "%d,%.15g,%.15g,%.15g,%d,%d,%d\n", t,
                  align_fl, align_fx, cos_sim, run.probes,
                  run.flags.overflow ? 1 : 0, run.flags.invalid ? 1 : 0);
    csv += buf;
    if (t == 0 && !trace_path.empty()) {
      write_text_file(trace_path, oeb_trace_csv(run.trace));
    }
  }

  // Worst-case datapath trig error over a dense angle sweep.
  double worst_trig = 0.0;
  FxFlags flags;
  for (int k = -25736; k <= 25736; k += 2) {
    const FxWord tq = static_cast<FxWord>(k);
    const auto [s, c] = cordic_sincos(tq, flags);
    worst_trig = std::max(
        {worst_trig, std::abs(fx_to_real(s) - std::sin(fx_to_real(tq))),
         std::abs(fx_to_real(c) - std::cos(fx_to_real(tq)))});
  }

  print_run_header(cfg, kOebN, kf);
  std::printf("trials: %d\n", cfg.trials);
  std::printf("float path alignment: mean %.9f, min %.9f\n",
              sum_fl / cfg.trials, min_fl);
  std::printf("fixed path alignment: mean %.9f, min %.9f\n",
              sum_fx / cfg.trials, min_fx);
  std::printf("min fixed/float cosine similarity: %.9f\n", min_cos);
  std::printf("trials with saturation or invalid flags: %d\n", flagged);
  std::printf("cordic max sin/cos error: %.6g (budget %.6g)\n", worst_trig,
              std::pow(2.0, -11.0));
  if (!out_path.empty()) {
    write_text_file(out_path, csv);
    std::printf("wrote %s\n", out_path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Beamforming-from-recharge-times simulator"};
  app.require_subcommand(1);

  CliOverrides o;

  CLI::App* probe = app.add_subcommand(
      "probe-demo", "Run one acquisition and print the slot table");
  add_common_options(probe, o);
  bool force_weak = false;
  probe->add_flag("--force-weak-direction", force_weak,
                  "plant a direction too weak to recharge within the limit");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Monte-Carlo sweep over transmit power or distance");
  add_common_options(sweep, o);
  std::string sweep_kind = "power";
  std::string sweep_out;
  sweep->add_option("--kind", sweep_kind, "power | distance");
  sweep->add_option("--out", sweep_out,
                    "output prefix (writes PREFIX.csv and PREFIX.json)");

  CLI::App* fap = app.add_subcommand(
      "fap-stats", "Per-slot averages at one parameter point");
  add_common_options(fap, o);
  std::string fap_out;
  fap->add_option("--out", fap_out, "output CSV path");

  CLI::App* curves = app.add_subcommand(
      "curves", "Harvester model curves and recharge times on a power grid");
  add_common_options(curves, o);
  std::string curves_out;
  curves->add_option("--out", curves_out, "output CSV path");

  CLI::App* validate = app.add_subcommand(
      "validate", "Run built-in self-checks and report PASS/FAIL");
  bool quick = false;
  bool flip = false;
  validate->add_flag("--quick", quick, "smaller sample counts");
  validate->add_flag("--inject-gamma-sign-flip", flip)->group("");

  CLI::App* fxf = app.add_subcommand(
      "fixed-vs-float",
      "Compare the 16-bit register datapath with the double-precision path");
  add_common_options(fxf, o);
  std::string fxf_out;
  std::string fxf_trace;
  fxf->add_option("--out", fxf_out, "per-trial CSV path");
  fxf->add_option("--trace-out", fxf_trace,
                  "write the first trial's datapath trace CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*probe) return cmd_probe_demo(o, force_weak);
    if (*sweep) return cmd_sweep(o, sweep_kind, sweep_out);
    if (*fap) return cmd_fap_stats(o, fap_out);
    if (*curves) return cmd_curves(o, curves_out);
    if (*validate) return cmd_validate(quick, flip);
    if (*fxf) return cmd_fixed_vs_float(o, fxf_out, fxf_trace);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
