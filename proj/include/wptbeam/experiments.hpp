// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef WPTBEAM_EXPERIMENTS_HPP_
#define WPTBEAM_EXPERIMENTS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "wptbeam/beamformer.hpp"
#include "wptbeam/config.hpp"

namespace wptbeam {

// Aggregate of one Monte-Carlo point: per-slot means over the canonical
// slot axis (timeout-fallback slots excluded from the axis but included in
// duration and energy).
struct FapStatistics {
  int n = 0;
  int slot_count = 0;  // canonical axis length, 3N-2
  std::vector<double> mean_ttr_s;
  std::vector<double> mean_ph_w;
  // Trials contributing to each slot position (skipped directions shorten
  // individual traces).
  std::vector<long> slot_trials;
  double mean_duration_s = 0.0;
  double mean_energy_j = 0.0;
  double mean_alignment = 0.0;
  int trials = 0;
};

struct SweepPoint {
  double axis_value = 0.0;
  int n = 0;
  double kf = 0.0;
  double mean_duration_s = 0.0;
  double mean_energy_j = 0.0;
  double mean_alignment = 0.0;
  int trials = 0;
};

struct SweepResult {
  std::string axis_name;  // "transmit_power_w" or "distance_m"
  std::vector<SweepPoint> points;
};

// Total transmission time of the acquisition phase: the sum of every
// slot's elapsed time (timed-out slots contribute the time limit).
double fap_duration(const FapTrace& trace);

// Energy banked by the device across the whole acquisition phase:
// sum over slots of harvested power at that slot's strength times the
// slot's elapsed time.
double harvested_energy_during_fap(const FapTrace& trace,
                                   const EfficiencyModel& model,
                                   const ChannelParams& params);

// One full acquisition on one channel realization; the building block the
// aggregators share. seed_index scrambles base_seed order-independently.
struct TrialOutcome {
  FapTrace trace;
  double alignment = 0.0;
  double duration_s = 0.0;
  double energy_j = 0.0;
  double channel_norm = 0.0;
};
TrialOutcome run_trial(const ExperimentConfig& config, int n, double kf,
                       std::uint64_t seed_index);

// Per-slot averages at a single parameter point; requires singleton
// n_list/kf_list in the config.
FapStatistics run_fap_statistics(const ExperimentConfig& config);

// One row per (axis value, n, kf) combination, trials shared across axis
// points through common per-trial seeds.
SweepResult sweep_transmit_power(const ExperimentConfig& config);
SweepResult sweep_distance(const ExperimentConfig& config);

void write_sweep_csv(const SweepResult& result, const std::string& path);
void write_fap_csv(const FapStatistics& stats, const std::string& path);

// Config echo plus aggregate metrics, for machine consumption.
std::string sweep_summary_json(const ExperimentConfig& config,
                               const SweepResult& result);

void write_text_file(const std::string& path, const std::string& content);

// Thread cap honoring WPT_BEAMSIM_THREADS (>= 1); falls back to the
// hardware concurrency.
int trial_thread_count(int trials);

}  // namespace wptbeam

#endif  // WPTBEAM_EXPERIMENTS_HPP_
