// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "doctest.h"
#include "wptbeam/config.hpp"
#include "wptbeam/errors.hpp"
#include "wptbeam/experiments.hpp"

using namespace wptbeam;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config(int trials = 8) {
  ExperimentConfig cfg;
  cfg.trials = trials;
  return cfg;
}

}  // namespace

TEST_CASE("trials are deterministic functions of the seed index") {
  const ExperimentConfig cfg = small_config();
  const TrialOutcome a = run_trial(cfg, 5, 2.0, 3);
  const TrialOutcome b = run_trial(cfg, 5, 2.0, 3);
  CHECK(a.alignment == b.alignment);
  CHECK(a.duration_s == b.duration_s);
  CHECK(a.energy_j == b.energy_j);
  REQUIRE(a.trace.slots.size() == b.trace.slots.size());
  for (std::size_t i = 0; i < a.trace.slots.size(); ++i) {
    CHECK(a.trace.slots[i].elapsed_s == b.trace.slots[i].elapsed_s);
    CHECK(a.trace.slots[i].tau == b.trace.slots[i].tau);
  }
  const TrialOutcome c = run_trial(cfg, 5, 2.0, 4);
  CHECK(c.duration_s != a.duration_s);
}

TEST_CASE("trial bookkeeping matches its own trace") {
  const ExperimentConfig cfg = small_config();
  const TrialOutcome out = run_trial(cfg, 5, 2.0, 0);
  double dur = 0.0;
  for (const FapSlot& s : out.trace.slots) dur += s.elapsed_s;
  CHECK(out.duration_s == doctest::Approx(dur).epsilon(1e-15));
  CHECK(out.alignment >= 1.0 - 1e-7);
  CHECK(out.energy_j > 0.0);
  CHECK(out.channel_norm > 0.0);
}

TEST_CASE("an infinite ratio removes all randomness") {
  const ExperimentConfig cfg = small_config();
  const double inf = std::numeric_limits<double>::infinity();
  const TrialOutcome a = run_trial(cfg, 5, inf, 0);
  const TrialOutcome b = run_trial(cfg, 5, inf, 17);
  CHECK(a.duration_s == b.duration_s);
  CHECK(a.energy_j == b.energy_j);
  CHECK(a.alignment == b.alignment);
}

TEST_CASE("per-slot statistics cover the canonical axis") {
  ExperimentConfig cfg = small_config(10);
  const FapStatistics stats = run_fap_statistics(cfg);
  CHECK(stats.n == 5);
  CHECK(stats.slot_count == 13);
  REQUIRE(stats.mean_ttr_s.size() == 13);
  REQUIRE(stats.mean_ph_w.size() == 13);
  REQUIRE(stats.slot_trials.size() == 13);
  for (int p = 0; p < 13; ++p) {
    CHECK(stats.slot_trials[p] == 10);
    CHECK(stats.mean_ttr_s[p] > 0.0);
    CHECK(stats.mean_ph_w[p] > 0.0);
  }
  CHECK(stats.mean_alignment >= 1.0 - 1e-7);

  ExperimentConfig two_points = cfg;
  two_points.n_list = {5, 10};
  CHECK_THROWS_AS(run_fap_statistics(two_points), parameter_error);
}

TEST_CASE("the deterministic campaign ends on its strongest slot") {
  ExperimentConfig cfg = small_config(3);
  cfg.kf_list = {std::numeric_limits<double>::infinity()};
  const FapStatistics stats = run_fap_statistics(cfg);
  const double last = stats.mean_ph_w.back();
  for (int p = 0; p < 5; ++p) {
    CHECK(last >= stats.mean_ph_w[p]);
  }
}

TEST_CASE("parallel and sequential runs produce identical statistics") {
  ExperimentConfig cfg = small_config(12);
  setenv("WPT_BEAMSIM_THREADS", "1", 1);
  const FapStatistics seq = run_fap_statistics(cfg);
  setenv("WPT_BEAMSIM_THREADS", "4", 1);
  const FapStatistics par = run_fap_statistics(cfg);
  unsetenv("WPT_BEAMSIM_THREADS");
  CHECK(seq.mean_duration_s == par.mean_duration_s);
  CHECK(seq.mean_energy_j == par.mean_energy_j);
  CHECK(seq.mean_alignment == par.mean_alignment);
  for (int p = 0; p < seq.slot_count; ++p) {
    CHECK(seq.mean_ttr_s[p] == par.mean_ttr_s[p]);
    CHECK(seq.mean_ph_w[p] == par.mean_ph_w[p]);
  }
}

TEST_CASE("thread cap respects the environment and the trial count") {
  setenv("WPT_BEAMSIM_THREADS", "3", 1);
  CHECK(trial_thread_count(100) == 3);
  CHECK(trial_thread_count(2) == 2);
  setenv("WPT_BEAMSIM_THREADS", "not_a_number", 1);
  CHECK(trial_thread_count(1) == 1);
  unsetenv("WPT_BEAMSIM_THREADS");
  CHECK(trial_thread_count(1) == 1);
  CHECK(trial_thread_count(1000) >= 1);
}

TEST_CASE("duration falls with power and rises with distance") {
  ExperimentConfig cfg = small_config(10);
  const SweepResult by_power = sweep_transmit_power(cfg);
  REQUIRE(by_power.points.size() == cfg.power_sweep_w.size());
  for (std::size_t i = 1; i < by_power.points.size(); ++i) {
    CHECK(by_power.points[i].mean_duration_s <
          by_power.points[i - 1].mean_duration_s);
  }
  const SweepResult by_dist = sweep_distance(cfg);
  REQUIRE(by_dist.points.size() == cfg.distance_sweep_m.size());
  for (std::size_t i = 1; i < by_dist.points.size(); ++i) {
    CHECK(by_dist.points[i].mean_duration_s >=
          by_dist.points[i - 1].mean_duration_s);
  }
}

TEST_CASE("doubling the array size lands in the expected energy band") {
  ExperimentConfig cfg = small_config(30);
  cfg.n_list = {5, 10};
  cfg.power_sweep_w = {10.0};
  const SweepResult res = sweep_transmit_power(cfg);
  REQUIRE(res.points.size() == 2);
  const double ratio =
      res.points[1].mean_energy_j / res.points[0].mean_energy_j;
  CHECK(ratio >= 1.5);
  CHECK(ratio <= 5.0);
}

TEST_CASE("sweep CSV output is stable byte for byte") {
  ExperimentConfig cfg = small_config(4);
  cfg.power_sweep_w = {5.0, 10.0};
  const SweepResult res = sweep_transmit_power(cfg);
  write_sweep_csv(res, "/tmp/wpt_sweep_a.csv");
  write_sweep_csv(res, "/tmp/wpt_sweep_b.csv");
  const std::string a = slurp("/tmp/wpt_sweep_a.csv");
  CHECK(a == slurp("/tmp/wpt_sweep_b.csv"));
  CHECK(a.rfind("transmit_power_w,n_antennas,rician_factor,", 0) == 0);
  // Header plus one row per point.
  CHECK(std::count(a.begin(), a.end(), '\n') ==
        static_cast<long>(res.points.size()) + 1);
  // Re-running the whole sweep reproduces the same bytes.
  const SweepResult res2 = sweep_transmit_power(cfg);
  write_sweep_csv(res2, "/tmp/wpt_sweep_c.csv");
  CHECK(a == slurp("/tmp/wpt_sweep_c.csv"));
  std::remove("/tmp/wpt_sweep_a.csv");
  std::remove("/tmp/wpt_sweep_b.csv");
  std::remove("/tmp/wpt_sweep_c.csv");
}

TEST_CASE("per-slot CSV has one row per canonical slot") {
  ExperimentConfig cfg = small_config(5);
  const FapStatistics stats = run_fap_statistics(cfg);
  write_fap_csv(stats, "/tmp/wpt_fap.csv");
  const std::string text = slurp("/tmp/wpt_fap.csv");
  CHECK(text.rfind("slot,mean_ttr_s,mean_ph_w,trials", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 13 + 1);
  std::remove("/tmp/wpt_fap.csv");
}

TEST_CASE("file errors name unwritable destinations") {
  const FapStatistics stats;
  CHECK_THROWS_AS(write_fap_csv(stats, "/no_such_dir/x.csv"), file_error);
  CHECK_THROWS_AS(write_text_file("/no_such_dir/y.txt", "hi"), file_error);
}

TEST_CASE("summary JSON embeds the campaign and the points") {
  ExperimentConfig cfg = small_config(4);
  cfg.power_sweep_w = {5.0, 10.0};
  const SweepResult res = sweep_transmit_power(cfg);
  const std::string text = sweep_summary_json(cfg, res);
  CHECK(text.find("\"config\"") != std::string::npos);
  CHECK(text.find("\"axis_name\"") != std::string::npos);
  CHECK(text.find("\"transmit_power_w\"") != std::string::npos);
  CHECK(text.find("\"points\"") != std::string::npos);
  CHECK(text.find("\"trials\": 4") != std::string::npos);
}

TEST_CASE("sweeps cover the full point grid") {
  ExperimentConfig cfg = small_config(2);
  cfg.n_list = {5, 10};
  cfg.kf_list = {2.0, std::numeric_limits<double>::infinity()};
  cfg.power_sweep_w = {5.0, 10.0};
  const SweepResult res = sweep_transmit_power(cfg);
  CHECK(res.points.size() == 2 * 2 * 2);
  for (const SweepPoint& p : res.points) {
    CHECK(p.trials == 2);
    CHECK(p.mean_alignment >= 1.0 - 1e-6);
  }
}
