// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "wptbeam/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "wptbeam/errors.hpp"
#include "wptbeam/rng.hpp"
#include "wptbeam/simoracle.hpp"

namespace wptbeam {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

// Compact per-trial record kept during parallel runs.
struct TrialRecord {
  std::vector<double> slot_ttr_s;  // canonical positions only
  std::vector<double> slot_ph_w;
  double duration_s = 0.0;
  double energy_j = 0.0;
  double alignment = 0.0;
};

double slot_harvested_power(const FapSlot& slot, const EfficiencyModel& model,
                            const ChannelParams& params) {
  const double p_r = params.antenna_gain * params.transmit_power_w *
                     slot.tau * slot.tau;
  return harvested_power(model, p_r);
}

// Runs `trials` independent trials and reduces them in index order.
// make_record must be pure per index.
template <typename MakeRecord>
std::vector<TrialRecord> run_trials_parallel(int trials,
                                             const MakeRecord& make_record) {
  std::vector<TrialRecord> records(static_cast<std::size_t>(trials));
  const int threads = trial_thread_count(trials);
  if (threads <= 1) {
    for (int t = 0; t < trials; ++t) {
      records[static_cast<std::size_t>(t)] = make_record(t);
    }
    return records;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const int t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        records[static_cast<std::size_t>(t)] = make_record(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return records;
}

TrialRecord record_from_outcome(const TrialOutcome& outcome,
                                const EfficiencyModel& model,
                                const ChannelParams& params) {
  TrialRecord rec;
  rec.duration_s = outcome.duration_s;
  rec.energy_j = outcome.energy_j;
  rec.alignment = outcome.alignment;
  for (const FapSlot& slot : outcome.trace.slots) {
    if (slot.kind == SlotKind::kTimeoutFallback) continue;
    rec.slot_ttr_s.push_back(slot.elapsed_s);
    rec.slot_ph_w.push_back(slot_harvested_power(slot, model, params));
  }
  return rec;
}

struct PointAggregate {
  double mean_duration_s = 0.0;
  double mean_energy_j = 0.0;
  double mean_alignment = 0.0;
};

PointAggregate reduce_means(const std::vector<TrialRecord>& records) {
  PointAggregate agg;
  for (const TrialRecord& rec : records) {
    agg.mean_duration_s += rec.duration_s;
    agg.mean_energy_j += rec.energy_j;
    agg.mean_alignment += rec.alignment;
  }
  const double count = static_cast<double>(records.size());
  agg.mean_duration_s /= count;
  agg.mean_energy_j /= count;
  agg.mean_alignment /= count;
  return agg;
}

// Shared sweep body: for each (n, kf) and each axis value, run the same
// trial indices (common random numbers across the axis).
SweepResult run_sweep(const ExperimentConfig& config,
                      const std::vector<double>& axis,
                      const std::string& axis_name) {
  config.validate();
  SweepResult result;
  result.axis_name = axis_name;
  for (int n : config.n_list) {
    for (double kf : config.kf_list) {
      for (double value : axis) {
        ExperimentConfig point = config;
        if (axis_name == "transmit_power_w") {
          point.transmit_power_w = value;
        } else {
          point.distance_m = value;
        }
        const std::vector<TrialRecord> records = run_trials_parallel(
            config.trials, [&](int t) {
              const TrialOutcome outcome =
                  run_trial(point, n, kf, static_cast<std::uint64_t>(t));
              const EfficiencyModel model = make_model(point.model_name);
              const ChannelParams params = make_channel_params(point, n, kf);
              return record_from_outcome(outcome, model, params);
            });
        const PointAggregate agg = reduce_means(records);
        SweepPoint sp;
        sp.axis_value = value;
        sp.n = n;
        sp.kf = kf;
        sp.mean_duration_s = agg.mean_duration_s;
        sp.mean_energy_j = agg.mean_energy_j;
        sp.mean_alignment = agg.mean_alignment;
        sp.trials = config.trials;
        result.points.push_back(sp);
      }
    }
  }
  return result;
}

nlohmann::json point_to_json(const SweepPoint& p) {
  nlohmann::json j;
  j["axis_value"] = p.axis_value;
  j["n"] = p.n;
  j["kf"] = std::isinf(p.kf) ? nlohmann::json("inf") : nlohmann::json(p.kf);
  j["mean_fap_duration_s"] = p.mean_duration_s;
  j["mean_harvested_energy_j"] = p.mean_energy_j;
  j["mean_alignment"] = p.mean_alignment;
  j["trials"] = p.trials;
  return j;
}

}  // namespace

double fap_duration(const FapTrace& trace) {
  double total = 0.0;
  for (const FapSlot& slot : trace.slots) total += slot.elapsed_s;
  return total;
}

double harvested_energy_during_fap(const FapTrace& trace,
                                   const EfficiencyModel& model,
                                   const ChannelParams& params) {
  double total = 0.0;
  for (const FapSlot& slot : trace.slots) {
    total += slot_harvested_power(slot, model, params) * slot.elapsed_s;
  }
  return total;
}

TrialOutcome run_trial(const ExperimentConfig& config, int n, double kf,
                       std::uint64_t seed_index) {
  const ChannelParams params = make_channel_params(config, n, kf);
  const EfficiencyModel model = make_model(config.model_name);
  const OrthonormalBasis basis = make_basis(config.basis_name, n);
  const ChannelVector h =
      sample_channel(params, derive_trial_seed(config.base_seed, seed_index));

  SimulatedHarvesterOracle oracle(h, params, config.circuit, model);
  const TtrConverter converter =
      make_abs_dot_converter(config.circuit, model, params);

  BeamformerOptions options;
  options.time_limit_s = config.time_limit_s;
  if (std::isfinite(config.time_limit_s)) {
    options.circuit = config.circuit;
    options.reorder_by_strength = true;
  }

  TrialOutcome outcome;
  outcome.trace = find_optimal_beamformer(oracle, basis, converter, options);
  outcome.channel_norm = norm(h);
  outcome.alignment =
      std::abs(inner(h, outcome.trace.w_opt)) / outcome.channel_norm;
  outcome.duration_s = fap_duration(outcome.trace);
  outcome.energy_j = harvested_energy_during_fap(outcome.trace, model, params);
  return outcome;
}

FapStatistics run_fap_statistics(const ExperimentConfig& config) {
  config.validate();
  if (config.n_list.size() != 1 || config.kf_list.size() != 1) {
    throw parameter_error(
        "run_fap_statistics: config must pin a single (n, kf) point");
  }
  const int n = config.n_list.front();
  const double kf = config.kf_list.front();
  const EfficiencyModel model = make_model(config.model_name);
  const ChannelParams params = make_channel_params(config, n, kf);

  const std::vector<TrialRecord> records = run_trials_parallel(
      config.trials, [&](int t) {
        const TrialOutcome outcome =
            run_trial(config, n, kf, static_cast<std::uint64_t>(t));
        return record_from_outcome(outcome, model, params);
      });

  FapStatistics stats;
  stats.n = n;
  stats.slot_count = 3 * n - 2;
  stats.trials = config.trials;
  stats.mean_ttr_s.assign(static_cast<std::size_t>(stats.slot_count), 0.0);
  stats.mean_ph_w.assign(static_cast<std::size_t>(stats.slot_count), 0.0);
  stats.slot_trials.assign(static_cast<std::size_t>(stats.slot_count), 0);
  for (const TrialRecord& rec : records) {
    for (std::size_t p = 0; p < rec.slot_ttr_s.size(); ++p) {
      if (p >= stats.mean_ttr_s.size()) break;
      stats.mean_ttr_s[p] += rec.slot_ttr_s[p];
      stats.mean_ph_w[p] += rec.slot_ph_w[p];
      ++stats.slot_trials[p];
    }
  }
  for (std::size_t p = 0; p < stats.mean_ttr_s.size(); ++p) {
    if (stats.slot_trials[p] > 0) {
      stats.mean_ttr_s[p] /= static_cast<double>(stats.slot_trials[p]);
      stats.mean_ph_w[p] /= static_cast<double>(stats.slot_trials[p]);
    }
  }
  const PointAggregate agg = reduce_means(records);
  stats.mean_duration_s = agg.mean_duration_s;
  stats.mean_energy_j = agg.mean_energy_j;
  stats.mean_alignment = agg.mean_alignment;
  return stats;
}

SweepResult sweep_transmit_power(const ExperimentConfig& config) {
  return run_sweep(config, config.power_sweep_w, "transmit_power_w");
}

SweepResult sweep_distance(const ExperimentConfig& config) {
  return run_sweep(config, config.distance_sweep_m, "distance_m");
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw file_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw file_error("write failure on '" + path + "'");
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
  std::string csv = result.axis_name +
                    ",n_antennas,rician_factor,mean_fap_duration_s,"
                    "mean_harvested_energy_j,mean_alignment,trials\n";
  for (const SweepPoint& p : result.points) {
    csv += fmt_double(p.axis_value) + "," + std::to_string(p.n) + "," +
           fmt_double(p.kf) + "," + fmt_double(p.mean_duration_s) + "," +
           fmt_double(p.mean_energy_j) + "," + fmt_double(p.mean_alignment) +
           "," + std::to_string(p.trials) + "\n";
  }
  write_text_file(path, csv);
}

void write_fap_csv(const FapStatistics& stats, const std::string& path) {
  std::string csv = "slot,mean_ttr_s,mean_ph_w,trials\n";
  for (int p = 0; p < stats.slot_count; ++p) {
    const std::size_t i = static_cast<std::size_t>(p);
    csv += std::to_string(p + 1) + "," + fmt_double(stats.mean_ttr_s[i]) +
           "," + fmt_double(stats.mean_ph_w[i]) + "," +
           std::to_string(stats.slot_trials[i]) + "\n";
  }
  write_text_file(path, csv);
}

std::string sweep_summary_json(const ExperimentConfig& config,
                               const SweepResult& result) {
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(config_to_json_text(config));
  j["axis_name"] = result.axis_name;
  nlohmann::json points = nlohmann::json::array();
  for (const SweepPoint& p : result.points) points.push_back(point_to_json(p));
  j["points"] = points;
  return j.dump(2);
}

int trial_thread_count(int trials) {
  int limit = 0;
  if (const char* env = std::getenv("WPT_BEAMSIM_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && parsed >= 1) {
      limit = static_cast<int>(parsed);
    }
  }
  if (limit == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    limit = hw == 0 ? 1 : static_cast<int>(hw);
  }
  if (limit > trials) limit = trials;
  if (limit < 1) limit = 1;
  return limit;
}

}  // namespace wptbeam
