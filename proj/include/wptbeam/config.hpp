// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef WPTBEAM_CONFIG_HPP_
#define WPTBEAM_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "wptbeam/basis.hpp"
#include "wptbeam/channel.hpp"
#include "wptbeam/harvester.hpp"

namespace wptbeam {

// Complete description of a simulation campaign. JSON files use exactly
// these keys (see README): n_list, kf_list, dist, beta, pt, gain, r_ohm,
// c_f, q0_c, qm_c, model, basis, t_lim, trials, seed, pt_sweep, dist_sweep.
struct ExperimentConfig {
  std::vector<int> n_list{5};
  // Line-of-sight power ratios; +infinity selects the deterministic channel.
  std::vector<double> kf_list{2.0};
  double distance_m = 5.0;
  double pathloss_exponent = 3.0;
  double transmit_power_w = 10.0;
  double antenna_gain = 1.0;
  StorageCircuit circuit{};
  // piecewise | linear | sigmoid | rational
  std::string model_name = "piecewise";
  // dft | identity | file:PATH
  std::string basis_name = "dft";
  double time_limit_s = 100.0;
  int trials = 100;
  std::uint64_t base_seed = 12345;
  std::vector<double> power_sweep_w{3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> distance_sweep_m{3, 4, 5, 6, 7, 8, 9, 10};

  void validate() const;
};

// Parses a config. Unknown keys are rejected by name; "inf" (string) is
// accepted wherever +infinity is meaningful (kf_list entries, t_lim).
ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig config_from_json_file(const std::string& path);

// Round-trippable JSON echo of a config (sorted keys, 2-space indent).
std::string config_to_json_text(const ExperimentConfig& config);

EfficiencyModel make_model(const std::string& name);

OrthonormalBasis make_basis(const std::string& name, int n);

ChannelParams make_channel_params(const ExperimentConfig& config, int n,
                                  double kf);

}  // namespace wptbeam

#endif  // WPTBEAM_CONFIG_HPP_
