// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "wptbeam/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wptbeam/errors.hpp"

namespace wptbeam {

namespace {

using nlohmann::json;

double number_or_inf(const json& j, const std::string& key) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "Inf" || s == "INF") {
      return std::numeric_limits<double>::infinity();
    }
    throw parameter_error("config: key '" + key + "' has non-numeric value '" +
                          s + "' (only \"inf\" is accepted as a string)");
  }
  if (!j.is_number()) {
    throw parameter_error("config: key '" + key + "' must be a number");
  }
  return j.get<double>();
}

double plain_number(const json& j, const std::string& key) {
  if (!j.is_number()) {
    throw parameter_error("config: key '" + key + "' must be a number");
  }
  return j.get<double>();
}

json inf_aware(double v) {
  if (std::isinf(v)) return json("inf");
  return json(v);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n_list.empty() || kf_list.empty()) {
    throw parameter_error("config: n_list and kf_list must be non-empty");
  }
  for (int n : n_list) {
    if (n < 1) throw parameter_error("config: n_list entries must be >= 1");
  }
  for (double kf : kf_list) {
    if (!(kf > 0.0)) {
      throw parameter_error("config: kf_list entries must be > 0 (or inf)");
    }
  }
  if (!(distance_m > 0.0)) throw parameter_error("config: dist must be > 0");
  if (!(pathloss_exponent >= 0.0)) {
    throw parameter_error("config: beta must be >= 0");
  }
  if (!(transmit_power_w > 0.0)) throw parameter_error("config: pt must be > 0");
  if (!(antenna_gain > 0.0)) throw parameter_error("config: gain must be > 0");
  circuit.validate();
  make_model(model_name);
  if (!(time_limit_s > 0.0)) throw parameter_error("config: t_lim must be > 0");
  if (trials < 1) throw parameter_error("config: trials must be >= 1");
  if (power_sweep_w.empty() || distance_sweep_m.empty()) {
    throw parameter_error("config: sweep axes must be non-empty");
  }
  for (double p : power_sweep_w) {
    if (!(p > 0.0)) throw parameter_error("config: pt_sweep entries must be > 0");
  }
  for (double d : distance_sweep_m) {
    if (!(d > 0.0)) {
      throw parameter_error("config: dist_sweep entries must be > 0");
    }
  }
}

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw parameter_error(std::string("config: JSON parse failure: ") +
                          e.what());
  }
  if (!j.is_object()) {
    throw parameter_error("config: top level must be a JSON object");
  }
  static const std::set<std::string> known = {
      "n_list", "kf_list", "dist",   "beta",   "pt",       "gain",
      "r_ohm",  "c_f",     "q0_c",   "qm_c",   "model",    "basis",
      "t_lim",  "trials",  "seed",   "pt_sweep", "dist_sweep"};
  for (const auto& item : j.items()) {
    if (known.find(item.key()) == known.end()) {
      throw parameter_error("config: unknown key '" + item.key() + "'");
    }
  }
  ExperimentConfig c;
  if (j.contains("n_list")) {
    if (!j["n_list"].is_array()) {
      throw parameter_error("config: key 'n_list' must be an array");
    }
    c.n_list.clear();
    for (const auto& v : j["n_list"]) {
      c.n_list.push_back(static_cast<int>(plain_number(v, "n_list")));
    }
  }
  if (j.contains("kf_list")) {
    if (!j["kf_list"].is_array()) {
      throw parameter_error("config: key 'kf_list' must be an array");
    }
    c.kf_list.clear();
    for (const auto& v : j["kf_list"]) {
      c.kf_list.push_back(number_or_inf(v, "kf_list"));
    }
  }
  if (j.contains("dist")) c.distance_m = plain_number(j["dist"], "dist");
  if (j.contains("beta")) c.pathloss_exponent = plain_number(j["beta"], "beta");
  if (j.contains("pt")) c.transmit_power_w = plain_number(j["pt"], "pt");
  if (j.contains("gain")) c.antenna_gain = plain_number(j["gain"], "gain");
  if (j.contains("r_ohm")) c.circuit.r_ohm = plain_number(j["r_ohm"], "r_ohm");
  if (j.contains("c_f")) c.circuit.c_f = plain_number(j["c_f"], "c_f");
  if (j.contains("q0_c")) {
    c.circuit.q_initial_c = plain_number(j["q0_c"], "q0_c");
  }
  if (j.contains("qm_c")) c.circuit.q_full_c = plain_number(j["qm_c"], "qm_c");
  if (j.contains("model")) {
    if (!j["model"].is_string()) {
      throw parameter_error("config: key 'model' must be a string");
    }
    c.model_name = j["model"].get<std::string>();
  }
  if (j.contains("basis")) {
    if (!j["basis"].is_string()) {
      throw parameter_error("config: key 'basis' must be a string");
    }
    c.basis_name = j["basis"].get<std::string>();
  }
  if (j.contains("t_lim")) c.time_limit_s = number_or_inf(j["t_lim"], "t_lim");
  if (j.contains("trials")) {
    c.trials = static_cast<int>(plain_number(j["trials"], "trials"));
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
      throw parameter_error("config: key 'seed' must be an integer");
    }
    c.base_seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("pt_sweep")) {
    if (!j["pt_sweep"].is_array()) {
      throw parameter_error("config: key 'pt_sweep' must be an array");
    }
    c.power_sweep_w.clear();
    for (const auto& v : j["pt_sweep"]) {
      c.power_sweep_w.push_back(plain_number(v, "pt_sweep"));
    }
  }
  if (j.contains("dist_sweep")) {
    if (!j["dist_sweep"].is_array()) {
      throw parameter_error("config: key 'dist_sweep' must be an array");
    }
    c.distance_sweep_m.clear();
    for (const auto& v : j["dist_sweep"]) {
      c.distance_sweep_m.push_back(plain_number(v, "dist_sweep"));
    }
  }
  c.validate();
  return c;
}

ExperimentConfig config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw file_error("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str());
}

std::string config_to_json_text(const ExperimentConfig& config) {
  json j;
  j["n_list"] = config.n_list;
  json kfs = json::array();
  for (double kf : config.kf_list) kfs.push_back(inf_aware(kf));
  j["kf_list"] = kfs;
  j["dist"] = config.distance_m;
  j["beta"] = config.pathloss_exponent;
  j["pt"] = config.transmit_power_w;
  j["gain"] = config.antenna_gain;
  j["r_ohm"] = config.circuit.r_ohm;
  j["c_f"] = config.circuit.c_f;
  j["q0_c"] = config.circuit.q_initial_c;
  j["qm_c"] = config.circuit.q_full_c;
  j["model"] = config.model_name;
  j["basis"] = config.basis_name;
  j["t_lim"] = inf_aware(config.time_limit_s);
  j["trials"] = config.trials;
  j["seed"] = config.base_seed;
  j["pt_sweep"] = config.power_sweep_w;
  j["dist_sweep"] = config.distance_sweep_m;
  return j.dump(2);
}

EfficiencyModel make_model(const std::string& name) {
  if (name == "piecewise") return PiecewiseLinearEfficiency{};
  if (name == "linear") return ConstantEfficiency{};
  if (name == "sigmoid") return SigmoidEfficiency{};
  if (name == "rational") return RationalEfficiency{};
  throw parameter_error("model must be one of piecewise|linear|sigmoid|"
                        "rational, got '" + name + "'");
}

OrthonormalBasis make_basis(const std::string& name, int n) {
  if (name == "dft") return dft_basis(n);
  if (name == "identity") return identity_basis(n);
  const std::string prefix = "file:";
  if (name.rfind(prefix, 0) == 0) {
    OrthonormalBasis basis = basis_from_csv(name.substr(prefix.size()));
    if (basis.n != n) {
      throw shape_error("basis file has " + std::to_string(basis.n) +
                        " columns but the run needs " + std::to_string(n));
    }
    return basis;
  }
  throw parameter_error("basis must be dft|identity|file:PATH, got '" + name +
                        "'");
}

ChannelParams make_channel_params(const ExperimentConfig& config, int n,
                                  double kf) {
  ChannelParams params;
  params.n_antennas = n;
  params.rician_factor = kf;
  params.distance_m = config.distance_m;
  params.pathloss_exponent = config.pathloss_exponent;
  params.transmit_power_w = config.transmit_power_w;
  params.antenna_gain = config.antenna_gain;
  params.validate();
  return params;
}

}  // namespace wptbeam
