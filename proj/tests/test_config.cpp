// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

#include "doctest.h"
#include "wptbeam/config.hpp"
#include "wptbeam/errors.hpp"

using namespace wptbeam;

TEST_CASE("defaults form a valid campaign") {
  const ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.n_list == std::vector<int>{5});
  CHECK(cfg.base_seed == 12345);
  CHECK(cfg.trials == 100);
  CHECK(cfg.time_limit_s == 100.0);
}

TEST_CASE("JSON text round-trips exactly") {
  const ExperimentConfig cfg;
  const std::string text = config_to_json_text(cfg);
  const ExperimentConfig back = config_from_json_text(text);
  CHECK(config_to_json_text(back) == text);
  CHECK(back.n_list == cfg.n_list);
  CHECK(back.kf_list == cfg.kf_list);
  CHECK(back.model_name == cfg.model_name);
  CHECK(back.base_seed == cfg.base_seed);
  CHECK(back.power_sweep_w == cfg.power_sweep_w);
}

TEST_CASE("infinities are spelled 'inf' and survive the round trip") {
  const std::string text = R"({"kf_list": [2, "inf"], "t_lim": "inf"})";
  const ExperimentConfig cfg = config_from_json_text(text);
  REQUIRE(cfg.kf_list.size() == 2);
  CHECK(cfg.kf_list[0] == 2.0);
  CHECK(std::isinf(cfg.kf_list[1]));
  CHECK(std::isinf(cfg.time_limit_s));
  const std::string echoed = config_to_json_text(cfg);
  CHECK(echoed.find("\"inf\"") != std::string::npos);
  const ExperimentConfig back = config_from_json_text(echoed);
  CHECK(std::isinf(back.kf_list[1]));
  CHECK(std::isinf(back.time_limit_s));
}

TEST_CASE("unknown keys are rejected by name") {
  try {
    config_from_json_text(R"({"n_list": [5], "frotz": 3})");
    FAIL("expected a parameter error");
  } catch (const parameter_error& e) {
    CHECK(std::string(e.what()).find("frotz") != std::string::npos);
  }
}

TEST_CASE("malformed JSON and wrong types are parameter errors") {
  CHECK_THROWS_AS(config_from_json_text("{oops"), parameter_error);
  CHECK_THROWS_AS(config_from_json_text("[1,2,3]"), parameter_error);
  CHECK_THROWS_AS(config_from_json_text(R"({"n_list": 5})"),
                  parameter_error);
  CHECK_THROWS_AS(config_from_json_text(R"({"kf_list": ["frog"]})"),
                  parameter_error);
  CHECK_THROWS_AS(config_from_json_text(R"({"t_lim": "soon"})"),
                  parameter_error);
  CHECK_THROWS_AS(config_from_json_text(R"({"trials": 0})"),
                  parameter_error);
  CHECK_THROWS_AS(config_from_json_text(R"({"n_list": []})"),
                  parameter_error);
  CHECK_THROWS_AS(config_from_json_text(R"({"dist": -4})"),
                  parameter_error);
}

TEST_CASE("configs load from files") {
  const std::string path = "/tmp/wpt_cfg_test.json";
  {
    std::ofstream out(path);
    out << R"({"pt": 7.5, "trials": 3, "model": "linear"})";
  }
  const ExperimentConfig cfg = config_from_json_file(path);
  CHECK(cfg.transmit_power_w == 7.5);
  CHECK(cfg.trials == 3);
  CHECK(cfg.model_name == "linear");
  std::remove(path.c_str());
  CHECK_THROWS_AS(config_from_json_file("/tmp/no_such_cfg.json"),
                  file_error);
}

TEST_CASE("model factory covers all names") {
  CHECK(std::holds_alternative<PiecewiseLinearEfficiency>(
      make_model("piecewise")));
  CHECK(std::holds_alternative<ConstantEfficiency>(make_model("linear")));
  CHECK(std::holds_alternative<SigmoidEfficiency>(make_model("sigmoid")));
  CHECK(std::holds_alternative<RationalEfficiency>(make_model("rational")));
  CHECK_THROWS_AS(make_model("cubic"), parameter_error);
}

TEST_CASE("basis factory covers names, files, and mismatches") {
  CHECK(make_basis("dft", 5).n == 5);
  CHECK(make_basis("identity", 3).n == 3);
  CHECK_THROWS_AS(make_basis("hadamard", 4), parameter_error);
  CHECK_THROWS_AS(make_basis("file:/tmp/no_such_basis.csv", 4), file_error);
  // A loaded file must match the requested antenna count.
  const std::string path = "/tmp/wpt_basis_cfg_test.csv";
  {
    std::ofstream out(path);
    out << "1,0,0,0\n0,0,1,0\n";  // 2x2 identity, interleaved re/im
  }
  CHECK(make_basis("file:" + path, 2).n == 2);
  CHECK_THROWS_AS(make_basis("file:" + path, 5), shape_error);
  std::remove(path.c_str());
}

TEST_CASE("channel parameters inherit the campaign settings") {
  ExperimentConfig cfg;
  cfg.distance_m = 7.0;
  cfg.pathloss_exponent = 2.5;
  cfg.transmit_power_w = 4.0;
  cfg.antenna_gain = 2.0;
  const ChannelParams p = make_channel_params(cfg, 10, 3.0);
  CHECK(p.n_antennas == 10);
  CHECK(p.rician_factor == 3.0);
  CHECK(p.distance_m == 7.0);
  CHECK(p.pathloss_exponent == 2.5);
  CHECK(p.transmit_power_w == 4.0);
  CHECK(p.antenna_gain == 2.0);
  CHECK_NOTHROW(p.validate());
}
