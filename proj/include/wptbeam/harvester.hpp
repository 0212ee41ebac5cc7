// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef WPTBEAM_HARVESTER_HPP_
#define WPTBEAM_HARVESTER_HPP_

#include <array>
#include <variant>

#include "wptbeam/channel.hpp"

namespace wptbeam {

// Series resistor feeding a storage capacitor. A recharge cycle raises the
// capacitor charge from q_initial_c to q_full_c.
struct StorageCircuit {
  double r_ohm = 100.0;
  double c_f = 1e-3;
  double q_initial_c = 1.5e-3;
  double q_full_c = 3e-3;

  void validate() const;
};

// RF-to-DC conversion efficiency eta(P_r), zero below the first threshold,
// linear ramps between consecutive thresholds, flat at the top level above
// the last threshold. Output power eta(P_r)*P_r is continuous and strictly
// increasing above the first threshold.
struct PiecewiseLinearEfficiency {
  std::array<double, 4> thresholds_w = {1e-6, 1e-5, 1e-4, 1e-3};
  std::array<double, 3> levels = {0.4, 0.6, 0.65};
};

// Fixed conversion efficiency at every input power.
struct ConstantEfficiency {
  double eta = 0.7;
};

// Logistic saturation curve, normalized to zero output at zero input:
//   P_h = max_w * (1 - exp(-slope*P)) / (1 + exp(slope*(center_w - P))).
struct SigmoidEfficiency {
  double max_w = 24e-3;
  double slope = 150.0;
  double center_w = 0.014;
};

// Rational saturation curve P_h = P*(a*c - b) / (c*(P + c)), saturating at
// a - b/c.
struct RationalEfficiency {
  double a_w = 2.463e-3;
  double b_w2 = 1.635e-6;
  double c_w = 0.826e-3;
};

using EfficiencyModel =
    std::variant<PiecewiseLinearEfficiency, ConstantEfficiency,
                 SigmoidEfficiency, RationalEfficiency>;

void validate_model(const EfficiencyModel& model);

// One completed probe: the observed full-cycle recharge time and the values
// recovered from it.
struct HarvestObservation {
  double time_to_recharge_s = 0.0;
  double harvested_power_w = 0.0;
  double abs_dot = 0.0;
};

// Harvested power below this floor never produces feedback; recharge time
// is reported as +infinity.
inline constexpr double kPowerFloorW = 1e-12;

// Shared bracket and tolerances for all power inversions.
inline constexpr double kPowerBracketLoW = 1e-12;
inline constexpr double kPowerBracketHiW = 1e2;
inline constexpr double kInvertRelTol = 1e-10;
inline constexpr int kInvertMaxIter = 200;

// Auxiliary recharge variable (q + sqrt(q^2 + 4*p*R*C^2))^2 / (4*p*R*C^2).
double y_aux(const StorageCircuit& circuit, double q_c, double p_w);

// Seconds to raise the capacitor charge from q_start_c to q_end_c under
// constant harvested power p_h_w. Returns +infinity when p_h_w is at or
// below the power floor.
double time_to_recharge(const StorageCircuit& circuit, double q_start_c,
                        double q_end_c, double p_h_w);

// Charge reached after charging for t_s seconds from q_start_c, clipped at
// the full charge.
double charge_after(const StorageCircuit& circuit, double q_start_c,
                    double p_h_w, double t_s);

// The unique harvested power whose recharge time from q_start_c to q_end_c
// equals t_s.
double invert_time_to_recharge(const StorageCircuit& circuit, double q_start_c,
                               double q_end_c, double t_s);

double efficiency(const EfficiencyModel& model, double p_r_w);

double harvested_power(const EfficiencyModel& model, double p_r_w);

// The unique received power producing harvested power p_h_w. Analytic for
// the piecewise-linear and constant models, bisection otherwise.
double invert_harvested_power(const EfficiencyModel& model, double p_h_w);

// |<h, w>| recovered from a full-cycle recharge time.
double abs_dot_from_ttr(const StorageCircuit& circuit,
                        const EfficiencyModel& model,
                        const ChannelParams& params, double t_s);

HarvestObservation observe_from_ttr(const StorageCircuit& circuit,
                                    const EfficiencyModel& model,
                                    const ChannelParams& params, double t_s);

}  // namespace wptbeam

#endif  // WPTBEAM_HARVESTER_HPP_
