// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "wptbeam/harvester.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "wptbeam/errors.hpp"

namespace wptbeam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// q + sqrt(q^2 + 4*p*R*C^2), the building block of the recharge-time law.
double u_of(const StorageCircuit& c, double q, double p) {
  const double d = 4.0 * p * c.r_ohm * c.c_f * c.c_f;
  return q + std::sqrt(q * q + d);
}

void check_charge_range(const StorageCircuit& c, double q, const char* name) {
  if (!(q >= 0.0) || !(q <= c.q_full_c * (1.0 + 1e-12))) {
    throw parameter_error(std::string(name) + " = " + std::to_string(q) +
                          " outside [0, q_full]");
  }
}

// Bisection for target on a strictly increasing f over [lo, hi] in log
// space. Caller guarantees f(lo) <= target <= f(hi).
template <typename F>
double bisect_log_increasing(F&& f, double lo, double hi, double target) {
  for (int iter = 0; iter < kInvertMaxIter; ++iter) {
    if (hi / lo - 1.0 <= kInvertRelTol) return std::sqrt(lo * hi);
    const double mid = std::sqrt(lo * hi);
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw numeric_error("bisect_log_increasing: no convergence in " +
                      std::to_string(kInvertMaxIter) + " iterations");
}

double piecewise_eta(const PiecewiseLinearEfficiency& m, double p) {
  const auto& th = m.thresholds_w;
  const auto& lv = m.levels;
  if (p <= th[0]) return 0.0;
  if (p >= th[3]) return lv[2];
  if (p < th[1]) return lv[0] * (p - th[0]) / (th[1] - th[0]);
  if (p < th[2]) return lv[0] + (lv[1] - lv[0]) * (p - th[1]) / (th[2] - th[1]);
  return lv[1] + (lv[2] - lv[1]) * (p - th[2]) / (th[3] - th[2]);
}

// Positive root of slope*p^2 + b*p = p_h, in the form that avoids
// cancellation for either sign of b.
double ramp_inverse(double slope, double b, double p_h) {
  const double disc = std::sqrt(b * b + 4.0 * slope * p_h);
  if (b >= 0.0) return 2.0 * p_h / (b + disc);
  return (-b + disc) / (2.0 * slope);
}

double piecewise_invert(const PiecewiseLinearEfficiency& m, double p_h) {
  const auto& th = m.thresholds_w;
  const auto& lv = m.levels;
  const double knee1 = lv[0] * th[1];
  const double knee2 = lv[1] * th[2];
  const double knee3 = lv[2] * th[3];
  if (p_h >= knee3) return p_h / lv[2];
  if (p_h < knee1) {
    const double slope = lv[0] / (th[1] - th[0]);
    return ramp_inverse(slope, -slope * th[0], p_h);
  }
  if (p_h < knee2) {
    const double slope = (lv[1] - lv[0]) / (th[2] - th[1]);
    return ramp_inverse(slope, lv[0] - slope * th[1], p_h);
  }
  const double slope = (lv[2] - lv[1]) / (th[3] - th[2]);
  return ramp_inverse(slope, lv[1] - slope * th[2], p_h);
}

double sigmoid_harvested(const SigmoidEfficiency& m, double p) {
  if (p <= 0.0) return 0.0;
  return m.max_w * (-std::expm1(-m.slope * p)) /
         (std::exp(m.slope * (m.center_w - p)) + 1.0);
}

double rational_harvested(const RationalEfficiency& m, double p) {
  return p * (m.a_w * m.c_w - m.b_w2) / (m.c_w * (p + m.c_w));
}

struct ModelValidator {
  void operator()(const PiecewiseLinearEfficiency& m) const {
    const auto& th = m.thresholds_w;
    const auto& lv = m.levels;
    if (!(th[0] > 0.0) || !(th[0] < th[1]) || !(th[1] < th[2]) ||
        !(th[2] < th[3])) {
      throw parameter_error(
          "PiecewiseLinearEfficiency thresholds must be positive and strictly "
          "increasing");
    }
    if (!(lv[0] > 0.0) || !(lv[0] <= lv[1]) || !(lv[1] <= lv[2]) ||
        !(lv[2] <= 1.0)) {
      throw parameter_error(
          "PiecewiseLinearEfficiency levels must be in (0,1] and "
          "non-decreasing");
    }
  }
  void operator()(const ConstantEfficiency& m) const {
    if (!(m.eta > 0.0) || !(m.eta <= 1.0)) {
      throw parameter_error("ConstantEfficiency.eta must be in (0,1]");
    }
  }
  void operator()(const SigmoidEfficiency& m) const {
    if (!(m.max_w > 0.0) || !(m.slope > 0.0) || !(m.center_w > 0.0)) {
      throw parameter_error("SigmoidEfficiency parameters must be positive");
    }
  }
  void operator()(const RationalEfficiency& m) const {
    if (!(m.a_w > 0.0) || !(m.b_w2 > 0.0) || !(m.c_w > 0.0) ||
        !(m.a_w * m.c_w > m.b_w2)) {
      throw parameter_error(
          "RationalEfficiency requires positive parameters with a*c > b");
    }
  }
};

}  // namespace

void StorageCircuit::validate() const {
  if (!(r_ohm > 0.0) || !std::isfinite(r_ohm)) {
    throw parameter_error("StorageCircuit.r_ohm must be positive");
  }
  if (!(c_f > 0.0) || !std::isfinite(c_f)) {
    throw parameter_error("StorageCircuit.c_f must be positive");
  }
  if (!(q_initial_c >= 0.0) || !(q_initial_c < q_full_c) ||
      !std::isfinite(q_full_c)) {
    throw parameter_error(
        "StorageCircuit requires 0 <= q_initial_c < q_full_c");
  }
}

void validate_model(const EfficiencyModel& model) {
  std::visit(ModelValidator{}, model);
}

double y_aux(const StorageCircuit& circuit, double q_c, double p_w) {
  circuit.validate();
  if (!(p_w > 0.0) || !std::isfinite(p_w)) {
    throw parameter_error("y_aux: power must be positive, got " +
                          std::to_string(p_w));
  }
  if (!(q_c >= 0.0)) {
    throw parameter_error("y_aux: charge must be >= 0");
  }
  const double u = u_of(circuit, q_c, p_w);
  return u * u / (4.0 * p_w * circuit.r_ohm * circuit.c_f * circuit.c_f);
}

double time_to_recharge(const StorageCircuit& circuit, double q_start_c,
                        double q_end_c, double p_h_w) {
  circuit.validate();
  check_charge_range(circuit, q_start_c, "q_start");
  check_charge_range(circuit, q_end_c, "q_end");
  if (q_start_c > q_end_c) {
    throw parameter_error("time_to_recharge: q_start exceeds q_end");
  }
  if (p_h_w <= kPowerFloorW) return kInf;
  if (q_start_c == q_end_c) return 0.0;
  const double rc2 = circuit.r_ohm * circuit.c_f * circuit.c_f;
  const double ms =
      std::sqrt(q_start_c * q_start_c + 4.0 * p_h_w * rc2);
  const double me = std::sqrt(q_end_c * q_end_c + 4.0 * p_h_w * rc2);
  const double us = q_start_c + ms;
  const double ue = q_end_c + me;
  // u_end - u_start without cancellation.
  const double du =
      (q_end_c - q_start_c) * (1.0 + (q_end_c + q_start_c) / (me + ms));
  const double log_term = 2.0 * std::log1p(du / us);
  const double lin_term = du * (ue + us) / (4.0 * p_h_w * rc2);
  return 0.5 * circuit.r_ohm * circuit.c_f * (log_term + lin_term);
}

double charge_after(const StorageCircuit& circuit, double q_start_c,
                    double p_h_w, double t_s) {
  circuit.validate();
  check_charge_range(circuit, q_start_c, "q_start");
  if (t_s < 0.0 || std::isnan(t_s)) {
    throw parameter_error("charge_after: time must be >= 0");
  }
  if (t_s == 0.0 || p_h_w <= kPowerFloorW) return q_start_c;
  if (time_to_recharge(circuit, q_start_c, circuit.q_full_c, p_h_w) <= t_s) {
    return circuit.q_full_c;
  }
  double lo = q_start_c;
  double hi = circuit.q_full_c;
  for (int iter = 0; iter < kInvertMaxIter; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (time_to_recharge(circuit, q_start_c, mid, p_h_w) < t_s) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double invert_time_to_recharge(const StorageCircuit& circuit, double q_start_c,
                               double q_end_c, double t_s) {
  circuit.validate();
  check_charge_range(circuit, q_start_c, "q_start");
  check_charge_range(circuit, q_end_c, "q_end");
  if (q_start_c >= q_end_c) {
    throw parameter_error("invert_time_to_recharge: needs q_start < q_end");
  }
  if (!(t_s > 0.0) || !std::isfinite(t_s)) {
    throw parameter_error("invert_time_to_recharge: time must be positive");
  }
  const double t_slowest =
      time_to_recharge(circuit, q_start_c, q_end_c, kPowerBracketLoW * 1.0001);
  const double t_fastest =
      time_to_recharge(circuit, q_start_c, q_end_c, kPowerBracketHiW);
  if (t_s > t_slowest) {
    throw non_invertible_error(
        "invert_time_to_recharge: time " + std::to_string(t_s) +
        " s needs power below the bracket floor");
  }
  if (t_s < t_fastest) {
    throw non_invertible_error(
        "invert_time_to_recharge: time " + std::to_string(t_s) +
        " s needs power above the bracket ceiling");
  }
  // Recharge time decreases with power, so -t is increasing.
  auto f = [&](double p) {
    return -time_to_recharge(circuit, q_start_c, q_end_c, p);
  };
  return bisect_log_increasing(f, kPowerBracketLoW, kPowerBracketHiW, -t_s);
}

double efficiency(const EfficiencyModel& model, double p_r_w) {
  validate_model(model);
  if (p_r_w < 0.0 || !std::isfinite(p_r_w)) {
    throw parameter_error("efficiency: power must be >= 0");
  }
  if (p_r_w == 0.0) return 0.0;
  return harvested_power(model, p_r_w) / p_r_w;
}

double harvested_power(const EfficiencyModel& model, double p_r_w) {
  validate_model(model);
  if (p_r_w < 0.0 || !std::isfinite(p_r_w)) {
    throw parameter_error("harvested_power: power must be >= 0");
  }
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PiecewiseLinearEfficiency>) {
          return piecewise_eta(m, p_r_w) * p_r_w;
        } else if constexpr (std::is_same_v<T, ConstantEfficiency>) {
          return m.eta * p_r_w;
        } else if constexpr (std::is_same_v<T, SigmoidEfficiency>) {
          return sigmoid_harvested(m, p_r_w);
        } else {
          return rational_harvested(m, p_r_w);
        }
      },
      model);
}

double invert_harvested_power(const EfficiencyModel& model, double p_h_w) {
  validate_model(model);
  if (!(p_h_w > 0.0) || !std::isfinite(p_h_w)) {
    throw non_invertible_error("invert_harvested_power: needs power > 0");
  }
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PiecewiseLinearEfficiency>) {
          return piecewise_invert(m, p_h_w);
        } else if constexpr (std::is_same_v<T, ConstantEfficiency>) {
          return p_h_w / m.eta;
        } else {
          const double floor_h = harvested_power(model, kPowerBracketLoW);
          const double ceil_h = harvested_power(model, kPowerBracketHiW);
          if (p_h_w >= ceil_h) {
            throw non_invertible_error(
                "invert_harvested_power: " + std::to_string(p_h_w) +
                " W is at or beyond the saturation range");
          }
          if (p_h_w <= floor_h) {
            throw non_invertible_error(
                "invert_harvested_power: " + std::to_string(p_h_w) +
                " W is below the invertible floor");
          }
          auto f = [&](double p) { return harvested_power(model, p); };
          return bisect_log_increasing(f, kPowerBracketLoW, kPowerBracketHiW,
                                       p_h_w);
        }
      },
      model);
}

double abs_dot_from_ttr(const StorageCircuit& circuit,
                        const EfficiencyModel& model,
                        const ChannelParams& params, double t_s) {
  return observe_from_ttr(circuit, model, params, t_s).abs_dot;
}

HarvestObservation observe_from_ttr(const StorageCircuit& circuit,
                                    const EfficiencyModel& model,
                                    const ChannelParams& params, double t_s) {
  params.validate();
  if (!(t_s > 0.0) || !std::isfinite(t_s)) {
    throw parameter_error("observe_from_ttr: time must be positive and finite");
  }
  HarvestObservation obs;
  obs.time_to_recharge_s = t_s;
  obs.harvested_power_w = invert_time_to_recharge(
      circuit, circuit.q_initial_c, circuit.q_full_c, t_s);
  const double p_r = invert_harvested_power(model, obs.harvested_power_w);
  obs.abs_dot =
      std::sqrt(p_r / (params.antenna_gain * params.transmit_power_w));
  return obs;
}

}  // namespace wptbeam
