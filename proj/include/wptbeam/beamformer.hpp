// Copyright wpt-beamsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef WPTBEAM_BEAMFORMER_HPP_
#define WPTBEAM_BEAMFORMER_HPP_

#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "wptbeam/basis.hpp"
#include "wptbeam/harvester.hpp"
#include "wptbeam/oracle.hpp"

namespace wptbeam {

// Maps a full-cycle recharge time to the recovered |<h, w>|.
using TtrConverter = std::function<double(double)>;

enum class SlotKind {
  kBasisProbe,      // one orthonormal basis column
  kAngleProbeA,     // first phase-offset combination of an iteration
  kAngleProbeB,     // second phase-offset combination of an iteration
  kTimeoutFallback  // re-transmission with a known vector after a timeout
};

struct FapSlot {
  int ordinal = 0;
  SlotKind kind = SlotKind::kBasisProbe;
  double elapsed_s = 0.0;
  // Recovered |<h, w>| for this slot's vector (0 when excluded).
  double tau = 0.0;
  bool timed_out = false;
  // Original basis column index for basis and fallback slots, -1 otherwise.
  int basis_col = -1;
  // 1-based angle iteration for angle-probe slots, -1 otherwise.
  int iteration = -1;
  BeamformingVector w;
};

// Complete record of one feedback-acquisition phase.
struct FapTrace {
  std::vector<FapSlot> slots;
  BeamformingVector w_opt;
  double dot_prod = 0.0;
  // Basis columns in the order the angle phase consumed them.
  std::vector<int> probe_order;
};

struct FallbackEvent {
  int column = 0;
  double t_res_s = 0.0;
  double recovered_tau = 0.0;
  // True when the direction was written off as unrecoverable (zero tau).
  bool excluded = false;
};

struct TimedProbeResult {
  std::vector<double> taus;
  // Measured full-cycle times for columns that completed cleanly, else 0.
  std::vector<double> full_cycle_s;
  std::vector<FallbackEvent> events;
};

struct BeamformerOptions {
  double time_limit_s = std::numeric_limits<double>::infinity();
  // Required when time_limit_s is finite: the storage circuit used to
  // recover strengths of timed-out directions.
  std::optional<StorageCircuit> circuit;
  // Sort basis columns by descending strength before the angle phase, so
  // the accumulated vector stays strong enough to avoid timeouts.
  bool reorder_by_strength = false;
  // A direction whose strength falls below threshold * (the larger
  // coefficient) contributes nothing and its angle step is skipped.
  double degeneracy_rel_threshold = 1e-6;
};

// Least-squares phase estimate from the two probe observations:
//   gammaR = (t1^2 + t2^2 - 2*kappa1) / (2*sqrt(2)*kappa2)
//   gammaI = (t2^2 - t1^2) / (2*sqrt(2)*kappa2)
std::pair<double, double> solve_gammas(double tau_tilde1, double tau_tilde2,
                                       double kappa1, double kappa2);

// Phase maximizing gammaR*cos(theta) - gammaI*sin(theta), i.e. the
// four-quadrant angle of (gammaR, -gammaI). Range (-pi, pi].
double select_theta(double gamma_r, double gamma_i);

// Unit-norm combination (alpha1*w_cur + e^{j*phi}*alpha2*q_next)/sqrt(mu).
// Requires w_cur and q_next orthogonal.
BeamformingVector intermediate_vector(const BeamformingVector& w_cur,
                                      const cvec& q_next, double alpha1,
                                      double alpha2, double phi);

// Reference phase estimate: argmax of |<h, intermediate_vector(theta)>|
// over a uniform grid. Test oracle for select_theta.
double brute_force_theta(const ChannelVector& h, const BeamformingVector& w_cur,
                         const cvec& q_next, double alpha1, double alpha2,
                         int grid_points);

// Probes every basis column once and converts the observed times to
// strengths. Throws timeout_error if any probe would never feed back.
std::vector<double> probe_basis(ProbeOracle& oracle,
                                const OrthonormalBasis& basis,
                                const TtrConverter& converter,
                                FapTrace* trace = nullptr);

// Basis probing under a per-slot time limit. A timed-out column is
// recovered by switching to the strongest known vector, timing its
// residual recharge, and inverting the two-stage recharge split; columns
// that cannot be recovered are excluded with zero strength.
TimedProbeResult probe_with_time_limit(ProbeOracle& oracle,
                                       const OrthonormalBasis& basis,
                                       const StorageCircuit& circuit,
                                       const TtrConverter& converter,
                                       double t_lim_s,
                                       FapTrace* trace = nullptr);

// Full beam acquisition: probe the basis, then recover the relative phase
// of one new column per iteration from two phase-offset probes. Returns
// the final vector, its tracked strength, and the complete slot trace.
FapTrace find_optimal_beamformer(ProbeOracle& oracle,
                                 const OrthonormalBasis& basis,
                                 const TtrConverter& converter,
                                 const BeamformerOptions& options = {});

}  // namespace wptbeam

#endif  // WPTBEAM_BEAMFORMER_HPP_
