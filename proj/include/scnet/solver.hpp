#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "scnet/game.hpp"
#include "scnet/scenario.hpp"

namespace scnet {

// Discretized Rosen gradient play.  All tolerances are relative to p_max:
// profiles live in [0, p_max]^d, so a scale-free threshold keeps one default
// meaningful from unit test instances down to picocell power budgets.
struct SolverConfig {
  // 0 = auto: 0.1 * p_max / (1 + sup-norm of the initial joint gradient).
  double step_size = 0.0;
  int max_iterations = 100000;
  double convergence_tol = 1e-8;  // sup-norm profile change per step, / p_max
  int num_restarts = 10;
  std::uint64_t restart_seed = 0;
  bool record_trace = false;
};

struct TraceEntry {
  int iteration;
  double delta;     // sup-norm profile change, absolute
  double residual;  // delta / p_max
};

struct SolveReport {
  PowerProfile profile;
  Eigen::VectorXd utilities;  // per SCBS, under the solved spec
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;      // sup-norm of step(u*) - u*, / p_max
  double residual_abs = 0.0;  // same, in power units
  double step_size_used = 0.0;
  std::vector<TraceEntry> trace;
};

// One simultaneous (Jacobi) update u_i' = prox(u_i + gamma * dJ_i/du_i) for
// every SCBS.  The smooth part of J_i moves by an explicit gradient step;
// the |u - ubar| mismatch term is absorbed into the projection as its exact
// proximal map, so demand-matching fixed points are hit exactly instead of
// chattering around the kink.  Output is feasible by construction.
PowerProfile step_dynamics(const Scenario& sc, const GameSpec& spec,
                           const PowerProfile& profile,
                           const SolverConfig& config);

// Iterates step_dynamics until the sup-norm profile change drops below
// convergence_tol * p_max or max_iterations is exhausted.  Non-convergence
// is reported in the flag, never silently.
SolveReport solve_psne(const Scenario& sc, const GameSpec& spec,
                       const PowerProfile& initial, const SolverConfig& config);

struct VerifyReport {
  bool is_equilibrium = false;
  double residual = 0.0;         // relative fixed-point residual
  double residual_abs = 0.0;
  double max_improvement = 0.0;  // best unilateral utility gain found
  bool exhaustive = true;        // false when the oracle had to sample
};

// First-order residual plus a brute-force best-response probe: grid search
// over A_i (21 points per axis) for players with at most 3 slots, random
// feasible sampling for larger ones.
VerifyReport verify_equilibrium(const Scenario& sc, const GameSpec& spec,
                                const PowerProfile& profile, double tol,
                                const SolverConfig& config = {},
                                double improvement_tol = 1e-4);

struct UniquenessReport {
  enum class Status { unique, ambiguous, indeterminate };
  Status status = Status::indeterminate;
  double max_pairwise_distance = 0.0;  // sup-norm across restart solutions
  int restarts = 0;
  int converged_restarts = 0;
};

// Multi-start probe: solve from num_restarts random feasible profiles and
// compare the limits.  `unique` requires agreement within 1e-6 * p_max.
UniquenessReport uniqueness_probe(const Scenario& sc, const GameSpec& spec,
                                  const SolverConfig& config);

std::string report_to_json(const SolveReport& report);
void write_trace_csv(const SolveReport& report, const std::string& path);

}  // namespace scnet
