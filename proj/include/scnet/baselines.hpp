#pragma once

#include <Eigen/Core>

#include "scnet/game.hpp"
#include "scnet/scenario.hpp"
#include "scnet/solver.hpp"

namespace scnet {

// Equilibrium of one allocation scheme plus the cross-scheme yardstick:
// per-SCBS context-aware utility evaluated at that equilibrium, whichever
// scheme produced it.
struct BaselineResult {
  Scheme scheme = Scheme::sum_rate;
  SolveReport report;
  Eigen::VectorXd comparison_utility;
};

// Solves the noncooperative game under `scheme` with the shared solver and
// the default interior start, then scores the limit with eval_spec (must be
// context-aware; supplies the eta used for comparison).
BaselineResult solve_with_scheme(const Scenario& sc, Scheme scheme,
                                 const GameSpec& eval_spec,
                                 const SolverConfig& config);

BaselineResult solve_sumrate(const Scenario& sc, const GameSpec& eval_spec,
                             const SolverConfig& config);

// Proportional fairness: same dynamics on sum_j log(max(R_ij, floor)).
// Starts interior; an all-zero start is rejected (log singularity).
BaselineResult solve_pf(const Scenario& sc, const GameSpec& eval_spec,
                        const SolverConfig& config);

}  // namespace scnet
