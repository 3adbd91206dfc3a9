#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "scnet/scenario.hpp"

namespace scnet {

enum class Scheme { context_aware, sum_rate, proportional_fair };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

// Rate-derivative convention.  `analytic` is the derivative of
// log(1 + SINR) and drives the solver; `paper_literal` keeps an extra
// (I + sigma^2) factor and exists so the uniqueness certificate can be
// evaluated with exactly the derivative convention its bounds are built
// from.
enum class GradMode { analytic, paper_literal };

// Which utility is in force plus its constants.  The QoS map is the
// identity throughout: a frequent user's demand is a power level, and the
// mismatch cost compares allocated power against it directly.  eta is per
// SCBS; a single-element vector broadcasts to all players.
struct GameSpec {
  Scheme scheme = Scheme::context_aware;
  std::vector<double> eta_per_scbs{2.0};
  double pf_rate_floor = 1e-12;
  // 0 keeps the exact |u - ubar| cost; > 0 replaces it by
  // sqrt((u - ubar)^2 + delta^2) for strict-differentiability tests.
  double cost_smoothing = 0.0;

  double eta(int i) const {
    return eta_per_scbs.size() == 1 ? eta_per_scbs[0]
                                    : eta_per_scbs[static_cast<std::size_t>(i)];
  }
  void validate(int num_scbs) const;

  static GameSpec context_aware(double eta) {
    return GameSpec{Scheme::context_aware, {eta}, 1e-12, 0.0};
  }
  static GameSpec sum_rate() { return GameSpec{Scheme::sum_rate, {0.0}, 1e-12, 0.0}; }
  static GameSpec proportional_fair(double floor = 1e-12) {
    return GameSpec{Scheme::proportional_fair, {0.0}, floor, 0.0};
  }
};

// QoS mismatch cost |u - ubar| (identity QoS map); zero only at an exact
// demand match.
double cost(double u, double ubar);
// Smooth surrogate sqrt((u - ubar)^2 + delta^2).
double cost_smoothed(double u, double ubar, double delta);

// J_i at the given joint profile.
double utility(const Scenario& sc, const GameSpec& spec,
               const PowerProfile& profile, int i);

// dJ_i/du_i, one entry per slot of SCBS i.  The exact-cost subgradient uses
// sign(0) = 0 at the kink.
Eigen::VectorXd grad_utility(const Scenario& sc, const GameSpec& spec,
                             const PowerProfile& profile, int i,
                             GradMode mode = GradMode::analytic);

// dR_{i,user(s)}/du_i[s] for every slot s of SCBS i (no cost/PF terms).
Eigen::VectorXd grad_rates(const Scenario& sc, const PowerProfile& profile,
                           int i, GradMode mode = GradMode::analytic);

// Euclidean projection onto {u >= 0, 1'u <= p_max}.  Idempotent and
// nonexpansive; returns v unchanged when already feasible.
Eigen::VectorXd project_feasible(const Eigen::VectorXd& v, double p_max);

// Generalized projection used by the solver's forward-backward step:
//   argmin_v  0.5 ||v - z||^2 + weight * sum_j has_target[j] |v_j - target_j|
//   s.t.      v >= 0, 1'v <= p_max.
// With weight == 0 this is exactly project_feasible.
Eigen::VectorXd prox_feasible_l1(const Eigen::VectorXd& z, double p_max,
                                 double weight, const Eigen::VectorXd& target,
                                 const std::vector<std::uint8_t>& has_target);

}  // namespace scnet
