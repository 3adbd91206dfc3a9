#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "scnet/game.hpp"
#include "scnet/scenario.hpp"

namespace scnet {

// Extremal channel/noise constants over the full index ranges
// (all SCBS x UE x subcarrier triples, served or not).
struct ExtremalConstants {
  double sigma2_min = 0.0;
  double sigma2_max = 0.0;
  double beta_min = 0.0;
  double beta_max = 0.0;
  int k_max = 0;  // most subcarriers any SCBS assigns to a single user
};

ExtremalConstants extremal_constants(const Scenario& sc);

struct XiBounds {
  double xi1 = 0.0;
  double xi2 = 0.0;
  bool vacuous = false;  // single player: no opponents to bound against
};

// xi1 = beta_min sigma2_min^3 / ((M-1) K_max beta_max^3),
// xi2 = (1 - sigma2_max) / (M beta_max).
XiBounds xi_bounds(const ExtremalConstants& c, int num_scbs);

struct ConditionReport {
  ExtremalConstants constants;
  XiBounds xi;
  double p_max = 0.0;
  double p_max_bound = 0.0;          // min{xi1, xi2}
  bool sigma_precondition = false;   // sigma2_max < 1
  bool condition_holds = false;
  GradMode jacobian_mode = GradMode::paper_literal;
  int negdef_samples = 0;
  int negdef_failures = 0;
  double negdef_max_eigenvalue = 0.0;  // worst (largest) over all samples
};

// Evaluates the sufficient uniqueness condition p_max < min{xi1, xi2}
// (requires sigma2_max < 1).  Constants only; see certify_negdef for the
// sampled curvature evidence.
ConditionReport check_pmax_condition(const Scenario& sc);

// Largest budget that still satisfies the condition, scaled by
// safety_fraction in (0, 1).  Throws when sigma2_max >= 1 (normalize noise
// first) or when there is no finite bound (single player).
double suggest_pmax(const Scenario& sc, double safety_fraction = 0.9);

// Pseudo-Jacobian of the gradient play: block matrix with rows
// d^2 J_i / du_i du_(col), one row/column per transmission slot.
// `analytic` differentiates log(1 + SINR); `paper_literal` uses the
// first-derivative convention the uniqueness bounds are derived from,
// which keeps an extra (I + sigma^2) factor.  Proportional-fair utilities
// are outside the uniqueness machinery and are rejected.
Eigen::MatrixXd jacobian_G(const Scenario& sc, const GameSpec& spec,
                           const PowerProfile& profile, GradMode mode);

struct NegdefResult {
  bool negative_definite = false;
  double max_eigenvalue = 0.0;
};

// Symmetric part S = G + G'; negative definite iff the largest eigenvalue
// is below -1e-12 (strictness margin under floating point).
NegdefResult negdef_check(const Eigen::MatrixXd& G);

// Row margins 2|G_rr| - sum_{c != r} |G_rc + G_cr|.  All-positive margins
// certify negative definiteness of G + G' by strict diagonal dominance.
Eigen::VectorXd diag_dominance_margin(const Scenario& sc, const GameSpec& spec,
                                      const PowerProfile& profile,
                                      GradMode mode);

// check_pmax_condition plus negdef_check at `samples` uniformly drawn
// feasible profiles (numeric evidence over the quantified domain, not a
// proof).
ConditionReport certify_negdef(const Scenario& sc, const GameSpec& spec,
                               GradMode mode, int samples, std::uint64_t seed);

std::string condition_table(const ConditionReport& report);
std::string condition_to_json(const ConditionReport& report);

}  // namespace scnet
