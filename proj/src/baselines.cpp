#include "scnet/baselines.hpp"

#include <stdexcept>

namespace scnet {

namespace {

GameSpec spec_for(Scheme scheme, const GameSpec& eval_spec) {
  switch (scheme) {
    case Scheme::context_aware: return eval_spec;
    case Scheme::sum_rate: return GameSpec::sum_rate();
    case Scheme::proportional_fair:
      return GameSpec::proportional_fair(eval_spec.pf_rate_floor);
  }
  throw std::invalid_argument("bad scheme");
}

}  // namespace

BaselineResult solve_with_scheme(const Scenario& sc, Scheme scheme,
                                 const GameSpec& eval_spec,
                                 const SolverConfig& config) {
  if (eval_spec.scheme != Scheme::context_aware)
    throw std::invalid_argument(
        "solve_with_scheme: eval_spec must be the context-aware utility");
  const GameSpec game = spec_for(scheme, eval_spec);
  const PowerProfile start = PowerProfile::uniform(sc);
  if (scheme == Scheme::proportional_fair) {
    for (const Eigen::VectorXd& u : start.u)
      if ((u.array() <= 0.0).any())
        throw std::invalid_argument(
            "solve_pf: zero-power start rejected (log singularity)");
  }
  BaselineResult out;
  out.scheme = scheme;
  out.report = solve_psne(sc, game, start, config);
  out.comparison_utility.resize(sc.num_scbs);
  for (int i = 0; i < sc.num_scbs; ++i)
    out.comparison_utility[i] = utility(sc, eval_spec, out.report.profile, i);
  return out;
}

BaselineResult solve_sumrate(const Scenario& sc, const GameSpec& eval_spec,
                             const SolverConfig& config) {
  return solve_with_scheme(sc, Scheme::sum_rate, eval_spec, config);
}

BaselineResult solve_pf(const Scenario& sc, const GameSpec& eval_spec,
                        const SolverConfig& config) {
  return solve_with_scheme(sc, Scheme::proportional_fair, eval_spec, config);
}

}  // namespace scnet
