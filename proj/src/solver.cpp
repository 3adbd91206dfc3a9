#include "scnet/solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "scnet/errors.hpp"
#include "scnet/rng.hpp"

namespace scnet {

namespace {

// Slot-level view of the nonsmooth |u - ubar| terms of one player.  A
// frequent user served over a single slot gets an exact proximal treatment;
// multi-slot frequent users (K_max > 1) keep the subgradient in the forward
// step because their cost couples slots.
struct PlayerCostLayout {
  Eigen::VectorXd target;
  std::vector<std::uint8_t> has_target;
  std::vector<int> multi_slot_frequent;  // user ids
  bool any_prox = false;
};

struct StepContext {
  std::vector<PlayerCostLayout> layout;
  bool exact_cost = false;  // true only for context-aware with delta == 0
};

StepContext make_context(const Scenario& sc, const GameSpec& spec) {
  StepContext ctx;
  ctx.exact_cost = spec.scheme == Scheme::context_aware && spec.cost_smoothing == 0.0;
  ctx.layout.resize(sc.num_scbs);
  for (int i = 0; i < sc.num_scbs; ++i) {
    PlayerCostLayout& l = ctx.layout[i];
    const int n = sc.num_slots(i);
    l.target = Eigen::VectorXd::Zero(n);
    l.has_target.assign(n, 0);
    if (!ctx.exact_cost) continue;
    const ServedSet& served = sc.served[i];
    for (std::size_t t = 0; t < served.frequent.size(); ++t) {
      const int j = served.frequent[t];
      const auto& slots = sc.slots_of_user(i, j);
      if (slots.size() == 1) {
        l.target[slots[0]] = served.qos_target[t];
        l.has_target[slots[0]] = 1;
        l.any_prox = true;
      } else {
        l.multi_slot_frequent.push_back(j);
      }
    }
  }
  return ctx;
}

double sign_or_zero(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Forward gradient of everything except the prox-handled cost terms.
Eigen::VectorXd smooth_grad(const Scenario& sc, const GameSpec& spec,
                            const StepContext& ctx, const PowerProfile& profile,
                            int i) {
  if (!ctx.exact_cost) return grad_utility(sc, spec, profile, i);
  Eigen::VectorXd g = grad_rates(sc, profile, i);
  const double eta = spec.eta(i);
  for (int j : ctx.layout[i].multi_slot_frequent) {
    const double slope =
        eta * sign_or_zero(user_power(sc, profile, i, j) - sc.qos(i, j));
    for (int s : sc.slots_of_user(i, j)) g[s] -= slope;
  }
  return g;
}

PowerProfile step_with_context(const Scenario& sc, const GameSpec& spec,
                               const StepContext& ctx,
                               const PowerProfile& profile, double gamma) {
  PowerProfile next;
  next.u.resize(sc.num_scbs);
  for (int i = 0; i < sc.num_scbs; ++i) {
    const Eigen::VectorXd z =
        profile.u[i] + gamma * smooth_grad(sc, spec, ctx, profile, i);
    const PlayerCostLayout& l = ctx.layout[i];
    next.u[i] = l.any_prox
                    ? prox_feasible_l1(z, sc.p_max, gamma * spec.eta(i),
                                       l.target, l.has_target)
                    : project_feasible(z, sc.p_max);
  }
  return next;
}

// Upper bound on the curvature (row sums of the smooth part's Jacobian) at
// any feasible profile: every |d2 R / du du'| is at most beta beta' / sigma^4.
double curvature_bound(const Scenario& sc, const GameSpec& spec,
                       const PowerProfile& profile) {
  double worst = 0.0;
  for (int i = 0; i < sc.num_scbs; ++i) {
    for (int s = 0; s < sc.num_slots(i); ++s) {
      const SlotAssignment& a = sc.served[i].slots[s];
      const double beta = sc.slot_gain(i, s);
      double beta_sum = 0.0;
      for (const Scenario::Transmitter& t : sc.transmitters(a.subcarrier))
        beta_sum += sc.slot_gain(t.scbs, t.slot);
      const double noise = sc.noise(a.user, a.subcarrier);
      double l = beta * beta_sum / (noise * noise);
      if (spec.scheme == Scheme::proportional_fair) {
        const double r = std::max(rate(sc, profile, i, a.user), spec.pf_rate_floor);
        const double g = beta / noise;
        const double n_slots = static_cast<double>(sc.slots_of_user(i, a.user).size());
        l = l / r + n_slots * g * g / (r * r);
      }
      if (spec.scheme == Scheme::context_aware && spec.cost_smoothing > 0.0 &&
          sc.is_frequent(i, a.user))
        l += spec.eta(i) / spec.cost_smoothing;
      worst = std::max(worst, l);
    }
  }
  return worst;
}

// Auto step: large enough to cross the budget box in one stride of the
// initial gradient (the projection absorbs any overshoot), small enough for
// the smooth part's curvature row sums, which bound the joint Jacobi map's
// expansion.  The prox-handled mismatch cost places no stability limit of
// its own, so its slope eta is excluded from the travel estimate; it
// re-enters only when a multi-slot frequent user forces the subgradient
// into the forward step.
double auto_step_size(const Scenario& sc, const GameSpec& spec,
                      const StepContext& ctx, const PowerProfile& profile) {
  double g0 = 0.0;
  for (int i = 0; i < sc.num_scbs; ++i) {
    g0 = std::max(g0,
                  smooth_grad(sc, spec, ctx, profile, i).cwiseAbs().maxCoeff());
    if (!ctx.layout[i].multi_slot_frequent.empty())
      g0 = std::max(g0, spec.eta(i));
  }
  const double curv = curvature_bound(sc, spec, profile);
  double gamma = sc.p_max;  // zero-gradient fallback; any step fixes 0
  if (g0 > 0.0) gamma = sc.p_max / g0;
  if (curv > 0.0) gamma = std::min(gamma, 0.5 / curv);
  return gamma;
}

double resolve_step(const Scenario& sc, const GameSpec& spec,
                    const StepContext& ctx, const PowerProfile& profile,
                    const SolverConfig& config) {
  if (config.step_size > 0.0) return config.step_size;
  return auto_step_size(sc, spec, ctx, profile);
}

PowerProfile projected_copy(const Scenario& sc, const PowerProfile& profile) {
  PowerProfile p = profile;
  for (int i = 0; i < sc.num_scbs; ++i)
    p.u[i] = project_feasible(p.u[i], sc.p_max);
  return p;
}

}  // namespace

PowerProfile step_dynamics(const Scenario& sc, const GameSpec& spec,
                           const PowerProfile& profile,
                           const SolverConfig& config) {
  spec.validate(sc.num_scbs);
  const StepContext ctx = make_context(sc, spec);
  return step_with_context(sc, spec, ctx, profile,
                           resolve_step(sc, spec, ctx, profile, config));
}

SolveReport solve_psne(const Scenario& sc, const GameSpec& spec,
                       const PowerProfile& initial, const SolverConfig& config) {
  spec.validate(sc.num_scbs);
  if (!(config.convergence_tol > 0.0))
    throw std::invalid_argument("convergence_tol must be > 0");
  if (config.max_iterations < 1)
    throw std::invalid_argument("max_iterations must be >= 1");

  SolveReport report;
  PowerProfile current = initial.feasible(sc) ? initial : projected_copy(sc, initial);
  const StepContext ctx = make_context(sc, spec);
  const double gamma = resolve_step(sc, spec, ctx, current, config);
  report.step_size_used = gamma;
  const double abs_tol = config.convergence_tol * sc.p_max;

  for (int t = 1; t <= config.max_iterations; ++t) {
    PowerProfile next = step_with_context(sc, spec, ctx, current, gamma);
    const double delta = next.sup_distance(current);
    current = std::move(next);
    report.iterations = t;
    if (config.record_trace)
      report.trace.push_back({t, delta, delta / sc.p_max});
    if (delta <= abs_tol) {
      report.converged = true;
      break;
    }
  }

  report.residual_abs =
      step_with_context(sc, spec, ctx, current, gamma).sup_distance(current);
  report.residual = report.residual_abs / sc.p_max;
  report.utilities.resize(sc.num_scbs);
  for (int i = 0; i < sc.num_scbs; ++i)
    report.utilities[i] = utility(sc, spec, current, i);
  report.profile = std::move(current);
  return report;
}

namespace {

// Best unilateral utility gain for player i over a candidate list.
double best_deviation_gain(const Scenario& sc, const GameSpec& spec,
                           const PowerProfile& profile, int i,
                           const std::vector<Eigen::VectorXd>& candidates) {
  const double base = utility(sc, spec, profile, i);
  PowerProfile trial = profile;
  double best = 0.0;
  for (const Eigen::VectorXd& c : candidates) {
    trial.u[i] = c;
    best = std::max(best, utility(sc, spec, trial, i) - base);
  }
  return best;
}

void grid_candidates(int dim, double p_max, int points_per_axis,
                     std::vector<Eigen::VectorXd>& out) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  std::vector<int> idx(dim, 0);
  const double step = p_max / (points_per_axis - 1);
  while (true) {
    double sum = 0.0;
    for (int d = 0; d < dim; ++d) {
      v[d] = idx[d] * step;
      sum += v[d];
    }
    if (sum <= p_max * (1.0 + 1e-12)) out.push_back(v);
    int d = 0;
    while (d < dim && ++idx[d] == points_per_axis) idx[d++] = 0;
    if (d == dim) break;
  }
}

}  // namespace

VerifyReport verify_equilibrium(const Scenario& sc, const GameSpec& spec,
                                const PowerProfile& profile, double tol,
                                const SolverConfig& config,
                                double improvement_tol) {
  spec.validate(sc.num_scbs);
  VerifyReport out;
  const StepContext ctx = make_context(sc, spec);
  const double gamma = resolve_step(sc, spec, ctx, profile, config);
  out.residual_abs =
      step_with_context(sc, spec, ctx, profile, gamma).sup_distance(profile);
  out.residual = out.residual_abs / sc.p_max;

  constexpr int kGridPointsPerAxis = 21;
  constexpr int kSampledDeviations = 2000;
  double worst = 0.0;
  for (int i = 0; i < sc.num_scbs; ++i) {
    std::vector<Eigen::VectorXd> candidates;
    const int dim = sc.num_slots(i);
    if (dim <= 3) {
      grid_candidates(dim, sc.p_max, kGridPointsPerAxis, candidates);
    } else {
      out.exhaustive = false;
      SplitMix64 rng(derive_seed(0x0c0ffee5eed5ULL ^ sc.rng_seed, i, 0));
      candidates.reserve(kSampledDeviations);
      for (int s = 0; s < kSampledDeviations; ++s)
        candidates.push_back(sample_feasible(dim, sc.p_max, rng));
    }
    worst = std::max(worst, best_deviation_gain(sc, spec, profile, i, candidates));
  }
  out.max_improvement = worst;
  out.is_equilibrium = out.residual <= tol && worst <= improvement_tol;
  return out;
}

UniquenessReport uniqueness_probe(const Scenario& sc, const GameSpec& spec,
                                  const SolverConfig& config) {
  UniquenessReport out;
  out.restarts = config.num_restarts;
  if (config.num_restarts < 1)
    throw std::invalid_argument("num_restarts must be >= 1");

  std::vector<PowerProfile> limits;
  limits.reserve(config.num_restarts);
  for (int r = 0; r < config.num_restarts; ++r) {
    SplitMix64 rng(derive_seed(config.restart_seed ^ sc.rng_seed, r, 0));
    PowerProfile init;
    init.u.reserve(sc.num_scbs);
    for (int i = 0; i < sc.num_scbs; ++i)
      init.u.push_back(sample_feasible(sc.num_slots(i), sc.p_max, rng));
    SolveReport rep = solve_psne(sc, spec, init, config);
    if (!rep.converged) {
      out.status = UniquenessReport::Status::indeterminate;
      return out;
    }
    ++out.converged_restarts;
    limits.push_back(std::move(rep.profile));
  }

  double max_dist = 0.0;
  for (std::size_t a = 0; a < limits.size(); ++a)
    for (std::size_t b = a + 1; b < limits.size(); ++b)
      max_dist = std::max(max_dist, limits[a].sup_distance(limits[b]));
  out.max_pairwise_distance = max_dist;
  out.status = max_dist <= 1e-6 * sc.p_max
                   ? UniquenessReport::Status::unique
                   : UniquenessReport::Status::ambiguous;
  return out;
}

std::string report_to_json(const SolveReport& report) {
  nlohmann::json j;
  nlohmann::json profile = nlohmann::json::array();
  for (const Eigen::VectorXd& u : report.profile.u)
    profile.push_back(std::vector<double>(u.data(), u.data() + u.size()));
  j["profile"] = std::move(profile);
  j["utilities"] = std::vector<double>(
      report.utilities.data(), report.utilities.data() + report.utilities.size());
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["residual"] = report.residual;
  j["residual_abs"] = report.residual_abs;
  j["step_size_used"] = report.step_size_used;
  return j.dump(2);
}

void write_trace_csv(const SolveReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "iteration,delta,residual\n";
  char line[96];
  for (const TraceEntry& t : report.trace) {
    std::snprintf(line, sizeof line, "%d,%.9g,%.9g\n", t.iteration, t.delta,
                  t.residual);
    out << line;
  }
}

}  // namespace scnet
