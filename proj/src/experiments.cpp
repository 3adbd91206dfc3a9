#include "scnet/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "scnet/baselines.hpp"
#include "scnet/errors.hpp"
#include "scnet/rng.hpp"
#include "scnet/theory.hpp"

namespace scnet {

std::vector<double> ExperimentPlan::sweep_values() const {
  std::vector<double> values;
  for (double v = sweep_lo; v <= sweep_hi + 1e-9 * sweep_step; v += sweep_step)
    values.push_back(v);
  return values;
}

void ExperimentPlan::validate() const {
  if (num_scbs < 1) throw std::invalid_argument("plan: num_scbs must be >= 1");
  if (n_frequent < 0 || n_occasional < 0 || n_frequent + n_occasional < 1)
    throw std::invalid_argument("plan: need at least one user");
  if (!(area_side > 0.0)) throw std::invalid_argument("plan: area_side must be > 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("plan: alpha must be > 0");
  if (runs < 1) throw std::invalid_argument("plan: runs must be >= 1");
  if (!(sweep_step > 0.0) || sweep_hi < sweep_lo || sweep_values().empty())
    throw std::invalid_argument("plan: empty sweep range");
  if (noise_mode == NoiseMode::normalized &&
      !(noise_value > 0.0 && noise_value < 1.0))
    throw std::invalid_argument("plan: normalized noise must lie in (0, 1)");
  if (p_max_policy == PmaxPolicy::suggest &&
      !(p_max_value > 0.0 && p_max_value < 1.0))
    throw std::invalid_argument("plan: suggest fraction must lie in (0, 1)");
  if (p_max_policy == PmaxPolicy::fixed && !(p_max_value > 0.0))
    throw std::invalid_argument("plan: fixed p_max must be > 0");
  if (!(eta >= 0.0)) throw std::invalid_argument("plan: eta must be >= 0");
  if (k_override != 0 && k_override < n_frequent + n_occasional)
    throw std::invalid_argument("plan: k must be >= number of users");
}

Scenario gen_scenario(const ExperimentPlan& plan, double point_value,
                      int run_index) {
  plan.validate();
  int n_frequent = plan.n_frequent;
  if (plan.sweep == SweepVariable::frequent_users)
    n_frequent = static_cast<int>(std::lround(point_value));
  const int n = n_frequent + plan.n_occasional;
  if (n < 1) throw std::invalid_argument("gen_scenario: no users at this point");
  const int k = plan.k_override > 0 ? plan.k_override : n;

  // The instance seed mixes in the structural point (the user counts), not
  // the tradeoff constant: an eta sweep reuses the same deployments at every
  // point, so cross-point comparisons ride on common random numbers.
  const std::uint64_t seed = derive_seed(
      plan.base_seed, std::bit_cast<std::uint64_t>(static_cast<double>(n_frequent)),
      static_cast<std::uint64_t>(run_index));
  SplitMix64 rng(seed);

  Scenario sc;
  sc.num_scbs = plan.num_scbs;
  sc.num_ues = n;
  sc.num_subcarriers = k;
  sc.path_loss_exponent = plan.alpha;
  sc.rng_seed = seed;

  for (int i = 0; i < plan.num_scbs; ++i)
    sc.positions_scbs.push_back(
        {rng.uniform(0.0, plan.area_side), rng.uniform(0.0, plan.area_side)});
  for (int j = 0; j < n; ++j) {
    Point p{};
    for (int attempt = 0;; ++attempt) {
      p = {rng.uniform(0.0, plan.area_side), rng.uniform(0.0, plan.area_side)};
      if (plan.min_separation <= 0.0) break;
      bool clear = true;
      for (const Point& b : sc.positions_scbs)
        if (std::hypot(p.x - b.x, p.y - b.y) < plan.min_separation)
          clear = false;
      if (clear) break;
      if (attempt > 10000)
        throw std::invalid_argument(
            "gen_scenario: cannot honor min_separation in this area");
    }
    sc.positions_ues.push_back(p);
  }

  // |h|^2 ~ Exp(1) (Rayleigh fading); amplitudes stored.
  const std::size_t gains = static_cast<std::size_t>(plan.num_scbs) * n * k;
  sc.channel_gain.reserve(gains);
  for (std::size_t g = 0; g < gains; ++g)
    sc.channel_gain.push_back(plan.channel == ChannelModel::rayleigh
                                  ? std::sqrt(rng.exponential())
                                  : 1.0);

  const double sigma2 = plan.noise_mode == NoiseMode::normalized
                            ? plan.noise_value
                            : std::pow(10.0, (plan.noise_value - 30.0) / 10.0);
  sc.noise_var.assign(static_cast<std::size_t>(n) * k, sigma2);

  // Worst-case interference map: every SCBS serves every UE, user j on
  // subcarrier j at every SCBS.
  for (int i = 0; i < plan.num_scbs; ++i) {
    ServedSet s;
    for (int j = 0; j < n_frequent; ++j) s.frequent.push_back(j);
    for (int j = n_frequent; j < n; ++j) s.occasional.push_back(j);
    for (int j = 0; j < n; ++j) s.slots.push_back({j, j});
    s.qos_target.assign(n_frequent, 0.0);
    sc.served.push_back(std::move(s));
  }

  sc.p_max = 1.0;  // placeholder until the budget policy runs
  sc.seal();
  sc.p_max = plan.p_max_policy == PmaxPolicy::fixed
                 ? plan.p_max_value
                 : suggest_pmax(sc, plan.p_max_value);

  // QoS demands drawn once the budget is known: ubar ~ U[0, p_max / |N_i|].
  for (int i = 0; i < plan.num_scbs; ++i)
    for (int t = 0; t < n_frequent; ++t)
      sc.served[i].qos_target[t] = rng.uniform(0.0, sc.p_max / n);
  sc.seal();  // refresh the qos lookup caches

  return sc;
}

namespace {

struct RunOutcome {
  std::array<bool, 3> converged{};
  std::array<double, 3> mean_utility{};  // per-SCBS average, Eq.-(2) score
};

RunOutcome run_single(const ExperimentPlan& plan, double point_value,
                      int run_index) {
  const Scenario sc = gen_scenario(plan, point_value, run_index);
  const double eta =
      plan.sweep == SweepVariable::eta ? point_value : plan.eta;
  const GameSpec eval_spec = GameSpec::context_aware(eta);
  RunOutcome out;
  for (std::size_t s = 0; s < kAllSchemes.size(); ++s) {
    const BaselineResult r =
        solve_with_scheme(sc, kAllSchemes[s], eval_spec, plan.solver);
    out.converged[s] = r.report.converged;
    out.mean_utility[s] = r.comparison_utility.mean();
  }
  return out;
}

void parallel_runs(const ExperimentPlan& plan, double point_value, int jobs,
                   std::vector<RunOutcome>& results) {
  const int runs = plan.runs;
  results.resize(runs);
  int workers = jobs > 0 ? jobs
                         : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, runs));
  if (workers == 1) {
    for (int r = 0; r < runs; ++r) results[r] = run_single(plan, point_value, r);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int r = next.fetch_add(1); r < runs; r = next.fetch_add(1))
          results[r] = run_single(plan, point_value, r);
      } catch (...) {
        errors[w] = std::current_exception();
        next.store(runs);
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

PointStats run_point(const ExperimentPlan& plan, double point_value, int jobs) {
  plan.validate();
  std::vector<RunOutcome> results;
  parallel_runs(plan, point_value, jobs, results);

  PointStats stats;
  stats.value = point_value;
  stats.total_runs = plan.runs;
  std::array<double, 3> sum{};
  std::array<double, 3> sumsq{};
  for (const RunOutcome& r : results) {
    const bool paired = r.converged[0] && r.converged[1] && r.converged[2];
    for (std::size_t s = 0; s < 3; ++s)
      if (r.converged[s]) ++stats.converged[s];
    if (!paired) continue;
    ++stats.used_runs;
    for (std::size_t s = 0; s < 3; ++s) {
      sum[s] += r.mean_utility[s];
      sumsq[s] += r.mean_utility[s] * r.mean_utility[s];
    }
  }
  if (stats.used_runs * 2 < plan.runs)
    throw NonConvergenceError(
        "run_point: more than half of the runs failed to converge at point " +
        std::to_string(point_value));
  for (std::size_t s = 0; s < 3; ++s) {
    const double n = stats.used_runs;
    stats.mean[s] = sum[s] / n;
    if (stats.used_runs > 1) {
      const double var =
          std::max(0.0, (sumsq[s] - n * stats.mean[s] * stats.mean[s]) / (n - 1.0));
      stats.stderr_[s] = std::sqrt(var / n);
    }
  }
  return stats;
}

namespace {

SweepResult run_sweep(const ExperimentPlan& plan, const std::string& name,
                      int jobs) {
  plan.validate();
  SweepResult result;
  for (double value : plan.sweep_values()) {
    PointStats stats = run_point(plan, value, jobs);
    for (std::size_t s = 0; s < kAllSchemes.size(); ++s)
      result.rows.push_back({name, value, kAllSchemes[s], stats.mean[s],
                             stats.stderr_[s], stats.total_runs,
                             stats.converged[s]});
    result.points.push_back(stats);
  }
  return result;
}

}  // namespace

SweepResult sweep_frequent(const ExperimentPlan& plan, int jobs) {
  ExperimentPlan p = plan;
  p.sweep = SweepVariable::frequent_users;
  return run_sweep(p, "frequent", jobs);
}

SweepResult sweep_eta(const ExperimentPlan& plan, int jobs) {
  ExperimentPlan p = plan;
  p.sweep = SweepVariable::eta;
  return run_sweep(p, "eta", jobs);
}

std::string sweep_to_csv(const SweepResult& result) {
  std::ostringstream os;
  os << "sweep_var,value,scheme,mean_utility,stderr,runs,converged_runs\n";
  char line[256];
  for (const SweepRow& r : result.rows) {
    std::snprintf(line, sizeof line, "%s,%.9g,%s,%.9g,%.9g,%d,%d\n",
                  r.sweep_name.c_str(), r.value, scheme_name(r.scheme).c_str(),
                  r.mean_utility, r.stderr_, r.runs, r.converged_runs);
    os << line;
  }
  return os.str();
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << sweep_to_csv(result);
}

void write_plot_script(const std::string& csv_path, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "# gnuplot script for a sweep CSV produced by `scnet sweep-*`\n"
      << "set datafile separator ','\n"
      << "set key left top\n"
      << "set xlabel 'sweep value'\n"
      << "set ylabel 'mean utility per SCBS'\n"
      << "plot '" << csv_path
      << "' using 2:($3 eq 'context-aware' ? $4 : 1/0) with linespoints "
         "title 'context-aware', \\\n"
      << "     '" << csv_path
      << "' using 2:($3 eq 'sum-rate' ? $4 : 1/0) with linespoints title "
         "'sum-rate', \\\n"
      << "     '" << csv_path
      << "' using 2:($3 eq 'proportional-fair' ? $4 : 1/0) with linespoints "
         "title 'proportional-fair'\n";
}

}  // namespace scnet
