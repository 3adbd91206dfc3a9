#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "scnet/game.hpp"
#include "scnet/scenario.hpp"
#include "scnet/solver.hpp"

namespace scnet {

enum class NoiseMode { normalized, physical };
enum class PmaxPolicy { suggest, fixed };
enum class ChannelModel { rayleigh, constant_gain };
enum class SweepVariable { frequent_users, eta };

// Thrown when more than half of a sweep point's runs fail to converge.
struct NonConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Monte Carlo comparison plan: random uniform deployments in a square,
// worst-case interference map (every SCBS serves every UE, shared
// subcarriers), three schemes solved per run on the identical scenario.
struct ExperimentPlan {
  double area_side = 500.0;  // meters
  double alpha = 3.0;
  NoiseMode noise_mode = NoiseMode::normalized;
  double noise_value = 0.5;  // normalized: sigma^2 target; physical: dBm
  int num_scbs = 5;
  int n_frequent = 6;
  int n_occasional = 5;
  int k_override = 0;  // 0: K = N
  double eta = 2.0;
  int runs = 200;
  std::uint64_t base_seed = 12345;
  PmaxPolicy p_max_policy = PmaxPolicy::suggest;
  double p_max_value = 0.9;  // suggest: safety fraction; fixed: budget
  SweepVariable sweep = SweepVariable::frequent_users;
  double sweep_lo = 1.0;
  double sweep_hi = 10.0;
  double sweep_step = 1.0;
  SolverConfig solver;
  ChannelModel channel = ChannelModel::rayleigh;
  double min_separation = 0.0;  // rejection-sample UE placement when > 0

  std::vector<double> sweep_values() const;
  void validate() const;
};

// Deterministically generates the scenario for one (sweep point, run) cell.
// The sweep variable overrides the plan's fixed value at `point_value`; the
// instance seed is derived from (base_seed, frequent-user count, run_index),
// so eta sweeps share deployments across points (the tradeoff constant does
// not shape the physical scenario).
Scenario gen_scenario(const ExperimentPlan& plan, double point_value,
                      int run_index);

inline constexpr std::array<Scheme, 3> kAllSchemes = {
    Scheme::context_aware, Scheme::sum_rate, Scheme::proportional_fair};

struct PointStats {
  double value = 0.0;  // the sweep point
  int total_runs = 0;
  int used_runs = 0;  // runs where all three schemes converged (paired)
  std::array<double, 3> mean{};    // per scheme, order of kAllSchemes
  std::array<double, 3> stderr_{};
  std::array<int, 3> converged{};  // per-scheme convergence counts
};

// Runs `plan.runs` paired comparisons at one sweep point.  Means and
// standard errors are taken over the runs where every scheme converged, so
// the three columns stay paired.  jobs = 0 uses all logical cores.
PointStats run_point(const ExperimentPlan& plan, double point_value,
                     int jobs = 0);

struct SweepRow {
  std::string sweep_name;
  double value = 0.0;
  Scheme scheme = Scheme::context_aware;
  double mean_utility = 0.0;
  double stderr_ = 0.0;
  int runs = 0;
  int converged_runs = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<PointStats> points;
};

SweepResult sweep_frequent(const ExperimentPlan& plan, int jobs = 0);
SweepResult sweep_eta(const ExperimentPlan& plan, int jobs = 0);

// Fixed column order and %.9g formatting keep re-runs byte-comparable.
std::string sweep_to_csv(const SweepResult& result);
void write_sweep_csv(const SweepResult& result, const std::string& path);
// Companion gnuplot commands for a written CSV.
void write_plot_script(const std::string& csv_path, const std::string& path);

}  // namespace scnet
