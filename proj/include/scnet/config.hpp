#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>

#include "scnet/experiments.hpp"
#include "scnet/game.hpp"
#include "scnet/solver.hpp"

namespace scnet {

// Malformed or out-of-range configuration input; the message names the
// offending key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key = value document covering scenario generation, the game, the
// solver and the sweep.  Unknown keys are rejected; every default is the
// value below.
struct RunConfig {
  int m = 5;
  int n_frequent = 6;
  int n_occasional = 5;
  int k = 0;  // 0: one subcarrier per user (K = N)
  double area_m = 500.0;
  double alpha = 3.0;
  std::string noise_mode = "normalized";  // or "physical" (value in dBm)
  double noise_value = 0.5;
  std::string p_max_mode = "auto";  // or "fixed"
  double p_max_value = 0.9;         // auto: safety fraction; fixed: budget
  double eta = 2.0;
  std::string scheme = "context-aware";
  double step_size = 0.0;  // 0: auto
  int max_iters = 100000;
  double tol = 1e-8;
  int restarts = 10;
  int runs = 200;
  std::uint64_t seed = 12345;
  std::string sweep = "frequent";  // or "eta"
  double sweep_lo = 1.0;
  double sweep_hi = 10.0;
  double sweep_step = 1.0;

  bool operator==(const RunConfig&) const = default;
};

struct ParsedConfig {
  RunConfig config;
  std::set<std::string> explicit_keys;
};

// Parses and validates; throws ConfigError naming the key on any problem.
RunConfig parse_config(const std::string& text);
ParsedConfig parse_config_full(const std::string& text);
RunConfig load_config(const std::string& path);
ParsedConfig load_config_full(const std::string& path);

// Writes every key explicitly; parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& config);

void validate_config(const RunConfig& config);

// Figure-default fills for keys the document left implicit: the eta sweep
// fixes 6 frequent / 2 occasional users and range 1:30, the frequent-user
// sweep 5 occasional users and range 1:10.
void apply_sweep_defaults(ParsedConfig& parsed, SweepVariable variable);

ExperimentPlan plan_from_config(const RunConfig& config);
SolverConfig solver_from_config(const RunConfig& config);
GameSpec gamespec_from_config(const RunConfig& config);

}  // namespace scnet
