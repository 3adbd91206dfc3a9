#include "scnet/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "scnet/errors.hpp"

namespace scnet {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw ConfigError("config: key '" + key + "': " + what);
}

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || v.empty()) bad(key, "expected a number, got '" + v + "'");
  return x;
}

long long parse_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || v.empty()) bad(key, "expected an integer, got '" + v + "'");
  return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || v.empty() || v[0] == '-')
    bad(key, "expected a nonnegative integer, got '" + v + "'");
  return x;
}

void parse_range(const std::string& v, RunConfig& c) {
  double lo = 0.0, hi = 0.0, step = 1.0;
  const int fields = std::sscanf(v.c_str(), "%lf:%lf:%lf", &lo, &hi, &step);
  if (fields < 2) bad("sweep_range", "expected 'lo:hi' or 'lo:hi:step', got '" + v + "'");
  c.sweep_lo = lo;
  c.sweep_hi = hi;
  c.sweep_step = fields == 3 ? step : 1.0;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void validate_config(const RunConfig& c) {
  if (c.m < 1) bad("m", "must be >= 1");
  if (c.n_frequent < 0) bad("n_frequent", "must be >= 0");
  if (c.n_occasional < 0) bad("n_occasional", "must be >= 0");
  if (c.n_frequent + c.n_occasional < 1)
    bad("n_frequent", "need at least one user in total");
  if (c.k != 0 && c.k < c.n_frequent + c.n_occasional)
    bad("k", "must be 0 (auto) or >= the number of users");
  if (!(c.area_m > 0.0)) bad("area_m", "must be > 0");
  if (!(c.alpha > 0.0)) bad("alpha", "must be > 0");
  if (c.noise_mode != "normalized" && c.noise_mode != "physical")
    bad("noise_mode", "must be 'normalized' or 'physical'");
  if (c.noise_mode == "normalized" && !(c.noise_value > 0.0 && c.noise_value < 1.0))
    bad("noise_value", "normalized noise must lie in (0, 1)");
  if (c.p_max_mode != "auto" && c.p_max_mode != "fixed")
    bad("p_max_mode", "must be 'auto' or 'fixed'");
  if (c.p_max_mode == "auto" && !(c.p_max_value > 0.0 && c.p_max_value < 1.0))
    bad("p_max_value", "auto mode needs a safety fraction in (0, 1)");
  if (c.p_max_mode == "fixed" && !(c.p_max_value > 0.0))
    bad("p_max_value", "fixed budget must be > 0");
  if (!(c.eta >= 0.0)) bad("eta", "must be >= 0");
  if (c.scheme != "context-aware" && c.scheme != "sum-rate" &&
      c.scheme != "proportional-fair")
    bad("scheme", "must be context-aware, sum-rate or proportional-fair");
  if (!(c.step_size >= 0.0)) bad("step_size", "must be >= 0 (0 = auto)");
  if (c.max_iters < 1) bad("max_iters", "must be >= 1");
  if (!(c.tol > 0.0)) bad("tol", "must be > 0");
  if (c.restarts < 1) bad("restarts", "must be >= 1");
  if (c.runs < 1) bad("runs", "must be >= 1");
  if (c.sweep != "frequent" && c.sweep != "eta")
    bad("sweep", "must be 'frequent' or 'eta'");
  if (!(c.sweep_step > 0.0)) bad("sweep_range", "step must be > 0");
  if (c.sweep_hi < c.sweep_lo) bad("sweep_range", "upper bound below lower bound");
  if (c.sweep == "frequent" && c.sweep_lo < 0.0)
    bad("sweep_range", "frequent-user counts must be >= 0");
}

ParsedConfig parse_config_full(const std::string& text) {
  ParsedConfig parsed;
  RunConfig& c = parsed.config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!parsed.explicit_keys.insert(key).second) bad(key, "duplicate key");

    if (key == "m") c.m = static_cast<int>(parse_int(key, value));
    else if (key == "n_frequent") c.n_frequent = static_cast<int>(parse_int(key, value));
    else if (key == "n_occasional") c.n_occasional = static_cast<int>(parse_int(key, value));
    else if (key == "k") c.k = static_cast<int>(parse_int(key, value));
    else if (key == "area_m") c.area_m = parse_double(key, value);
    else if (key == "alpha") c.alpha = parse_double(key, value);
    else if (key == "noise_mode") c.noise_mode = value;
    else if (key == "noise_value") c.noise_value = parse_double(key, value);
    else if (key == "p_max_mode") c.p_max_mode = value;
    else if (key == "p_max_value") c.p_max_value = parse_double(key, value);
    else if (key == "eta") c.eta = parse_double(key, value);
    else if (key == "scheme") c.scheme = value;
    else if (key == "step_size") c.step_size = parse_double(key, value);
    else if (key == "max_iters") c.max_iters = static_cast<int>(parse_int(key, value));
    else if (key == "tol") c.tol = parse_double(key, value);
    else if (key == "restarts") c.restarts = static_cast<int>(parse_int(key, value));
    else if (key == "runs") c.runs = static_cast<int>(parse_int(key, value));
    else if (key == "seed") c.seed = parse_u64(key, value);
    else if (key == "sweep") c.sweep = value;
    else if (key == "sweep_range") parse_range(value, c);
    else throw ConfigError("config: unknown key '" + key + "'");
  }
  // Range defaults follow the sweep variable when not given explicitly.
  if (!parsed.explicit_keys.count("sweep_range") && c.sweep == "eta") {
    c.sweep_lo = 1.0;
    c.sweep_hi = 30.0;
    c.sweep_step = 1.0;
  }
  validate_config(c);
  return parsed;
}

RunConfig parse_config(const std::string& text) {
  return parse_config_full(text).config;
}

ParsedConfig load_config_full(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_full(buf.str());
}

RunConfig load_config(const std::string& path) {
  return load_config_full(path).config;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "m = " << c.m << "\n";
  os << "n_frequent = " << c.n_frequent << "\n";
  os << "n_occasional = " << c.n_occasional << "\n";
  os << "k = " << c.k << "\n";
  os << "area_m = " << fmt(c.area_m) << "\n";
  os << "alpha = " << fmt(c.alpha) << "\n";
  os << "noise_mode = " << c.noise_mode << "\n";
  os << "noise_value = " << fmt(c.noise_value) << "\n";
  os << "p_max_mode = " << c.p_max_mode << "\n";
  os << "p_max_value = " << fmt(c.p_max_value) << "\n";
  os << "eta = " << fmt(c.eta) << "\n";
  os << "scheme = " << c.scheme << "\n";
  os << "step_size = " << fmt(c.step_size) << "\n";
  os << "max_iters = " << c.max_iters << "\n";
  os << "tol = " << fmt(c.tol) << "\n";
  os << "restarts = " << c.restarts << "\n";
  os << "runs = " << c.runs << "\n";
  os << "seed = " << c.seed << "\n";
  os << "sweep = " << c.sweep << "\n";
  os << "sweep_range = " << fmt(c.sweep_lo) << ":" << fmt(c.sweep_hi) << ":"
     << fmt(c.sweep_step) << "\n";
  return os.str();
}

void apply_sweep_defaults(ParsedConfig& parsed, SweepVariable variable) {
  RunConfig& c = parsed.config;
  const char* want = variable == SweepVariable::eta ? "eta" : "frequent";
  if (parsed.explicit_keys.count("sweep") && c.sweep != want)
    bad("sweep", std::string("config requests a '") + c.sweep +
                     "' sweep but the command sweeps '" + want + "'");
  c.sweep = want;
  if (variable == SweepVariable::eta) {
    if (!parsed.explicit_keys.count("n_frequent")) c.n_frequent = 6;
    if (!parsed.explicit_keys.count("n_occasional")) c.n_occasional = 2;
    if (!parsed.explicit_keys.count("sweep_range")) {
      c.sweep_lo = 1.0;
      c.sweep_hi = 30.0;
      c.sweep_step = 1.0;
    }
  } else {
    if (!parsed.explicit_keys.count("n_occasional")) c.n_occasional = 5;
    if (!parsed.explicit_keys.count("sweep_range")) {
      c.sweep_lo = 1.0;
      c.sweep_hi = 10.0;
      c.sweep_step = 1.0;
    }
  }
  validate_config(c);
}

ExperimentPlan plan_from_config(const RunConfig& c) {
  validate_config(c);
  ExperimentPlan plan;
  plan.area_side = c.area_m;
  plan.alpha = c.alpha;
  plan.noise_mode =
      c.noise_mode == "normalized" ? NoiseMode::normalized : NoiseMode::physical;
  plan.noise_value = c.noise_value;
  plan.num_scbs = c.m;
  plan.n_frequent = c.n_frequent;
  plan.n_occasional = c.n_occasional;
  plan.k_override = c.k;
  plan.eta = c.eta;
  plan.runs = c.runs;
  plan.base_seed = c.seed;
  plan.p_max_policy =
      c.p_max_mode == "auto" ? PmaxPolicy::suggest : PmaxPolicy::fixed;
  plan.p_max_value = c.p_max_value;
  plan.sweep = c.sweep == "eta" ? SweepVariable::eta : SweepVariable::frequent_users;
  plan.sweep_lo = c.sweep_lo;
  plan.sweep_hi = c.sweep_hi;
  plan.sweep_step = c.sweep_step;
  plan.solver = solver_from_config(c);
  return plan;
}

SolverConfig solver_from_config(const RunConfig& c) {
  SolverConfig s;
  s.step_size = c.step_size;
  s.max_iterations = c.max_iters;
  s.convergence_tol = c.tol;
  s.num_restarts = c.restarts;
  s.restart_seed = c.seed;
  return s;
}

GameSpec gamespec_from_config(const RunConfig& c) {
  GameSpec spec;
  spec.scheme = scheme_from_name(c.scheme);
  spec.eta_per_scbs = {c.eta};
  return spec;
}

}  // namespace scnet
