// scnet: context-aware small cell power allocation simulator.
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error,
// 4 solver non-convergence, 1 anything else.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "scnet/baselines.hpp"
#include "scnet/config.hpp"
#include "scnet/errors.hpp"
#include "scnet/experiments.hpp"
#include "scnet/rng.hpp"
#include "scnet/scenario.hpp"
#include "scnet/solver.hpp"
#include "scnet/theory.hpp"

namespace {

using namespace scnet;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNoConverge = 4;

ParsedConfig config_or_default(const std::string& path) {
  if (path.empty()) return parse_config_full("");
  return load_config_full(path);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
}

int cmd_gen(const std::string& config_path, const std::string& out_path) {
  const ParsedConfig parsed = config_or_default(config_path);
  const ExperimentPlan plan = plan_from_config(parsed.config);
  const Scenario sc = gen_scenario(plan, plan.n_frequent, 0);
  save_scenario(sc, out_path);
  std::printf("wrote %s: M=%d N=%d K=%d p_max=%.9g\n", out_path.c_str(),
              sc.num_scbs, sc.num_ues, sc.num_subcarriers, sc.p_max);
  return kExitOk;
}

int cmd_solve(const std::string& scenario_path, const std::string& config_path,
              const std::string& scheme_override, const std::string& out_path,
              const std::string& trace_path) {
  const ParsedConfig parsed = config_or_default(config_path);
  const Scenario sc = load_scenario(scenario_path);
  GameSpec spec = gamespec_from_config(parsed.config);
  if (!scheme_override.empty()) spec.scheme = scheme_from_name(scheme_override);
  if (spec.scheme != Scheme::context_aware) spec.eta_per_scbs = {0.0};
  SolverConfig solver = solver_from_config(parsed.config);
  solver.record_trace = !trace_path.empty();

  const SolveReport report = solve_psne(sc, spec, PowerProfile::uniform(sc), solver);
  std::printf("scheme=%s iterations=%d converged=%s residual=%.3g "
              "mean_utility=%.9g\n",
              scheme_name(spec.scheme).c_str(), report.iterations,
              report.converged ? "yes" : "no", report.residual,
              report.utilities.mean());
  if (!out_path.empty()) write_text(out_path, report_to_json(report) + "\n");
  if (!trace_path.empty()) write_trace_csv(report, trace_path);
  if (!report.converged) {
    std::fprintf(stderr, "solver did not converge within %d iterations\n",
                 solver.max_iterations);
    return kExitNoConverge;
  }
  return kExitOk;
}

int cmd_check(const std::string& scenario_path, const std::string& config_path,
              const std::string& mode_name, int samples,
              const std::string& out_path) {
  const ParsedConfig parsed = config_or_default(config_path);
  const Scenario sc = load_scenario(scenario_path);
  const GradMode mode =
      mode_name == "analytic" ? GradMode::analytic : GradMode::paper_literal;
  const GameSpec spec = GameSpec::context_aware(parsed.config.eta);
  const ConditionReport report =
      certify_negdef(sc, spec, mode, samples, parsed.config.seed);
  std::fputs(condition_table(report).c_str(), stdout);
  std::printf("condition %s\n", report.condition_holds ? "holds" : "does not hold");
  if (!out_path.empty()) write_text(out_path, condition_to_json(report) + "\n");
  return kExitOk;
}

int cmd_compare(const std::string& scenario_path, const std::string& config_path,
                const std::string& out_path) {
  const ParsedConfig parsed = config_or_default(config_path);
  const Scenario sc = load_scenario(scenario_path);
  const GameSpec eval_spec = GameSpec::context_aware(parsed.config.eta);
  const SolverConfig solver = solver_from_config(parsed.config);

  std::string json = "{\n";
  bool all_converged = true;
  std::printf("%-18s %14s %12s %10s\n", "scheme", "mean_utility", "iterations",
              "converged");
  for (std::size_t s = 0; s < kAllSchemes.size(); ++s) {
    const BaselineResult r =
        solve_with_scheme(sc, kAllSchemes[s], eval_spec, solver);
    all_converged = all_converged && r.report.converged;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-18s %14.9g %12d %10s\n",
                  scheme_name(r.scheme).c_str(), r.comparison_utility.mean(),
                  r.report.iterations, r.report.converged ? "yes" : "no");
    std::fputs(buf, stdout);
    std::snprintf(buf, sizeof buf, "  \"%s\": %.17g%s\n",
                  scheme_name(r.scheme).c_str(), r.comparison_utility.mean(),
                  s + 1 < kAllSchemes.size() ? "," : "");
    json += buf;
  }
  json += "}\n";
  if (!out_path.empty()) write_text(out_path, json);
  if (!all_converged) {
    std::fprintf(stderr, "at least one scheme did not converge\n");
    return kExitNoConverge;
  }
  return kExitOk;
}

int cmd_sweep(SweepVariable variable, const std::string& config_path,
              const std::string& out_path, const std::string& plot_path,
              int jobs) {
  ParsedConfig parsed = config_or_default(config_path);
  apply_sweep_defaults(parsed, variable);
  const ExperimentPlan plan = plan_from_config(parsed.config);
  const SweepResult result = variable == SweepVariable::eta
                                 ? sweep_eta(plan, jobs)
                                 : sweep_frequent(plan, jobs);
  write_sweep_csv(result, out_path);
  std::printf("wrote %s (%zu rows)\n", out_path.c_str(), result.rows.size());
  if (!plot_path.empty()) {
    write_plot_script(out_path, plot_path);
    std::printf("wrote %s\n", plot_path.c_str());
  }
  return kExitOk;
}

// Central finite differences of the utility, used as the self-test yardstick
// for the closed-form gradient and curvature code.
double fd_gradient_entry(const Scenario& sc, const GameSpec& spec,
                         const PowerProfile& profile, int i, int s, double h) {
  PowerProfile p = profile;
  p.u[i][s] = profile.u[i][s] + h;
  const double up = utility(sc, spec, p, i);
  p.u[i][s] = profile.u[i][s] - h;
  const double dn = utility(sc, spec, p, i);
  return (up - dn) / (2.0 * h);
}

double fd_hessian_entry(const Scenario& sc, const GameSpec& spec,
                        const PowerProfile& profile, int i, int pi, int ps,
                        int qi, int qs, double h) {
  PowerProfile p = profile;
  if (pi == qi && ps == qs) {
    auto at = [&](double a) {
      p.u[pi][ps] = profile.u[pi][ps] + a;
      const double v = utility(sc, spec, p, i);
      p.u[pi][ps] = profile.u[pi][ps];
      return v;
    };
    return (at(h) - 2.0 * at(0.0) + at(-h)) / (h * h);
  }
  auto at = [&](double a, double b) {
    p.u[pi][ps] = profile.u[pi][ps] + a;
    p.u[qi][qs] = profile.u[qi][qs] + b;
    const double v = utility(sc, spec, p, i);
    p.u[pi][ps] = profile.u[pi][ps];
    p.u[qi][qs] = profile.u[qi][qs];
    return v;
  };
  return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
}

int cmd_validate(std::uint64_t seed, int points) {
  ExperimentPlan plan;
  plan.area_side = 4.0;
  plan.min_separation = 1.0;
  plan.num_scbs = 2;
  plan.n_frequent = 2;
  plan.n_occasional = 1;
  plan.p_max_policy = PmaxPolicy::fixed;
  plan.p_max_value = 0.6;
  plan.base_seed = seed;

  double worst_grad = 0.0;
  double worst_hess = 0.0;
  SplitMix64 rng(derive_seed(seed, 0xa11d, 0));
  int checked = 0;
  for (int inst = 0; checked < points; ++inst) {
    const Scenario sc = gen_scenario(plan, plan.n_frequent, inst);
    const GameSpec spec = GameSpec::context_aware(2.0);
    PowerProfile p;
    for (int i = 0; i < sc.num_scbs; ++i)
      p.u.push_back(sample_feasible(sc.num_slots(i), sc.p_max, rng));
    // stay away from the cost kink
    bool near_kink = false;
    for (int i = 0; i < sc.num_scbs && !near_kink; ++i)
      for (int j : sc.served[i].frequent)
        if (std::abs(user_power(sc, p, i, j) - sc.qos(i, j)) < 1e-3)
          near_kink = true;
    if (near_kink) continue;
    ++checked;

    const double h = 1e-6 * sc.p_max;
    for (int i = 0; i < sc.num_scbs; ++i) {
      const Eigen::VectorXd g = grad_utility(sc, spec, p, i);
      Eigen::VectorXd fd(sc.num_slots(i));
      for (int s = 0; s < sc.num_slots(i); ++s)
        fd[s] = fd_gradient_entry(sc, spec, p, i, s, h);
      worst_grad = std::max(worst_grad,
                            (g - fd).cwiseAbs().maxCoeff() /
                                std::max(1e-12, fd.cwiseAbs().maxCoeff()));
    }
    const Eigen::MatrixXd G = jacobian_G(sc, spec, p, GradMode::analytic);
    double scale = G.cwiseAbs().maxCoeff();
    for (int i = 0; i < sc.num_scbs; ++i)
      for (int s = 0; s < sc.num_slots(i); ++s)
        for (int qi = 0; qi < sc.num_scbs; ++qi)
          for (int qs = 0; qs < sc.num_slots(qi); ++qs) {
            const double fd =
                fd_hessian_entry(sc, spec, p, i, i, s, qi, qs, 2e-4 * sc.p_max);
            const double an = G(sc.slot_offset(i) + s, sc.slot_offset(qi) + qs);
            worst_hess = std::max(worst_hess, std::abs(an - fd) / scale);
          }
  }
  std::printf("max gradient relative error  %.3g (tolerance 1e-06)\n", worst_grad);
  std::printf("max hessian relative error   %.3g (tolerance 1e-05)\n", worst_hess);
  const bool ok = worst_grad <= 1e-6 && worst_hess <= 1e-5;
  std::printf("validate: %s\n", ok ? "PASS" : "FAIL");
  return ok ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"context-aware small cell downlink power allocation simulator"};
  app.require_subcommand(1);

  std::string config_path, scenario_path, out_path, trace_path, plot_path;
  std::string scheme_override, mode_name = "paper-literal";
  int samples = 100;
  int jobs = 0;
  std::uint64_t seed = 12345;
  int points = 50;

  auto* gen = app.add_subcommand("gen", "generate a scenario file");
  gen->add_option("-c,--config", config_path, "config file");
  gen->add_option("-o,--output", out_path, "scenario output path")->required();

  auto* solve = app.add_subcommand("solve", "solve one scenario under one scheme");
  solve->add_option("-s,--scenario", scenario_path, "scenario file")->required();
  solve->add_option("-c,--config", config_path, "config file");
  solve->add_option("--scheme", scheme_override,
                    "context-aware | sum-rate | proportional-fair");
  solve->add_option("-o,--output", out_path, "report JSON path");
  solve->add_option("--trace", trace_path, "iteration trace CSV path");

  auto* check = app.add_subcommand("check", "evaluate the uniqueness condition");
  check->add_option("-s,--scenario", scenario_path, "scenario file")->required();
  check->add_option("-c,--config", config_path, "config file");
  check->add_option("--mode", mode_name, "paper-literal | analytic")
      ->check(CLI::IsMember({"paper-literal", "analytic"}));
  check->add_option("--samples", samples, "feasible profiles to sample");
  check->add_option("-o,--output", out_path, "report JSON path");

  auto* compare = app.add_subcommand("compare", "three schemes on one scenario");
  compare->add_option("-s,--scenario", scenario_path, "scenario file")->required();
  compare->add_option("-c,--config", config_path, "config file");
  compare->add_option("-o,--output", out_path, "summary JSON path");

  auto* swf = app.add_subcommand("sweep-frequent",
                                 "utility vs number of frequent users");
  swf->add_option("-c,--config", config_path, "config file");
  swf->add_option("-o,--output", out_path, "CSV output path")->required();
  swf->add_option("--plot-script", plot_path, "also emit a gnuplot script");
  swf->add_option("--jobs", jobs, "worker threads (0 = all cores)");

  auto* swe = app.add_subcommand("sweep-eta", "utility vs tradeoff constant");
  swe->add_option("-c,--config", config_path, "config file");
  swe->add_option("-o,--output", out_path, "CSV output path")->required();
  swe->add_option("--plot-script", plot_path, "also emit a gnuplot script");
  swe->add_option("--jobs", jobs, "worker threads (0 = all cores)");

  auto* validate = app.add_subcommand(
      "validate", "finite-difference self-test of gradients and curvature");
  validate->add_option("--seed", seed, "instance seed");
  validate->add_option("--points", points, "evaluation points");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(config_path, out_path);
    if (solve->parsed())
      return cmd_solve(scenario_path, config_path, scheme_override, out_path,
                       trace_path);
    if (check->parsed())
      return cmd_check(scenario_path, config_path, mode_name, samples, out_path);
    if (compare->parsed())
      return cmd_compare(scenario_path, config_path, out_path);
    if (swf->parsed())
      return cmd_sweep(SweepVariable::frequent_users, config_path, out_path,
                       plot_path, jobs);
    if (swe->parsed())
      return cmd_sweep(SweepVariable::eta, config_path, out_path, plot_path, jobs);
    if (validate->parsed()) return cmd_validate(seed, points);
  } catch (const scnet::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const scnet::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const scnet::NonConvergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNoConverge;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitOk;
}
