#include "scnet/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "scnet/rng.hpp"

namespace scnet {

ExtremalConstants extremal_constants(const Scenario& sc) {
  ExtremalConstants c;
  c.sigma2_min = std::numeric_limits<double>::infinity();
  c.sigma2_max = 0.0;
  for (int j = 0; j < sc.num_ues; ++j) {
    for (int k = 0; k < sc.num_subcarriers; ++k) {
      c.sigma2_min = std::min(c.sigma2_min, sc.noise(j, k));
      c.sigma2_max = std::max(c.sigma2_max, sc.noise(j, k));
    }
  }
  c.beta_min = std::numeric_limits<double>::infinity();
  c.beta_max = 0.0;
  for (int i = 0; i < sc.num_scbs; ++i) {
    for (int j = 0; j < sc.num_ues; ++j) {
      for (int k = 0; k < sc.num_subcarriers; ++k) {
        const double b = effective_gain(sc, i, j, k);
        c.beta_min = std::min(c.beta_min, b);
        c.beta_max = std::max(c.beta_max, b);
      }
    }
  }
  for (int i = 0; i < sc.num_scbs; ++i) {
    std::map<int, int> per_user;
    for (const SlotAssignment& a : sc.served[i].slots)
      c.k_max = std::max(c.k_max, ++per_user[a.user]);
  }
  return c;
}

XiBounds xi_bounds(const ExtremalConstants& c, int num_scbs) {
  XiBounds xi;
  if (num_scbs < 2) {
    xi.vacuous = true;
    xi.xi1 = xi.xi2 = std::numeric_limits<double>::infinity();
    return xi;
  }
  xi.xi1 = c.beta_min * c.sigma2_min * c.sigma2_min * c.sigma2_min /
           ((num_scbs - 1) * c.k_max * c.beta_max * c.beta_max * c.beta_max);
  xi.xi2 = (1.0 - c.sigma2_max) / (num_scbs * c.beta_max);
  return xi;
}

ConditionReport check_pmax_condition(const Scenario& sc) {
  ConditionReport r;
  r.constants = extremal_constants(sc);
  r.xi = xi_bounds(r.constants, sc.num_scbs);
  r.p_max = sc.p_max;
  r.p_max_bound = std::min(r.xi.xi1, r.xi.xi2);
  r.sigma_precondition = r.constants.sigma2_max < 1.0;
  r.condition_holds =
      r.sigma_precondition && (r.xi.vacuous || sc.p_max < r.p_max_bound);
  r.negdef_max_eigenvalue = std::numeric_limits<double>::quiet_NaN();
  return r;
}

double suggest_pmax(const Scenario& sc, double safety_fraction) {
  if (!(safety_fraction > 0.0 && safety_fraction < 1.0))
    throw std::invalid_argument(
        "safety_fraction must lie strictly inside (0, 1)");
  const ExtremalConstants c = extremal_constants(sc);
  if (!(c.sigma2_max < 1.0))
    throw std::domain_error(
        "suggest_pmax: sigma2_max >= 1, the bound is vacuous; normalize the "
        "noise scale first");
  const XiBounds xi = xi_bounds(c, sc.num_scbs);
  if (xi.vacuous)
    throw std::invalid_argument(
        "suggest_pmax: single player, any budget admits a unique optimum");
  return safety_fraction * std::min(xi.xi1, xi.xi2);
}

Eigen::MatrixXd jacobian_G(const Scenario& sc, const GameSpec& spec,
                           const PowerProfile& profile, GradMode mode) {
  spec.validate(sc.num_scbs);
  if (spec.scheme == Scheme::proportional_fair)
    throw std::invalid_argument(
        "jacobian_G: proportional-fair utilities are outside the uniqueness "
        "machinery");
  const int n = sc.total_slots();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < sc.num_scbs; ++i) {
    for (int s = 0; s < sc.num_slots(i); ++s) {
      const SlotAssignment& a = sc.served[i].slots[s];
      const int row = sc.slot_offset(i) + s;
      const double beta = sc.slot_gain(i, s);
      const double istar = interference(sc, profile, i, a.user, a.subcarrier);
      const double noise = sc.noise(a.user, a.subcarrier);
      const double denom = istar + beta * profile.u[i][s] + noise;
      const double d2 = denom * denom;
      G(row, row) = mode == GradMode::analytic
                        ? -beta * beta / d2
                        : -beta * beta * (istar + noise) / d2;
      for (const Scenario::Transmitter& t : sc.transmitters(a.subcarrier)) {
        if (t.scbs == i) continue;
        const int col = sc.slot_offset(t.scbs) + t.slot;
        const double beta_other = sc.slot_gain(t.scbs, t.slot);
        G(row, col) = mode == GradMode::analytic
                          ? -beta * beta_other / d2
                          : beta_other * beta * beta * profile.u[i][s] / d2;
      }
    }
    // Smoothed-mismatch curvature; zero for the exact |u - ubar| cost.
    if (spec.scheme == Scheme::context_aware && spec.cost_smoothing > 0.0) {
      const double eta = spec.eta(i);
      const double delta2 = spec.cost_smoothing * spec.cost_smoothing;
      const ServedSet& served = sc.served[i];
      for (std::size_t t = 0; t < served.frequent.size(); ++t) {
        const int j = served.frequent[t];
        const double d = user_power(sc, profile, i, j) - served.qos_target[t];
        const double curv = eta * delta2 / std::pow(d * d + delta2, 1.5);
        for (int s1 : sc.slots_of_user(i, j))
          for (int s2 : sc.slots_of_user(i, j))
            G(sc.slot_offset(i) + s1, sc.slot_offset(i) + s2) -= curv;
      }
    }
  }
  return G;
}

NegdefResult negdef_check(const Eigen::MatrixXd& G) {
  if (G.rows() != G.cols())
    throw std::invalid_argument("negdef_check: matrix must be square");
  const Eigen::MatrixXd S = G + G.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S,
                                                        Eigen::EigenvaluesOnly);
  NegdefResult r;
  r.max_eigenvalue = solver.eigenvalues().maxCoeff();
  r.negative_definite = r.max_eigenvalue < -1e-12;
  return r;
}

Eigen::VectorXd diag_dominance_margin(const Scenario& sc, const GameSpec& spec,
                                      const PowerProfile& profile,
                                      GradMode mode) {
  const Eigen::MatrixXd G = jacobian_G(sc, spec, profile, mode);
  const int n = static_cast<int>(G.rows());
  Eigen::VectorXd margin(n);
  for (int r = 0; r < n; ++r) {
    double off = 0.0;
    for (int c = 0; c < n; ++c)
      if (c != r) off += std::abs(G(r, c) + G(c, r));
    margin[r] = 2.0 * std::abs(G(r, r)) - off;
  }
  return margin;
}

ConditionReport certify_negdef(const Scenario& sc, const GameSpec& spec,
                               GradMode mode, int samples, std::uint64_t seed) {
  ConditionReport report = check_pmax_condition(sc);
  report.jacobian_mode = mode;
  if (samples < 1) return report;
  report.negdef_samples = samples;
  report.negdef_max_eigenvalue = -std::numeric_limits<double>::infinity();
  SplitMix64 rng(derive_seed(seed ^ sc.rng_seed, 0x9d, samples));
  for (int s = 0; s < samples; ++s) {
    PowerProfile p;
    p.u.reserve(sc.num_scbs);
    for (int i = 0; i < sc.num_scbs; ++i)
      p.u.push_back(sample_feasible(sc.num_slots(i), sc.p_max, rng));
    const NegdefResult r = negdef_check(jacobian_G(sc, spec, p, mode));
    report.negdef_max_eigenvalue =
        std::max(report.negdef_max_eigenvalue, r.max_eigenvalue);
    if (!r.negative_definite) ++report.negdef_failures;
  }
  return report;
}

std::string condition_table(const ConditionReport& r) {
  std::ostringstream os;
  auto row = [&os](const std::string& name, const std::string& value) {
    os << "  " << name;
    for (std::size_t i = name.size(); i < 24; ++i) os << ' ';
    os << value << "\n";
  };
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::string(buf);
  };
  os << "uniqueness condition report\n";
  row("sigma2_min", num(r.constants.sigma2_min));
  row("sigma2_max", num(r.constants.sigma2_max));
  row("beta_min", num(r.constants.beta_min));
  row("beta_max", num(r.constants.beta_max));
  row("k_max", std::to_string(r.constants.k_max));
  if (r.xi.vacuous) {
    row("xi1 / xi2", "vacuous (single player)");
  } else {
    row("xi1", num(r.xi.xi1));
    row("xi2", num(r.xi.xi2));
  }
  row("p_max_bound", num(r.p_max_bound));
  row("p_max", num(r.p_max));
  row("sigma precondition", r.sigma_precondition ? "holds (sigma2_max < 1)"
                                                 : "FAILS (sigma2_max >= 1)");
  row("condition", r.condition_holds ? "holds" : "does not hold");
  if (r.negdef_samples > 0) {
    row("jacobian mode", r.jacobian_mode == GradMode::paper_literal
                             ? "paper-literal"
                             : "analytic");
    row("negdef samples", std::to_string(r.negdef_samples));
    row("negdef failures", std::to_string(r.negdef_failures));
    row("max eigenvalue", num(r.negdef_max_eigenvalue));
  }
  return os.str();
}

std::string condition_to_json(const ConditionReport& r) {
  nlohmann::json j;
  j["sigma2_min"] = r.constants.sigma2_min;
  j["sigma2_max"] = r.constants.sigma2_max;
  j["beta_min"] = r.constants.beta_min;
  j["beta_max"] = r.constants.beta_max;
  j["k_max"] = r.constants.k_max;
  j["vacuous"] = r.xi.vacuous;
  if (!r.xi.vacuous) {
    j["xi1"] = r.xi.xi1;
    j["xi2"] = r.xi.xi2;
    j["p_max_bound"] = r.p_max_bound;
  }
  j["p_max"] = r.p_max;
  j["sigma_precondition"] = r.sigma_precondition;
  j["condition_holds"] = r.condition_holds;
  j["jacobian_mode"] =
      r.jacobian_mode == GradMode::paper_literal ? "paper-literal" : "analytic";
  j["negdef_samples"] = r.negdef_samples;
  j["negdef_failures"] = r.negdef_failures;
  if (r.negdef_samples > 0)
    j["negdef_max_eigenvalue"] = r.negdef_max_eigenvalue;
  return j.dump(2);
}

}  // namespace scnet
