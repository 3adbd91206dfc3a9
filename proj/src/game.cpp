#include "scnet/game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace scnet {

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::context_aware: return "context-aware";
    case Scheme::sum_rate: return "sum-rate";
    case Scheme::proportional_fair: return "proportional-fair";
  }
  return "?";
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "context-aware") return Scheme::context_aware;
  if (name == "sum-rate") return Scheme::sum_rate;
  if (name == "proportional-fair") return Scheme::proportional_fair;
  throw std::invalid_argument("unknown scheme: " + name);
}

void GameSpec::validate(int num_scbs) const {
  if (eta_per_scbs.size() != 1 &&
      eta_per_scbs.size() != static_cast<std::size_t>(num_scbs))
    throw std::invalid_argument("eta must have 1 or num_scbs entries");
  for (double e : eta_per_scbs)
    if (!(e >= 0.0) || !std::isfinite(e))
      throw std::invalid_argument("eta must be finite and >= 0");
  if (!(pf_rate_floor > 0.0))
    throw std::invalid_argument("pf_rate_floor must be > 0");
  if (!(cost_smoothing >= 0.0))
    throw std::invalid_argument("cost_smoothing must be >= 0");
}

double cost(double u, double ubar) { return std::abs(u - ubar); }

double cost_smoothed(double u, double ubar, double delta) {
  const double d = u - ubar;
  return std::sqrt(d * d + delta * delta);
}

namespace {

double mismatch_cost(const GameSpec& spec, double u, double ubar) {
  return spec.cost_smoothing > 0.0 ? cost_smoothed(u, ubar, spec.cost_smoothing)
                                   : cost(u, ubar);
}

// d/du of the cost in force; sign(0) = 0 at the exact-cost kink.
double mismatch_slope(const GameSpec& spec, double u, double ubar) {
  const double d = u - ubar;
  if (spec.cost_smoothing > 0.0)
    return d / std::sqrt(d * d + spec.cost_smoothing * spec.cost_smoothing);
  return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
}

}  // namespace

double utility(const Scenario& sc, const GameSpec& spec,
               const PowerProfile& profile, int i) {
  const ServedSet& served = sc.served[i];
  double value = 0.0;
  switch (spec.scheme) {
    case Scheme::context_aware: {
      for (int j : served.frequent) value += rate(sc, profile, i, j);
      for (int j : served.occasional) value += rate(sc, profile, i, j);
      const double eta = spec.eta(i);
      for (std::size_t t = 0; t < served.frequent.size(); ++t) {
        const int j = served.frequent[t];
        value -= eta * mismatch_cost(spec, user_power(sc, profile, i, j),
                                     served.qos_target[t]);
      }
      break;
    }
    case Scheme::sum_rate: {
      for (int j : served.frequent) value += rate(sc, profile, i, j);
      for (int j : served.occasional) value += rate(sc, profile, i, j);
      break;
    }
    case Scheme::proportional_fair: {
      for (int j : served.frequent)
        value += std::log(std::max(rate(sc, profile, i, j), spec.pf_rate_floor));
      for (int j : served.occasional)
        value += std::log(std::max(rate(sc, profile, i, j), spec.pf_rate_floor));
      break;
    }
  }
  return value;
}

Eigen::VectorXd grad_rates(const Scenario& sc, const PowerProfile& profile,
                           int i, GradMode mode) {
  const int n = sc.num_slots(i);
  Eigen::VectorXd g(n);
  for (int s = 0; s < n; ++s) {
    const SlotAssignment& a = sc.served[i].slots[s];
    const double beta = sc.slot_gain(i, s);
    const double istar = interference(sc, profile, i, a.user, a.subcarrier);
    const double noise = sc.noise(a.user, a.subcarrier);
    const double denom = istar + beta * profile.u[i][s] + noise;
    g[s] = mode == GradMode::analytic ? beta / denom
                                      : beta * (istar + noise) / denom;
  }
  return g;
}

Eigen::VectorXd grad_utility(const Scenario& sc, const GameSpec& spec,
                             const PowerProfile& profile, int i,
                             GradMode mode) {
  Eigen::VectorXd g = grad_rates(sc, profile, i, mode);
  const ServedSet& served = sc.served[i];
  switch (spec.scheme) {
    case Scheme::context_aware: {
      const double eta = spec.eta(i);
      for (std::size_t t = 0; t < served.frequent.size(); ++t) {
        const int j = served.frequent[t];
        const double slope = eta * mismatch_slope(spec, user_power(sc, profile, i, j),
                                                  served.qos_target[t]);
        for (int s : sc.slots_of_user(i, j)) g[s] -= slope;
      }
      break;
    }
    case Scheme::sum_rate:
      break;
    case Scheme::proportional_fair: {
      for (int j : served.frequent)
        for (int s : sc.slots_of_user(i, j))
          g[s] /= std::max(rate(sc, profile, i, j), spec.pf_rate_floor);
      for (int j : served.occasional)
        for (int s : sc.slots_of_user(i, j))
          g[s] /= std::max(rate(sc, profile, i, j), spec.pf_rate_floor);
      break;
    }
  }
  return g;
}

Eigen::VectorXd project_feasible(const Eigen::VectorXd& v, double p_max) {
  if (!(p_max > 0.0)) throw std::invalid_argument("p_max must be > 0");
  Eigen::VectorXd clipped = v.cwiseMax(0.0);
  if (clipped.sum() <= p_max) return clipped;

  // Budget face active: sorted-threshold projection onto the scaled simplex
  // {u >= 0, 1'u = p_max}.
  const int n = static_cast<int>(v.size());
  std::vector<double> w(v.data(), v.data() + n);
  std::sort(w.begin(), w.end(), std::greater<double>());
  double cum = 0.0;
  double theta = 0.0;
  for (int j = 0; j < n; ++j) {
    cum += w[j];
    const double cand = (cum - p_max) / (j + 1);
    if (w[j] - cand > 0.0)
      theta = cand;
    else
      break;
  }
  return (v.array() - theta).cwiseMax(0.0);
}

namespace {

// Scalar piece of the prox: argmin over v >= 0 of
//   0.5 (v - t)^2 + weight |v - target|   (the l1 term only when targeted).
double scalar_prox(double t, double weight, bool targeted, double target) {
  if (!targeted) return std::max(0.0, t);
  double s;
  if (t > target + weight)
    s = t - weight;
  else if (t < target - weight)
    s = t + weight;
  else
    s = target;
  return std::max(0.0, s);
}

}  // namespace

Eigen::VectorXd prox_feasible_l1(const Eigen::VectorXd& z, double p_max,
                                 double weight, const Eigen::VectorXd& target,
                                 const std::vector<std::uint8_t>& has_target) {
  if (weight == 0.0) return project_feasible(z, p_max);
  if (!(p_max > 0.0)) throw std::invalid_argument("p_max must be > 0");
  const int n = static_cast<int>(z.size());

  auto eval = [&](double lambda, Eigen::VectorXd& out) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      out[j] = scalar_prox(z[j] - lambda, weight, has_target[j] != 0,
                           target[j]);
      sum += out[j];
    }
    return sum;
  };

  Eigen::VectorXd v(n);
  if (eval(0.0, v) <= p_max) return v;

  // Sum constraint active.  Each v_j(lambda) is piecewise linear and
  // nonincreasing with slope 0 or -1, so the budget multiplier can be pinned
  // exactly by scanning the slope breakpoints.
  std::vector<double> knots;
  knots.reserve(3 * n);
  for (int j = 0; j < n; ++j) {
    if (has_target[j] != 0) {
      knots.push_back(z[j] - target[j] - weight);  // plateau entry
      knots.push_back(z[j] - target[j] + weight);  // plateau exit
      knots.push_back(z[j] + weight);              // hits zero
    } else {
      knots.push_back(z[j]);  // hits zero
    }
  }
  knots.push_back(0.0);
  std::sort(knots.begin(), knots.end());

  // Find the knot interval where sum(v(lambda)) crosses p_max; the sum is
  // linear between knots, so interpolate exactly.
  double lo = 0.0;
  double sum_lo = eval(0.0, v);
  for (double k : knots) {
    if (k <= 0.0) continue;
    const double sum_k = eval(k, v);
    if (sum_k > p_max) {
      lo = k;
      sum_lo = sum_k;
      continue;
    }
    // active slope on (lo, k): count coordinates still decreasing
    double slope = 0.0;
    const double mid = 0.5 * (lo + k);
    for (int j = 0; j < n; ++j) {
      const double t = z[j] - mid;
      const bool decreasing =
          has_target[j] != 0
              ? (t > target[j] + weight ? t - weight > 0.0
                                        : (t < target[j] - weight && t + weight > 0.0))
              : t > 0.0;
      if (decreasing) slope += 1.0;
    }
    const double lambda =
        slope > 0.0 ? lo + (sum_lo - p_max) / slope : k;
    eval(lambda, v);
    return v;
  }
  eval(knots.back(), v);  // all coordinates at zero
  return v;
}

}  // namespace scnet
