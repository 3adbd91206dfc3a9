#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "scnet/experiments.hpp"
#include "scnet/game.hpp"
#include "scnet/rng.hpp"
#include "scnet/scenario.hpp"

namespace scnet::testing {

// Single SCBS, single UE on one subcarrier.  d = 1 so beta = h^2.
inline Scenario single_link(double h, double sigma2, double p_max,
                            bool frequent, double qos) {
  Scenario sc;
  sc.num_scbs = 1;
  sc.num_ues = 1;
  sc.num_subcarriers = 1;
  sc.positions_scbs = {{0.0, 0.0}};
  sc.positions_ues = {{1.0, 0.0}};
  sc.path_loss_exponent = 3.0;
  sc.channel_gain = {h};
  sc.noise_var = {sigma2};
  ServedSet s;
  if (frequent) {
    s.frequent = {0};
    s.qos_target = {qos};
  } else {
    s.occasional = {0};
  }
  s.slots = {{0, 0}};
  sc.served.push_back(s);
  sc.p_max = p_max;
  sc.seal();
  return sc;
}

// Two SCBSs interfering at one shared occasional UE; d = 1 for both, so
// beta = h^2 on each link.
inline Scenario shared_user(double h1, double h2, double sigma2, double p_max) {
  Scenario sc;
  sc.num_scbs = 2;
  sc.num_ues = 1;
  sc.num_subcarriers = 1;
  sc.positions_scbs = {{-1.0, 0.0}, {1.0, 0.0}};
  sc.positions_ues = {{0.0, 0.0}};
  sc.path_loss_exponent = 3.0;
  sc.channel_gain = {h1, h2};
  sc.noise_var = {sigma2};
  for (int i = 0; i < 2; ++i) {
    ServedSet s;
    s.occasional = {0};
    s.slots = {{0, 0}};
    sc.served.push_back(s);
  }
  sc.p_max = p_max;
  sc.seal();
  return sc;
}

// Random O(1)-scale instance: small square, unit minimum separation, fixed
// budget, every SCBS serving every UE on shared subcarriers.
inline Scenario small_instance(int scbs, int frequent, int occasional,
                               std::uint64_t seed, double p_max = 0.6) {
  ExperimentPlan plan;
  plan.area_side = 4.0;
  plan.min_separation = 1.0;
  plan.num_scbs = scbs;
  plan.n_frequent = frequent;
  plan.n_occasional = occasional;
  plan.p_max_policy = PmaxPolicy::fixed;
  plan.p_max_value = p_max;
  plan.base_seed = seed;
  return gen_scenario(plan, frequent, 0);
}

inline PowerProfile random_feasible_profile(const Scenario& sc, SplitMix64& rng) {
  PowerProfile p;
  p.u.reserve(sc.num_scbs);
  for (int i = 0; i < sc.num_scbs; ++i)
    p.u.push_back(sample_feasible(sc.num_slots(i), sc.p_max, rng));
  return p;
}

inline bool near_cost_kink(const Scenario& sc, const PowerProfile& p,
                           double margin) {
  for (int i = 0; i < sc.num_scbs; ++i)
    for (int j : sc.served[i].frequent)
      if (std::abs(user_power(sc, p, i, j) - sc.qos(i, j)) < margin)
        return true;
  return false;
}

// Independent finite-difference oracles over the utility (never the
// library's gradient code).
inline double fd_grad(const Scenario& sc, const GameSpec& spec,
                      const PowerProfile& base, int i, int s, double h) {
  PowerProfile p = base;
  p.u[i][s] = base.u[i][s] + h;
  const double up = utility(sc, spec, p, i);
  p.u[i][s] = base.u[i][s] - h;
  const double dn = utility(sc, spec, p, i);
  return (up - dn) / (2.0 * h);
}

inline double fd_hess(const Scenario& sc, const GameSpec& spec,
                      const PowerProfile& base, int i, int pi, int ps, int qi,
                      int qs, double h) {
  PowerProfile p = base;
  if (pi == qi && ps == qs) {
    const double mid = utility(sc, spec, p, i);
    p.u[pi][ps] = base.u[pi][ps] + h;
    const double up = utility(sc, spec, p, i);
    p.u[pi][ps] = base.u[pi][ps] - h;
    const double dn = utility(sc, spec, p, i);
    return (up - 2.0 * mid + dn) / (h * h);
  }
  auto at = [&](double a, double b) {
    p.u[pi][ps] = base.u[pi][ps] + a;
    p.u[qi][qs] = base.u[qi][qs] + b;
    const double v = utility(sc, spec, p, i);
    p.u[pi][ps] = base.u[pi][ps];
    p.u[qi][qs] = base.u[qi][qs];
    return v;
  };
  return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
}

// Exact projection oracle for dims <= 3: enumerate every active set (zeroed
// coordinate subset x budget face on/off) and keep the feasible candidate
// closest to v.
inline Eigen::VectorXd projection_oracle(const Eigen::VectorXd& v, double p_max) {
  const int d = static_cast<int>(v.size());
  Eigen::VectorXd best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < (1 << d); ++mask) {
    for (int face = 0; face < 2; ++face) {
      Eigen::VectorXd u = Eigen::VectorXd::Zero(d);
      int free_count = 0;
      double free_sum = 0.0;
      for (int i = 0; i < d; ++i)
        if (!(mask & (1 << i))) {
          ++free_count;
          free_sum += v[i];
        }
      if (face == 1 && free_count == 0) continue;
      const double theta = face == 1 ? (free_sum - p_max) / free_count : 0.0;
      for (int i = 0; i < d; ++i)
        if (!(mask & (1 << i))) u[i] = v[i] - theta;
      if ((u.array() < 0.0).any()) continue;
      if (u.sum() > p_max * (1.0 + 1e-13) + 1e-300) continue;
      const double obj = (u - v).squaredNorm();
      if (obj < best_obj) {
        best_obj = obj;
        best = u;
      }
    }
  }
  return best;
}

}  // namespace scnet::testing
