#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "scnet/baselines.hpp"

using namespace scnet;
using namespace scnet::testing;

namespace {

// One SCBS, two users at the same distance with unit gains: fully symmetric.
Scenario symmetric_pair(double p_max) {
  Scenario sc;
  sc.num_scbs = 1;
  sc.num_ues = 2;
  sc.num_subcarriers = 2;
  sc.positions_scbs = {{0.0, 0.0}};
  sc.positions_ues = {{1.0, 0.0}, {-1.0, 0.0}};
  sc.channel_gain.assign(4, 1.0);
  sc.noise_var.assign(4, 0.5);
  ServedSet s;
  s.occasional = {0, 1};
  s.slots = {{0, 0}, {1, 1}};
  sc.served.push_back(s);
  sc.p_max = p_max;
  sc.seal();
  return sc;
}

}  // namespace

TEST_CASE("sum-rate baseline") {
  SUBCASE("single user takes the full budget") {
    Scenario sc = single_link(1.0, 1.0, 0.8, false, 0.0);
    const BaselineResult r =
        solve_sumrate(sc, GameSpec::context_aware(2.0), {});
    REQUIRE(r.report.converged);
    CHECK(r.report.profile.u[0][0] == doctest::Approx(0.8).epsilon(1e-10));
  }
  SUBCASE("comparison utility never beats own sum-rate under mismatch") {
    Scenario sc = small_instance(2, 2, 1, 61);
    const GameSpec eval = GameSpec::context_aware(2.0);
    const BaselineResult r = solve_sumrate(sc, eval, {});
    REQUIRE(r.report.converged);
    for (int i = 0; i < sc.num_scbs; ++i)
      CHECK(r.comparison_utility[i] <= r.report.utilities[i] + 1e-12);
  }
  SUBCASE("eta zero makes context-aware and sum-rate the same game") {
    Scenario sc = small_instance(3, 2, 2, 62);
    const GameSpec eval = GameSpec::context_aware(0.0);
    const BaselineResult ca =
        solve_with_scheme(sc, Scheme::context_aware, eval, {});
    const BaselineResult sr = solve_sumrate(sc, eval, {});
    REQUIRE(ca.report.converged);
    REQUIRE(sr.report.converged);
    CHECK(ca.report.profile.sup_distance(sr.report.profile) == 0.0);
  }
}

TEST_CASE("proportional fair baseline") {
  SUBCASE("symmetric users split the budget evenly") {
    Scenario sc = symmetric_pair(0.6);
    const BaselineResult r = solve_pf(sc, GameSpec::context_aware(2.0), {});
    REQUIRE(r.report.converged);
    CHECK(r.report.profile.u[0][0] == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(r.report.profile.u[0][1] == doctest::Approx(0.3).epsilon(1e-6));
  }
  SUBCASE("single user still takes the full budget") {
    Scenario sc = single_link(1.0, 1.0, 0.8, false, 0.0);
    const BaselineResult r = solve_pf(sc, GameSpec::context_aware(2.0), {});
    REQUIRE(r.report.converged);
    CHECK(r.report.profile.u[0][0] == doctest::Approx(0.8).epsilon(1e-6));
  }
  SUBCASE("no served user is starved") {
    for (int seed = 0; seed < 10; ++seed) {
      Scenario sc = small_instance(2, 1, 2, 200 + seed);
      const BaselineResult r = solve_pf(sc, GameSpec::context_aware(2.0), {});
      if (!r.report.converged) continue;
      for (int i = 0; i < sc.num_scbs; ++i)
        for (int j = 0; j < sc.num_ues; ++j)
          CHECK(rate(sc, r.report.profile, i, j) > 1e-12);
    }
  }
}

TEST_CASE("eval spec must be context-aware") {
  Scenario sc = single_link(1.0, 1.0, 0.8, false, 0.0);
  CHECK_THROWS_AS(solve_sumrate(sc, GameSpec::sum_rate(), {}),
                  std::invalid_argument);
}

TEST_CASE("sum-rate scheme wins its own metric against pf") {
  int wins = 0;
  int total = 0;
  for (int seed = 0; seed < 20; ++seed) {
    Scenario sc = small_instance(2, 2, 2, 300 + seed);
    const GameSpec eval = GameSpec::context_aware(2.0);
    const BaselineResult sr = solve_sumrate(sc, eval, {});
    const BaselineResult pf = solve_pf(sc, eval, {});
    if (!sr.report.converged || !pf.report.converged) continue;
    ++total;
    auto sumrate = [&](const PowerProfile& p) {
      double v = 0.0;
      for (int i = 0; i < sc.num_scbs; ++i)
        for (int j = 0; j < sc.num_ues; ++j) v += rate(sc, p, i, j);
      return v;
    };
    if (sumrate(sr.report.profile) >= sumrate(pf.report.profile) - 1e-12) ++wins;
  }
  REQUIRE(total >= 15);
  CHECK(static_cast<double>(wins) / total >= 0.95);
}

TEST_CASE("all schemes produce feasible profiles") {
  Scenario sc = small_instance(3, 2, 2, 400);
  const GameSpec eval = GameSpec::context_aware(2.0);
  for (Scheme scheme : kAllSchemes) {
    const BaselineResult r = solve_with_scheme(sc, scheme, eval, {});
    CHECK(r.report.profile.feasible(sc, 1e-12 * sc.p_max));
  }
}
