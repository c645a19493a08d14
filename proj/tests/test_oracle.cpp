#include "dtac/error.hpp"
#include "dtac/oracle.hpp"
#include "dtac/scenario.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numeric>

using namespace dtac;

namespace {

Problem two_symmetric(double gamma, double beta, double demand) {
  Problem p;
  for (int i = 0; i < 2; ++i) {
    AgentSpec a;
    a.cost = Quadratic{gamma, beta, 0.0};
    a.demand = demand;
    a.box = {-100.0, 100.0};
    p.agents.push_back(a);
  }
  return p;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("two symmetric agents split the demand") {
    const auto p = two_symmetric(0.5, 1.0, 3.0);
    const auto sol = solve_dual_bisection(p);
    CHECK(sol.y_star[0] == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(sol.y_star[1] == doctest::Approx(3.0).epsilon(1e-10));
    // phi'(y*) + x* = 0 gives x* = -2 gamma y* - beta.
    CHECK(sol.x_star == doctest::Approx(-4.0).epsilon(1e-10));
    CHECK(sol.unique_dual);
    // Grid over the feasible line y0 + y1 = 6.
    double best = INFINITY, best_y = 0.0;
    for (int k = 0; k <= 60000; ++k) {
      const double y = -20.0 + 50.0 * k / 60000;
      const double f = p.objective({y, 6.0 - y});
      if (f < best) {
        best = f;
        best_y = y;
      }
    }
    CHECK(std::abs(best_y - 3.0) <= 1e-3);
    CHECK(sol.objective <= best + 1e-12);
  }

  TEST_CASE("six-generator problem meets the demand exactly") {
    const auto inst = instantiate(load_scenario(test::scenario_path("fig1_tau3")));
    const auto sol = solve_dual_bisection(inst.problem);
    CHECK(std::abs(sum(sol.y_star) - 500.0) <= 1e-9);
    CHECK(sol.residual <= 1e-9);
    for (int i = 0; i < inst.problem.size(); ++i) {
      CHECK(inst.problem.agents[i].box.contains(sol.y_star[i]));
    }
  }

  TEST_CASE("battery problem balances generation against storage") {
    const auto inst = instantiate(load_scenario(test::scenario_path("fig2_battery")));
    const auto sol = solve_dual_bisection(inst.problem);
    double gen = 0.0, bat = 0.0;
    for (int i = 0; i < inst.problem.size(); ++i) {
      (inst.problem.agents[i].weight > 0 ? gen : bat) += sol.y_star[i];
    }
    CHECK(std::abs(gen - bat - 200.0) <= 1e-9);
  }

  TEST_CASE("infeasible demand is rejected") {
    Problem p = two_symmetric(1.0, 0.0, 0.0);
    p.agents[0].demand = 150.0;
    p.agents[1].demand = 150.0;
    CHECK_THROWS_WITH_AS(check_feasible(p), doctest::Contains("infeasible"), Error);
    CHECK_THROWS_AS(solve_dual_bisection(p), Error);
    // Demand on the boundary of the reachable range leaves no interior point.
    p.agents[0].demand = 100.0;
    p.agents[1].demand = 100.0;
    CHECK_THROWS_AS(check_feasible(p), Error);
  }

  TEST_CASE("flat dual region is flagged") {
    // Both agents sit at a box end for every x in [-10, 8]: g vanishes on an interval.
    Problem p;
    for (double beta : {10.0, -10.0}) {
      AgentSpec a;
      a.cost = Quadratic{1.0, beta, 0.0};
      a.box = {0.0, 1.0};
      p.agents.push_back(a);
    }
    p.agents[0].demand = 1.0;
    p.agents[1].demand = 0.0;
    const auto sol = solve_dual_bisection(p);
    CHECK_FALSE(sol.unique_dual);
    CHECK(sol.dual_low == doctest::Approx(-10.0).epsilon(1e-8));
    CHECK(sol.dual_high == doctest::Approx(8.0).epsilon(1e-8));
    CHECK(sol.x_star == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(sol.y_star[0] == 0.0);
    CHECK(sol.y_star[1] == 1.0);
  }

  TEST_CASE("KKT conditions on random instances") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> g(0.01, 1.0), b(-5, 5), lo(-10, 0), w(0.5, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 2 + trial % 9;
      Problem p;
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        AgentSpec a;
        a.cost = Quadratic{g(rng), b(rng), 0.0};
        const double l = lo(rng);
        a.box = {l, l + 20.0};
        a.weight = (i % 3 == 2) ? -w(rng) : w(rng);
        const double mid = a.box.lo + 0.5 * a.box.width();
        total += a.weight * mid;
        p.agents.push_back(a);
      }
      for (auto& a : p.agents) a.demand = total / n;
      const auto sol = solve_dual_bisection(p);
      CHECK(stationarity_violation(p, sol) <= 1e-7);
      CHECK(sol.residual <= 1e-9);
      // Strong duality.
      CHECK(std::abs(dual_function(p, sol.x_star) - sol.objective) <= 1e-7 * (1 + std::abs(sol.objective)));
      for (const auto& y : random_feasible_candidates(p, 100, trial)) {
        CHECK(p.objective(y) >= sol.objective - 1e-9);
      }
    }
  }

  TEST_CASE("projection lands on the constraint and inside the boxes") {
    std::mt19937_64 rng(5);
    const Problem p = test::random_quadratic_problem(7, 350.0, rng);
    std::uniform_real_distribution<double> u(-50, 150);
    for (int k = 0; k < 30; ++k) {
      std::vector<double> v(7);
      for (auto& x : v) x = u(rng);
      const auto y = project_feasible(p, v);
      CHECK(std::abs(p.coupling_residual(y)) <= 1e-8);
      for (int i = 0; i < 7; ++i) CHECK(p.agents[i].box.contains(y[i]));
    }
    // A feasible interior point is its own projection.
    const std::vector<double> inside(7, 50.0);
    CHECK(test::max_abs_diff(project_feasible(p, inside), inside) <= 1e-8);
  }

  TEST_CASE("logexp oracle satisfies stationarity") {
    const auto inst = instantiate(load_scenario(test::scenario_path("fig3_logexp")));
    const auto sol = solve_dual_bisection(inst.problem);
    CHECK(stationarity_violation(inst.problem, sol) <= 1e-7);
    CHECK(sol.residual <= 1e-9);
  }
}
