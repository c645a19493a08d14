#include "dtac/error.hpp"
#include "dtac/metrics.hpp"
#include "dtac/oracle.hpp"
#include "dtac/scenario.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace dtac;

namespace {

Instance load(const std::string& name) { return instantiate(load_scenario(test::scenario_path(name))); }

RunRecord run_instance(const Instance& inst) {
  return run(inst.problem, inst.network, inst.delays, inst.config);
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("agreeing duals have zero consensus error") {
    RunRecord r;
    r.n = 3;
    r.weights = {1, 1, 1};
    r.demands = {1, 1, 1};
    r.snapshots.push_back({0, {1, 2, 0}, {0.5, -0.5, 0.0}, {2.0, 2.0, 2.0}});
    r.d_bar = {0.0};
    const auto e = error_series(r);
    CHECK(e.e_x[0] == 0.0);
    CHECK(e.e_d[0] == doctest::Approx(std::sqrt(0.5)));
    CHECK(e.d_bar_abs[0] == 0.0);
  }

  TEST_CASE("delayed run drives the deviation to zero") {
    const auto inst = load("fig1_tau10");
    const auto rec = run_instance(inst);
    const auto e = error_series(rec);
    CHECK(e.d_bar_tail.last < 1e-3);
    CHECK(e.d_bar_tail.tail_max < 1e-3);
    CHECK(e.e_x_tail.last < 1e-2);
  }

  TEST_CASE("battery deviation is recomputed from the allocation") {
    const auto inst = load("fig2_battery");
    RunConfig c = inst.config;
    c.max_iters = 0;
    const auto rec = run(inst.problem, inst.network, inst.delays, c);
    double dev = 0.0;
    for (int i = 0; i < rec.n; ++i) {
      dev += inst.problem.agents[i].weight * rec.snapshots[0].y[i] - inst.problem.agents[i].demand;
    }
    CHECK(error_series(rec).d_bar_abs[0] == doctest::Approx(std::abs(dev / rec.n)).epsilon(1e-14));
  }

  TEST_CASE("Lyapunov function vanishes at the optimum") {
    // beta_i = -2 gamma_i y_i* puts the unconstrained optimum at y* with x* = 0.
    Problem p;
    const std::vector<double> ystar = {10, 20, 30, 40};
    for (int i = 0; i < 4; ++i) {
      AgentSpec a;
      const double g = 0.1 * (i + 1);
      a.cost = Quadratic{g, -2 * g * ystar[i], 0.0};
      a.demand = ystar[i];
      a.box = {0.0, 100.0};
      p.agents.push_back(a);
    }
    const auto sol = solve_dual_bisection(p);
    CHECK(std::abs(sol.x_star) <= 1e-9);
    const Network net = test::half_quarter_cycle(4);
    RunConfig c;
    c.max_iters = 50;
    c.y0 = ystar;
    const auto rec = run(p, net, assign_delays(net, 2, delay_mode::UniformRandom{}, 1), c);
    const auto l = lyapunov_series(rec, sol, 0, 0);
    for (double v : l.value) CHECK(v <= 1e-8);
  }

  TEST_CASE("Lyapunov function on the six-generator runs") {
    for (const char* name : {"fig1_tau0", "fig1_tau3", "fig1_tau10"}) {
      CAPTURE(name);
      const auto inst = load(name);
      const auto rec = run_instance(inst);
      const auto l = lyapunov_series(rec, solve_dual_bisection(inst.problem));
      CHECK(l.value.back() < l.value.front());
      CHECK(l.bounded);
    }
  }

  TEST_CASE("Lyapunov function stays bounded on random delayed networks") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      CAPTURE(seed);
      auto scn = load_scenario(test::scenario_path("random8_hetero"));
      scn.seed = seed;
      scn.run.max_iters = 3000;
      const auto inst = instantiate(scn);
      const auto rec = run_instance(inst);
      const auto l = lyapunov_series(rec, solve_dual_bisection(inst.problem));
      CHECK(l.bounded);
    }
  }

  TEST_CASE("Lyapunov series needs an oracle") {
    RunRecord r;
    CHECK_THROWS_WITH_AS(lyapunov_series(r, std::nullopt), doctest::Contains("oracle"), Error);
  }

  TEST_CASE("augmented Lyapunov window sums consecutive values") {
    const auto inst = load("fig1_tau3");
    RunConfig c = inst.config;
    c.max_iters = 200;
    const auto rec = run(inst.problem, inst.network, inst.delays, c);
    const auto sol = solve_dual_bisection(inst.problem);
    const auto plain = lyapunov_series(rec, sol, 0, 0);
    const auto aug = lyapunov_series(rec, sol, 3, 0);
    for (std::size_t k = 3; k < plain.value.size(); ++k) {
      const double expect = plain.value[k] + plain.value[k - 1] + plain.value[k - 2] + plain.value[k - 3];
      CHECK(aug.value[k] == doctest::Approx(expect).epsilon(1e-12));
    }
    c.record_every = 10;
    const auto sparse = run(inst.problem, inst.network, inst.delays, c);
    CHECK_THROWS_AS(lyapunov_series(sparse, sol, 3, 0), Error);
  }

  TEST_CASE("optimality gap is zero at the oracle solution") {
    const auto inst = load("fig1_tau3");
    const auto sol = solve_dual_bisection(inst.problem);
    Snapshot s;
    s.y = sol.y_star;
    s.d.assign(sol.y_star.size(), 0.0);
    s.x.assign(sol.y_star.size(), sol.x_star);
    const auto g = optimality_gap(inst.problem, s, sol);
    CHECK(g.primal == 0.0);
    CHECK(g.dual == 0.0);
    CHECK(g.objective == 0.0);
  }

  TEST_CASE("delayed runs reach the oracle") {
    const auto inst = load("fig1_tau3");
    const auto sol = solve_dual_bisection(inst.problem);
    const auto g = optimality_gap(inst.problem, run_instance(inst), sol);
    CHECK(g.primal < 1e-2);
    CHECK(g.dual < 1e-2);

    const auto le = load("fig3_logexp");
    const auto lsol = solve_dual_bisection(le.problem);
    const auto lg = optimality_gap(le.problem, run_instance(le), lsol);
    CHECK(lg.objective / std::abs(lsol.objective) < 1e-3);
  }

  TEST_CASE("the fixed point does not depend on the penalty") {
    const auto inst = load("fig1_tau3");
    const auto sol = solve_dual_bisection(inst.problem);
    std::vector<std::vector<double>> finals;
    for (double c : {1.0, 5.0, 20.0}) {
      RunConfig cfg = inst.config;
      cfg.c = c;
      cfg.max_iters = c > 10 ? 100000 : 10000;
      cfg.record_every = 1000;
      const auto rec = run(inst.problem, inst.network, inst.delays, cfg);
      CHECK(optimality_gap(inst.problem, rec, sol).primal < 1e-4);
      finals.push_back(rec.last().y);
    }
    CHECK(test::max_abs_diff(finals[0], finals[1]) < 1e-4);
    CHECK(test::max_abs_diff(finals[0], finals[2]) < 1e-4);
  }
}
