#include "dtac/error.hpp"
#include "dtac/scenario.hpp"
#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

using namespace dtac;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dtac_test_" + name);
  fs::remove_all(dir);
  return dir;
}

const char* kMinimal = R"(name = mini
seed = 3
[network]
topology = ring
n = 4
[delays]
mode = uniform
tau_bar = 2
[agents]
gamma = uniform 0.02 0.05
beta = 1
total_b = 100
lo = 0
hi = 100
[run]
max_iters = 50
y0 = 25
)";

std::string replace(std::string text, const std::string& from, const std::string& to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("shipped scenarios parse and instantiate") {
    for (const auto& name : test::shipped_scenarios()) {
      CAPTURE(name);
      const auto scn = load_scenario(test::scenario_path(name));
      CHECK(scn.name == name);
      const auto inst = instantiate(scn);
      CHECK(inst.problem.size() == inst.network.size());
      CHECK_NOTHROW(check_feasible(inst.problem));
    }
  }

  TEST_CASE("battery network uses the lazy uniform weights") {
    const auto inst = instantiate(load_scenario(test::scenario_path("fig2_battery")));
    for (int i = 0; i < 6; ++i) {
      CHECK(inst.network.weight(i, i) == doctest::Approx(0.6));
      CHECK(inst.network.weight(i, (i + 1) % 6) == doctest::Approx(0.1));
      CHECK(inst.network.weight(i, (i + 2) % 6) == doctest::Approx(0.1));
      CHECK(inst.network.weight(i, (i + 3) % 6) == 0.0);
    }
    CHECK(inst.problem.agents[4].weight == -1.0);
    CHECK(inst.problem.agents[3].weight == 1.0);
  }

  TEST_CASE("six-generator ring uses 0.5 / 0.25 weights") {
    const auto inst = instantiate(load_scenario(test::scenario_path("fig1_tau3")));
    CHECK(inst.network.weight(0, 0) == doctest::Approx(0.5));
    CHECK(inst.network.weight(0, 1) == doctest::Approx(0.25));
    CHECK(inst.delays.tau_bar == 3);
  }

  TEST_CASE("random draws are reproducible per seed") {
    const auto a = instantiate(parse_scenario(kMinimal));
    const auto b = instantiate(parse_scenario(kMinimal));
    const auto c = instantiate(parse_scenario(replace(kMinimal, "seed = 3", "seed = 4")));
    const auto gamma = [](const Instance& i, int k) {
      return std::get<Quadratic>(i.problem.agents[k].cost).gamma;
    };
    CHECK(gamma(a, 2) == gamma(b, 2));
    CHECK(gamma(a, 2) != gamma(c, 2));
    CHECK(a.delays.tau == b.delays.tau);
    CHECK(derive_seed(3, Stream::Agents) != derive_seed(3, Stream::Delays));
  }

  TEST_CASE("parse errors carry the line and field") {
    CHECK_THROWS_WITH_AS(parse_scenario("[network]\nn = six\n", "x.scn"),
                         doctest::Contains("x.scn:2: network.n:"), Error);
    CHECK_THROWS_WITH_AS(parse_scenario("[bogus]\n", "x.scn"), doctest::Contains("x.scn:1: bogus"),
                         Error);
    CHECK_THROWS_WITH_AS(parse_scenario("[run]\nc =\n", "x.scn"),
                         doctest::Contains("run.c: missing value"), Error);
    CHECK_THROWS_WITH_AS(parse_scenario("\n\n[agents]\ngamma = uniform 2 1\n", "x.scn"),
                         doctest::Contains("x.scn:4: agents.gamma"), Error);
    CHECK_THROWS_WITH_AS(parse_scenario("[agents]\nwat = 1\n"), doctest::Contains("unknown key"), Error);
    CHECK_THROWS_WITH_AS(parse_scenario("[delays]\nmode = sometimes\n"),
                         doctest::Contains("unknown delay mode"), Error);
    CHECK_THROWS_AS(load_scenario("/nonexistent/file.scn"), Error);
  }

  TEST_CASE("instantiation errors name the field") {
    CHECK_THROWS_WITH_AS(instantiate(parse_scenario(replace(kMinimal, "hi = 100\n", ""))),
                         doctest::Contains("agents[0].hi: missing"), Error);
    CHECK_THROWS_WITH_AS(instantiate(parse_scenario(replace(kMinimal, "lo = 0", "lo = uniform 0 200"))),
                         doctest::Contains("agents["), Error);
    CHECK_THROWS_WITH_AS(instantiate(parse_scenario(replace(kMinimal, "total_b = 100", "total_b = 1000"))),
                         doctest::Contains("infeasible"), Error);
    CHECK_THROWS_WITH_AS(instantiate(parse_scenario(replace(kMinimal, "y0 = 25", "y0 = 250"))),
                         doctest::Contains("run.y0[0]"), Error);
    CHECK_THROWS_WITH_AS(
        instantiate(parse_scenario(replace(kMinimal, "y0 = 25", "y0 = list 1 2 3"))),
        doctest::Contains("run.y0"), Error);
    CHECK_THROWS_WITH_AS(instantiate(parse_scenario(replace(kMinimal, "n = 4", "n = 0"))),
                         doctest::Contains("network.n"), Error);
    CHECK_THROWS_WITH_AS(instantiate(parse_scenario(replace(kMinimal, "max_iters = 50",
                                                            "max_iters = 50\nvariant = distributed"))),
                         doctest::Contains("run.variant"), Error);
    CHECK_THROWS_WITH_AS(instantiate(parse_scenario(std::string(kMinimal) + "[agent 3-7]\nbeta = 0\n")),
                         doctest::Contains("range exceeds"), Error);
    CHECK_THROWS_WITH_AS(
        instantiate(parse_scenario(replace(kMinimal, "mode = uniform\ntau_bar = 2",
                                           "mode = explicit\ntau_bar = 2\nlink = 0 2 1"))),
        doctest::Contains("delays:"), Error);
  }

  TEST_CASE("outputs are byte-identical across reruns") {
    auto scn = load_scenario(test::scenario_path("fig1_tau3"));
    scn.run.max_iters = 500;
    const auto a = scratch("rerun_a"), b = scratch("rerun_b");
    write_outputs(run_scenario(scn), a);
    write_outputs(run_scenario(scn), b);
    for (const char* f : {"trajectory.csv", "series.csv"}) {
      CAPTURE(f);
      const auto left = slurp(a / f);
      CHECK(!left.empty());
      CHECK(left == slurp(b / f));
    }
    const auto header = slurp(a / "trajectory.csv").substr(0, 16);
    CHECK(header == "iter,agent,y,d,x");
    CHECK(slurp(a / "series.csv").rfind("iter,d_bar,e_d_norm,e_x_norm,lyapunov,objective", 0) == 0);
    fs::remove_all(a);
    fs::remove_all(b);
  }

  TEST_CASE("summary reports the balance") {
    const auto out = run_scenario(load_scenario(test::scenario_path("fig1_tau3")));
    const auto& y = out.record.last().y;
    CHECK(std::abs(std::accumulate(y.begin(), y.end(), 0.0) - 500.0) <= 1e-3);
    const auto text = summary_text(out);
    CHECK(text.find("name=fig1_tau3\n") != std::string::npos);
    CHECK(text.find("converged=true\n") != std::string::npos);
    CHECK(text.find("within_boxes=true\n") != std::string::npos);
  }

  TEST_CASE("battery deviation drops by five orders of magnitude") {
    const auto out = run_scenario(load_scenario(test::scenario_path("fig2_battery")));
    const auto& d = out.record.d_bar;
    REQUIRE(d.size() > 2400);
    int hit = -1;
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (std::abs(d[k]) <= std::abs(d[0]) * 1e-5) {
        hit = static_cast<int>(k);
        break;
      }
    }
    CAPTURE(hit);
    CHECK(hit >= 0);
    CHECK(hit <= 2400);
  }

  TEST_CASE("sweep over the delay bound") {
    const auto base = load_scenario(test::scenario_path("fig1_tau0"));
    const auto res = sweep(base, SweepParam::TauBar, {0, 3, 10});
    REQUIRE(res.outcomes.size() == 3);
    CHECK(res.outcomes[0].instance.delays.tau_bar == 0);
    CHECK(res.outcomes[2].instance.delays.tau_bar == 10);
    for (const auto& o : res.outcomes) {
      CHECK(o.record.converged);
      CHECK(o.gap.primal < 1e-2);
    }
    const auto dir = scratch("sweep");
    write_sweep(res, SweepParam::TauBar, dir);
    const auto csv = slurp(dir / "sweep.csv");
    CHECK(csv.rfind("iter,tau_bar=0,tau_bar=3,tau_bar=10\n", 0) == 0);
    CHECK(fs::exists(dir / "sweep_summary.csv"));
    CHECK(fs::exists(dir / "tau_bar_3" / "summary.txt"));
    fs::remove_all(dir);
  }

  TEST_CASE("sweep over the seed") {
    auto base = load_scenario(test::scenario_path("fig1_tau3"));
    std::vector<double> seeds(10);
    std::iota(seeds.begin(), seeds.end(), 1.0);
    const auto res = sweep(base, SweepParam::Seed, seeds);
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      CAPTURE(seeds[k]);
      CHECK(res.outcomes[k].gap.primal < 1e-2);
    }
  }

  TEST_CASE("sweep over the penalty and bad sweep values") {
    auto base = load_scenario(test::scenario_path("fig1_tau3"));
    const auto res = sweep(base, SweepParam::C, {1, 5});
    CHECK(res.outcomes[0].record.c == 1.0);
    CHECK(res.outcomes[1].record.c == 5.0);
    CHECK_THROWS_WITH_AS(sweep(base, SweepParam::C, {1, -1}), doctest::Contains("c=-1"), Error);
    CHECK_THROWS_AS(sweep(base, SweepParam::TauBar, {1.5}), Error);
    CHECK_THROWS_AS(parse_sweep_param("gamma"), Error);
    CHECK(parse_sweep_param("tau_bar") == SweepParam::TauBar);
  }
}
