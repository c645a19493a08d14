// dtac: run, sweep and analyse delayed ADMM allocation scenarios.
//
// Exit status: 0 converged (or analysis passed), 2 iteration limit reached
// without convergence, 1 on any error.

#include "dtac/error.hpp"
#include "dtac/oracle.hpp"
#include "dtac/scenario.hpp"
#include "dtac/topology.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<int> max_iters;
  std::string out_dir;
};

dtac::Scenario load(const std::string& path, const Globals& g) {
  dtac::Scenario s = dtac::load_scenario(path);
  if (g.seed) s.seed = *g.seed;
  if (g.max_iters) {
    if (*g.max_iters < 0) throw dtac::Error("--max-iters must be non-negative");
    s.run.max_iters = *g.max_iters;
  }
  return s;
}

fs::path out_dir(const Globals& g, const dtac::Scenario& s) {
  return g.out_dir.empty() ? fs::path("out") / s.name : fs::path(g.out_dir);
}

int cmd_run(const std::string& path, const Globals& g) {
  const auto s = load(path, g);
  const auto outcome = dtac::run_scenario(s);
  const auto dir = out_dir(g, s);
  dtac::write_outputs(outcome, dir);
  fmt::print("{}", dtac::summary_text(outcome));
  fmt::print("outputs={}\n", dir.string());
  return outcome.record.converged ? 0 : 2;
}

int cmd_sweep(const std::string& path, const std::string& param,
              const std::vector<double>& values, const Globals& g) {
  const auto s = load(path, g);
  const auto p = dtac::parse_sweep_param(param);
  const auto result = dtac::sweep(s, p, values);
  const auto dir = out_dir(g, s);
  dtac::write_sweep(result, p, dir);
  bool all = true;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const auto& o = result.outcomes[k];
    all = all && o.record.converged;
    fmt::print("{}={:g} iterations={} converged={} d_bar_final={:.3e} primal_gap={:.3e}\n", param,
               values[k], o.record.iterations, o.record.converged, o.record.d_bar.back(),
               o.gap.primal);
  }
  fmt::print("outputs={}\n", dir.string());
  return all ? 0 : 2;
}

int cmd_oracle(const std::string& path, const Globals& g) {
  const auto s = load(path, g);
  const auto inst = dtac::instantiate(s);
  const auto sol = dtac::solve_dual_bisection(inst.problem);
  std::string text;
  for (std::size_t i = 0; i < sol.y_star.size(); ++i) {
    text += fmt::format("y_star[{}]={:.17g}\n", i, sol.y_star[i]);
  }
  text += fmt::format("x_star={:.17g}\n", sol.x_star);
  text += fmt::format("objective={:.17g}\n", sol.objective);
  text += fmt::format("residual={:.3e}\n", sol.residual);
  text += fmt::format("unique_dual={}\n", sol.unique_dual);
  text += fmt::format("dual_value={:.17g}\n", dtac::dual_function(inst.problem, sol.x_star));
  text += fmt::format("stationarity={:.3e}\n", dtac::stationarity_violation(inst.problem, sol));
  fmt::print("{}", text);
  if (!g.out_dir.empty()) {
    fs::create_directories(g.out_dir);
    std::ofstream(fs::path(g.out_dir) / "oracle.txt") << text;
  }
  return 0;
}

int cmd_spectral(const std::string& path, const Globals& g) {
  const auto s = load(path, g);
  const auto inst = dtac::instantiate(s);
  const auto sys = dtac::build_augmented(inst.network, inst.delays);
  const auto r = dtac::spectral_radius_check(sys);
  std::string text;
  text += fmt::format("n={}\ntau_bar={}\ndim={}\n", sys.n, sys.tau_bar, sys.dim());
  text += fmt::format("homogeneous={}\n", r.homogeneous);
  text += fmt::format("rho_W_tilde={:.17g}\n", r.rho_W_tilde);
  text += fmt::format("rho_PW_tilde={:.17g}\n", r.rho_PW_tilde);
  text += fmt::format("predicted={:.17g}\n", r.predicted);
  text += fmt::format("stable={}\nwithin_bound={}\n", r.stable, r.within_bound);
  if (r.homogeneous) text += fmt::format("matches_prediction={}\n", r.matches_prediction);
  fmt::print("{}", text);
  if (!g.out_dir.empty()) {
    fs::create_directories(g.out_dir);
    std::ofstream(fs::path(g.out_dir) / "spectral.txt") << text;
  }
  return r.stable && r.within_bound ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay-tolerant distributed ADMM resource allocation simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Override the scenario seed");
  app.add_option("--max-iters", g.max_iters, "Override run.max_iters");
  app.add_option("--out-dir", g.out_dir, "Output directory (default out/<scenario name>)");

  std::string path;
  auto* run = app.add_subcommand("run", "Run a scenario and write CSV outputs");
  run->add_option("scenario", path, "Scenario file")->required()->check(CLI::ExistingFile);

  std::string param;
  std::vector<double> values;
  auto* sw = app.add_subcommand("sweep", "Repeat a scenario over parameter values");
  sw->add_option("scenario", path, "Scenario file")->required()->check(CLI::ExistingFile);
  sw->add_option("--param", param, "tau_bar, c or seed")->required();
  sw->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');

  auto* orc = app.add_subcommand("oracle", "Solve the scenario centrally by dual bisection");
  orc->add_option("scenario", path, "Scenario file")->required()->check(CLI::ExistingFile);

  auto* spec = app.add_subcommand("spectral", "Spectral radius of the augmented delay matrix");
  spec->add_option("scenario", path, "Scenario file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return cmd_run(path, g);
    if (sw->parsed()) return cmd_sweep(path, param, values, g);
    if (orc->parsed()) return cmd_oracle(path, g);
    return cmd_spectral(path, g);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
