#pragma once

// Scenario files and the experiment driver behind the command-line tool.
//
// A scenario is a line-oriented key/value file with sections:
//
//   name = fig1_tau3
//   seed = 1
//   [network]   topology, n, hops, p, edge/row lines, weights, link_weight, lazy
//   [delays]    mode (zero|constant|uniform|explicit), tau_bar, tau, link lines
//   [agents]    defaults for every agent
//   [agent 4-5] overrides for agents 4..5 (0-based, inclusive)
//   [run]       variant, c, max_iters, y0, record_every, early_stop, eps_d, eps_x,
//               patience, execution
//
// Agent parameters accept a number or `uniform lo hi`, drawn per agent from
// the scenario seed. '#' starts a comment.

#include "dtac/costs.hpp"
#include "dtac/engine.hpp"
#include "dtac/metrics.hpp"
#include "dtac/oracle.hpp"
#include "dtac/topology.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dtac {

/// A fixed value or a uniform draw.
struct Param {
  double lo = 0.0;
  double hi = 0.0;
  bool random = false;
};

struct NetworkSpec {
  std::string topology = "ring";  ///< ring | complete | random | edges | matrix
  int n = 0;
  int hops = 1;
  double p = 0.5;
  std::vector<Edge> edges;
  std::vector<std::vector<double>> rows;
  std::string weights = "maxdegree";  ///< maxdegree | uniform (ignored for matrix)
  double link_weight = 0.0;
  bool lazy = false;
};

struct DelaySpec {
  std::string mode = "zero";  ///< zero | constant | uniform | explicit
  int tau_bar = 0;
  int tau = 0;
  std::vector<delay_mode::Explicit::Entry> links;
};

struct InitSpec {
  std::string kind = "uniform";  ///< uniform | value | list
  double value = 0.0;
  std::vector<double> values;
};

/// Raw agent parameters of one section, keyed by name.
using AgentParams = std::map<std::string, Param>;

struct AgentOverride {
  int first = 0;
  int last = 0;
  AgentParams params;
  std::string cost;  ///< empty means inherit
};

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 0;
  NetworkSpec network;
  DelaySpec delays;
  std::string cost = "quadratic";
  AgentParams agents;
  std::vector<AgentOverride> overrides;
  RunConfig run;
  InitSpec y0;
};

Scenario parse_scenario(const std::string& text, const std::string& origin = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

/// Everything needed to execute a scenario.
struct Instance {
  Problem problem;
  Network network;
  DelaySchedule delays;
  RunConfig config;
};

/// Draws random parameters and validates the result. Errors name the field,
/// for example "agents[3].lo".
Instance instantiate(const Scenario& scenario);

/// Independent random streams derived from the scenario seed.
enum class Stream : std::uint64_t { Agents = 1, Network = 2, Delays = 3, Initial = 4 };
std::uint64_t derive_seed(std::uint64_t seed, Stream stream);

struct Outcome {
  std::string name;
  Instance instance;
  RunRecord record;
  OracleSolution oracle;
  ErrorSeries errors;
  LyapunovSeries lyapunov;
  OptimalityGap gap;
  double runtime_s = 0.0;
};

Outcome run_scenario(const Scenario& scenario);

/// trajectory.csv, series.csv and summary.txt under `dir`.
void write_outputs(const Outcome& outcome, const std::filesystem::path& dir);

/// key=value lines, one per reported quantity.
std::string summary_text(const Outcome& outcome);

enum class SweepParam { TauBar, C, Seed };
SweepParam parse_sweep_param(const std::string& name);

/// Copy of `base` with one parameter replaced.
Scenario with_param(const Scenario& base, SweepParam param, double value);

struct SweepResult {
  std::vector<double> values;
  std::vector<Outcome> outcomes;
};

/// One sub-run per value, executed in parallel.
SweepResult sweep(const Scenario& base, SweepParam param, const std::vector<double>& values);

/// sweep.csv (iter then |d_bar| per value) and sweep_summary.csv, plus each
/// sub-run's outputs in its own directory.
void write_sweep(const SweepResult& result, SweepParam param, const std::filesystem::path& dir);

}  // namespace dtac
