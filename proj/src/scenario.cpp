#include "dtac/scenario.hpp"

#include "dtac/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>

namespace dtac {

// --- parsing ----------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw Error(fmt::format("expected a number, got '{}'", s));
  }
  return v;
}

long long to_integer(const std::string& s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(fmt::format("expected an integer, got '{}'", s));
  }
  return v;
}

int to_int(const std::string& s) {
  const long long v = to_integer(s);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw Error(fmt::format("integer out of range: '{}'", s));
  }
  return static_cast<int>(v);
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw Error(fmt::format("expected true or false, got '{}'", s));
}

Param to_param(const std::string& s) {
  const auto w = words(s);
  if (w.size() == 3 && w[0] == "uniform") {
    Param p{to_double(w[1]), to_double(w[2]), true};
    if (p.lo > p.hi) throw Error("uniform range has lo > hi");
    return p;
  }
  if (w.size() == 1) {
    const double v = to_double(w[0]);
    return {v, v, false};
  }
  throw Error(fmt::format("expected a number or 'uniform lo hi', got '{}'", s));
}

std::vector<double> to_doubles(const std::vector<std::string>& w, std::size_t from) {
  std::vector<double> out;
  for (std::size_t k = from; k < w.size(); ++k) out.push_back(to_double(w[k]));
  return out;
}

const std::set<std::string> kAgentKeys = {"gamma",  "beta",  "alpha", "curvature", "center",
                                          "slope",  "shift", "b",     "a",         "lo",
                                          "hi"};

void parse_network(NetworkSpec& n, const std::string& key, const std::string& value) {
  if (key == "topology") {
    static const std::set<std::string> kinds = {"ring", "complete", "random", "edges", "matrix"};
    if (!kinds.contains(value)) throw Error(fmt::format("unknown topology '{}'", value));
    n.topology = value;
  } else if (key == "n") {
    n.n = to_int(value);
  } else if (key == "hops") {
    n.hops = to_int(value);
  } else if (key == "p") {
    n.p = to_double(value);
  } else if (key == "edge") {
    const auto w = words(value);
    if (w.size() != 2) throw Error("edge needs two node indices");
    n.edges.emplace_back(to_int(w[0]), to_int(w[1]));
  } else if (key == "row") {
    n.rows.push_back(to_doubles(words(value), 0));
  } else if (key == "weights") {
    if (value != "maxdegree" && value != "uniform") {
      throw Error(fmt::format("unknown weight rule '{}'", value));
    }
    n.weights = value;
  } else if (key == "link_weight") {
    n.link_weight = to_double(value);
  } else if (key == "lazy") {
    n.lazy = to_bool(value);
  } else {
    throw Error("unknown key");
  }
}

void parse_delays(DelaySpec& d, const std::string& key, const std::string& value) {
  if (key == "mode") {
    static const std::set<std::string> modes = {"zero", "constant", "uniform", "explicit"};
    if (!modes.contains(value)) throw Error(fmt::format("unknown delay mode '{}'", value));
    d.mode = value;
  } else if (key == "tau_bar") {
    d.tau_bar = to_int(value);
  } else if (key == "tau") {
    d.tau = to_int(value);
  } else if (key == "link") {
    const auto w = words(value);
    if (w.size() != 3) throw Error("link needs 'i j tau'");
    d.links.push_back({to_int(w[0]), to_int(w[1]), to_int(w[2])});
  } else {
    throw Error("unknown key");
  }
}

void parse_run(Scenario& s, const std::string& key, const std::string& value) {
  RunConfig& r = s.run;
  if (key == "variant") {
    r.variant = parse_variant(value);
  } else if (key == "c") {
    r.c = to_double(value);
  } else if (key == "max_iters") {
    r.max_iters = to_int(value);
  } else if (key == "record_every") {
    r.record_every = to_int(value);
  } else if (key == "early_stop") {
    r.termination.early_stop = to_bool(value);
  } else if (key == "eps_d") {
    r.termination.eps_d = to_double(value);
  } else if (key == "eps_x") {
    r.termination.eps_x = to_double(value);
  } else if (key == "patience") {
    r.termination.patience = to_int(value);
  } else if (key == "execution") {
    if (value == "serial") {
      r.execution = Execution::Serial;
    } else if (value == "openmp") {
      r.execution = Execution::OpenMP;
    } else {
      throw Error(fmt::format("unknown execution '{}'", value));
    }
  } else if (key == "y0") {
    const auto w = words(value);
    if (w.size() == 1 && w[0] == "uniform") {
      s.y0 = {"uniform", 0.0, {}};
    } else if (w.size() == 1) {
      s.y0 = {"value", to_double(w[0]), {}};
    } else if (w.size() >= 2 && w[0] == "list") {
      s.y0 = {"list", 0.0, to_doubles(w, 1)};
    } else {
      throw Error("expected 'uniform', a number or 'list v0 v1 ...'");
    }
  } else {
    throw Error("unknown key");
  }
}

void parse_agent_key(AgentParams& params, std::string& cost, const std::string& key,
                     const std::string& value) {
  if (key == "cost") {
    if (value != "quadratic" && value != "logexp") {
      throw Error(fmt::format("unknown cost model '{}'", value));
    }
    cost = value;
  } else if (kAgentKeys.contains(key)) {
    params[key] = to_param(value);
  } else {
    throw Error("unknown key");
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  Scenario s;
  std::istringstream in(text);
  std::string section;      // as written, used in messages
  AgentOverride* current = nullptr;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    auto fail = [&](const std::string& field, const std::string& msg) {
      return Error(fmt::format("{}:{}: {}: {}", origin, lineno, field, msg));
    };

    if (body.front() == '[') {
      if (body.back() != ']') throw fail("section", "missing ']'");
      section = trim(body.substr(1, body.size() - 2));
      current = nullptr;
      const auto w = words(section);
      if (w.size() == 2 && w[0] == "agent") {
        AgentOverride o;
        try {
          const auto dash = w[1].find('-');
          o.first = to_int(w[1].substr(0, dash));
          o.last = dash == std::string::npos ? o.first : to_int(w[1].substr(dash + 1));
        } catch (const Error& e) {
          throw fail(section, e.what());
        }
        if (o.first < 0 || o.last < o.first) throw fail(section, "bad agent range");
        s.overrides.push_back(std::move(o));
        current = &s.overrides.back();
      } else if (section != "network" && section != "delays" && section != "agents" &&
                 section != "run") {
        throw fail(section, "unknown section");
      }
      continue;
    }

    const auto eq = body.find('=');
    if (eq == std::string::npos) throw fail(section.empty() ? "line" : section, "expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    const std::string field = section.empty() ? key : fmt::format("{}.{}", section, key);
    if (value.empty()) throw fail(field, "missing value");
    try {
      if (section.empty()) {
        if (key == "name") {
          s.name = value;
        } else if (key == "seed") {
          const long long v = to_integer(value);
          if (v < 0) throw Error("seed must be non-negative");
          s.seed = static_cast<std::uint64_t>(v);
        } else {
          throw Error("unknown key");
        }
      } else if (section == "network") {
        parse_network(s.network, key, value);
      } else if (section == "delays") {
        parse_delays(s.delays, key, value);
      } else if (section == "run") {
        parse_run(s, key, value);
      } else if (section == "agents") {
        if (key == "total_b") {
          s.agents["total_b"] = to_param(value);
        } else {
          parse_agent_key(s.agents, s.cost, key, value);
        }
      } else {
        parse_agent_key(current->params, current->cost, key, value);
      }
    } catch (const Error& e) {
      throw fail(field, e.what());
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open scenario '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  Scenario s = parse_scenario(buf.str(), path.string());
  if (s.name == "scenario") s.name = path.stem().string();
  return s;
}

// --- instantiation ------------------------------------------------------------

std::uint64_t derive_seed(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

namespace {

Network make_network(const Scenario& s) {
  const NetworkSpec& spec = s.network;
  auto fail = [](const std::string& field, const std::string& msg) {
    return Error(fmt::format("network.{}: {}", field, msg));
  };
  if (spec.topology == "matrix") {
    if (spec.rows.empty()) throw fail("row", "matrix topology needs row lines");
    const int n = static_cast<int>(spec.rows.size());
    Eigen::MatrixXd W(n, n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(spec.rows[i].size()) != n) {
        throw fail(fmt::format("row[{}]", i), fmt::format("expected {} entries", n));
      }
      for (int j = 0; j < n; ++j) W(i, j) = spec.rows[i][j];
    }
    try {
      return build_weights_custom(W);
    } catch (const Error& e) {
      throw fail("row", e.what());
    }
  }

  const int n = spec.topology == "edges" && spec.n == 0 ? 0 : spec.n;
  if (n < 1) throw fail("n", "must be at least 1");
  std::set<Edge> edges;
  if (spec.topology == "ring") {
    if (spec.hops < 1) throw fail("hops", "must be at least 1");
    for (int i = 0; i < n; ++i) {
      for (int h = 1; h <= spec.hops; ++h) {
        const int j = (i + h) % n;
        if (j != i) edges.insert(Edge(i, j));
      }
    }
  } else if (spec.topology == "complete") {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) edges.insert(Edge(i, j));
    }
  } else if (spec.topology == "random") {
    if (!(spec.p > 0.0 && spec.p <= 1.0)) throw fail("p", "must be in (0, 1]");
    std::mt19937_64 rng(derive_seed(s.seed, Stream::Network));
    std::bernoulli_distribution coin(spec.p);
    for (int attempt = 0;; ++attempt) {
      if (attempt == 1000) throw fail("p", "no connected graph after 1000 draws");
      edges.clear();
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          if (coin(rng)) edges.insert(Edge(i, j));
        }
      }
      const std::vector<Edge> list(edges.begin(), edges.end());
      if (is_connected(n, list)) break;
    }
  } else {
    for (std::size_t k = 0; k < spec.edges.size(); ++k) {
      const Edge& e = spec.edges[k];
      if (e.i < 0 || e.j >= n || e.i == e.j) {
        throw fail(fmt::format("edge[{}]", k), fmt::format("invalid edge {} {}", e.i, e.j));
      }
      edges.insert(e);
    }
  }
  const std::vector<Edge> list(edges.begin(), edges.end());

  try {
    if (spec.weights == "maxdegree") return build_weights(list, n);
    if (!(spec.link_weight > 0.0)) throw fail("link_weight", "must be positive");
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
    for (const Edge& e : list) W(e.i, e.j) = W(e.j, e.i) = spec.link_weight;
    for (int i = 0; i < n; ++i) W(i, i) = 1.0 - W.row(i).sum();
    if (spec.lazy) W = 0.5 * (W + Eigen::MatrixXd::Identity(n, n));
    return build_weights_custom(W);
  } catch (const Error& e) {
    const std::string what = e.what();
    if (what.rfind("network.", 0) == 0) throw;
    throw fail("weights", what);
  }
}

DelaySchedule make_delays(const Scenario& s, const Network& net) {
  const DelaySpec& d = s.delays;
  try {
    if (d.tau_bar < 0) throw Error("tau_bar must be non-negative");
    if (d.mode == "zero") return assign_delays(net, 0, delay_mode::Constant{0}, 0);
    if (d.mode == "constant") {
      return assign_delays(net, std::max(d.tau_bar, d.tau), delay_mode::Constant{d.tau}, 0);
    }
    if (d.mode == "uniform") {
      return assign_delays(net, d.tau_bar, delay_mode::UniformRandom{},
                           derive_seed(s.seed, Stream::Delays));
    }
    return assign_delays(net, d.tau_bar, delay_mode::Explicit{d.links}, 0);
  } catch (const Error& e) {
    throw Error(fmt::format("delays: {}", e.what()));
  }
}

const Param* lookup(const Scenario& s, int agent, const std::string& key) {
  const Param* found = nullptr;
  if (auto it = s.agents.find(key); it != s.agents.end()) found = &it->second;
  for (const auto& o : s.overrides) {  // later sections win
    if (agent >= o.first && agent <= o.last) {
      if (auto it = o.params.find(key); it != o.params.end()) found = &it->second;
    }
  }
  return found;
}

std::string cost_of(const Scenario& s, int agent) {
  std::string cost = s.cost;
  for (const auto& o : s.overrides) {
    if (agent >= o.first && agent <= o.last && !o.cost.empty()) cost = o.cost;
  }
  return cost;
}

Problem make_problem(const Scenario& s, int n) {
  for (const auto& o : s.overrides) {
    if (o.last >= n) {
      throw Error(fmt::format("agent {}-{}: range exceeds agent count {}", o.first, o.last, n));
    }
  }
  std::mt19937_64 rng(derive_seed(s.seed, Stream::Agents));
  const Param* total = s.agents.contains("total_b") ? &s.agents.at("total_b") : nullptr;
  if (total && total->random) throw Error("agents.total_b: must be a fixed number");

  Problem p;
  p.agents.resize(n);
  for (int i = 0; i < n; ++i) {
    const std::string cost = cost_of(s, i);
    auto value = [&](const std::string& key, std::optional<double> fallback) {
      const Param* prm = lookup(s, i, key);
      if (!prm) {
        if (fallback) return *fallback;
        throw Error(fmt::format("agents[{}].{}: missing ({} cost)", i, key, cost));
      }
      if (!prm->random) return prm->lo;
      return std::uniform_real_distribution<double>(prm->lo, prm->hi)(rng);
    };
    AgentSpec& a = p.agents[i];
    if (cost == "quadratic") {
      Quadratic q;
      q.gamma = value("gamma", std::nullopt);
      q.beta = value("beta", std::nullopt);
      q.alpha = value("alpha", 0.0);
      a.cost = q;
    } else {
      LogExp l;
      l.weight = value("curvature", std::nullopt);
      l.center = value("center", std::nullopt);
      l.slope = value("slope", std::nullopt);
      l.shift = value("shift", std::nullopt);
      a.cost = l;
    }
    std::optional<double> even_share;
    if (total) even_share = total->lo / n;
    a.demand = value("b", even_share);
    a.weight = value("a", 1.0);
    a.box.lo = value("lo", std::nullopt);
    a.box.hi = value("hi", std::nullopt);
    try {
      validate_agent(a);
    } catch (const Error& e) {
      throw Error(fmt::format("agents[{}]: {}", i, e.what()));
    }
  }
  try {
    check_feasible(p);
  } catch (const Error& e) {
    throw Error(fmt::format("agents: {}", e.what()));
  }
  return p;
}

std::vector<double> make_initial(const Scenario& s, const Problem& p) {
  const int n = p.size();
  std::vector<double> y0(n);
  if (s.y0.kind == "uniform") {
    std::mt19937_64 rng(derive_seed(s.seed, Stream::Initial));
    for (int i = 0; i < n; ++i) {
      const Box& b = p.agents[i].box;
      y0[i] = b.clamp(std::uniform_real_distribution<double>(b.lo, b.hi)(rng));
    }
    return y0;
  }
  if (s.y0.kind == "value") {
    std::fill(y0.begin(), y0.end(), s.y0.value);
  } else {
    if (static_cast<int>(s.y0.values.size()) != n) {
      throw Error(fmt::format("run.y0: expected {} values, got {}", n, s.y0.values.size()));
    }
    y0 = s.y0.values;
  }
  for (int i = 0; i < n; ++i) {
    if (!p.agents[i].box.contains(y0[i])) {
      throw Error(fmt::format("run.y0[{}]: {} outside box [{}, {}]", i, y0[i], p.agents[i].box.lo,
                              p.agents[i].box.hi));
    }
  }
  return y0;
}

}  // namespace

Instance instantiate(const Scenario& s) {
  Network net = make_network(s);
  DelaySchedule delays = make_delays(s, net);
  Problem problem = make_problem(s, net.size());

  RunConfig cfg = s.run;
  if (!(cfg.c > 0.0)) throw Error("run.c: penalty must be positive");
  if (cfg.max_iters < 0) throw Error("run.max_iters: must be non-negative");
  if (cfg.record_every < 1) throw Error("run.record_every: must be at least 1");
  if (cfg.termination.patience < 1) throw Error("run.patience: must be at least 1");
  if (!(cfg.termination.eps_d > 0.0)) throw Error("run.eps_d: must be positive");
  if (!(cfg.termination.eps_x > 0.0)) throw Error("run.eps_x: must be positive");
  const bool zero = delays.tau_bar == 0 && delays.self_delay == 0;
  if ((cfg.variant == Variant::Parallel || cfg.variant == Variant::Distributed) && !zero) {
    throw Error(fmt::format("run.variant: {} needs delays.mode = zero", to_string(cfg.variant)));
  }
  if (cfg.variant == Variant::Homogeneous && s.delays.mode != "constant" &&
      s.delays.mode != "zero") {
    throw Error("run.variant: homogeneous needs delays.mode = constant");
  }
  cfg.seed = derive_seed(s.seed, Stream::Initial);
  cfg.y0 = make_initial(s, problem);
  return {std::move(problem), std::move(net), std::move(delays), std::move(cfg)};
}

// --- execution ----------------------------------------------------------------

Outcome run_scenario(const Scenario& scenario) {
  Outcome out;
  out.name = scenario.name;
  out.instance = instantiate(scenario);
  const Instance& in = out.instance;
  const auto t0 = std::chrono::steady_clock::now();
  out.record = run(in.problem, in.network, in.delays, in.config);
  out.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.oracle = solve_dual_bisection(in.problem);
  out.errors = error_series(out.record);
  out.lyapunov = lyapunov_series(out.record, out.oracle);
  out.gap = optimality_gap(in.problem, out.record, out.oracle);
  return out;
}

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(fmt::format("cannot write '{}'", path.string()));
  f << content;
}

}  // namespace

std::string summary_text(const Outcome& o) {
  const RunRecord& r = o.record;
  const Problem& p = o.instance.problem;
  const Snapshot& last = r.last();
  double spread_lo = last.x.front(), spread_hi = last.x.front();
  for (double x : last.x) {
    spread_lo = std::min(spread_lo, x);
    spread_hi = std::max(spread_hi, x);
  }
  bool in_box = true;
  for (int i = 0; i < r.n; ++i) in_box = in_box && p.agents[i].box.contains(last.y[i]);

  std::string s;
  auto kv = [&s](std::string_view k, const std::string& v) { s += fmt::format("{}={}\n", k, v); };
  kv("name", o.name);
  kv("variant", r.variant);
  kv("n", std::to_string(r.n));
  kv("tau_bar", std::to_string(o.instance.delays.tau_bar));
  kv("c", num(r.c));
  kv("iterations", std::to_string(r.iterations));
  kv("stopped_early", r.stopped_early ? "true" : "false");
  kv("converged", r.converged ? "true" : "false");
  kv("d_bar_initial", num(r.d_bar.front()));
  kv("d_bar_final", num(r.d_bar.back()));
  kv("e_d_final", num(o.errors.e_d_tail.last));
  kv("e_x_final", num(o.errors.e_x_tail.last));
  kv("x_spread", num(spread_hi - spread_lo));
  kv("weighted_residual", num(p.coupling_residual(last.y)));
  kv("sum_y", num(std::accumulate(last.y.begin(), last.y.end(), 0.0)));
  kv("within_boxes", in_box ? "true" : "false");
  kv("objective", num(p.objective(last.y)));
  kv("oracle_objective", num(o.oracle.objective));
  kv("oracle_x_star", num(o.oracle.x_star));
  kv("oracle_unique_dual", o.oracle.unique_dual ? "true" : "false");
  kv("primal_gap", num(o.gap.primal));
  kv("dual_gap", num(o.gap.dual));
  kv("objective_gap", num(o.gap.objective));
  kv("lyapunov_initial", num(o.lyapunov.value.front()));
  kv("lyapunov_final", num(o.lyapunov.value.back()));
  kv("lyapunov_non_increasing", o.lyapunov.non_increasing ? "true" : "false");
  kv("runtime_s", fmt::format("{:.6f}", o.runtime_s));
  return s;
}

void write_outputs(const Outcome& o, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const RunRecord& r = o.record;
  std::string traj = "iter,agent,y,d,x\n";
  std::string series = "iter,d_bar,e_d_norm,e_x_norm,lyapunov,objective\n";
  for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
    const Snapshot& s = r.snapshots[k];
    for (int i = 0; i < r.n; ++i) {
      traj += fmt::format("{},{},{},{},{}\n", s.iter, i, num(s.y[i]), num(s.d[i]), num(s.x[i]));
    }
    series += fmt::format("{},{},{},{},{},{}\n", s.iter, num(r.d_bar[s.iter]),
                          num(o.errors.e_d[k]), num(o.errors.e_x[k]),
                          num(o.lyapunov.value[k]), num(o.instance.problem.objective(s.y)));
  }
  write_file(dir / "trajectory.csv", traj);
  write_file(dir / "series.csv", series);
  write_file(dir / "summary.txt", summary_text(o));
}

// --- sweeps -------------------------------------------------------------------

SweepParam parse_sweep_param(const std::string& name) {
  if (name == "tau_bar") return SweepParam::TauBar;
  if (name == "c") return SweepParam::C;
  if (name == "seed") return SweepParam::Seed;
  throw Error(fmt::format("unknown sweep parameter '{}' (expected tau_bar, c or seed)", name));
}

namespace {

std::string param_name(SweepParam p) {
  switch (p) {
    case SweepParam::TauBar: return "tau_bar";
    case SweepParam::C: return "c";
    case SweepParam::Seed: return "seed";
  }
  return "?";
}

int whole(double v, const char* what) {
  if (v < 0 || v != std::floor(v) || v > 1e15) {
    throw Error(fmt::format("{} must be a non-negative integer, got {}", what, v));
  }
  return static_cast<int>(v);
}

}  // namespace

Scenario with_param(const Scenario& base, SweepParam param, double value) {
  Scenario s = base;
  switch (param) {
    case SweepParam::TauBar:
      s.delays.tau_bar = whole(value, "tau_bar");
      if (s.delays.mode == "constant") s.delays.tau = s.delays.tau_bar;
      if (s.delays.mode == "zero" && s.delays.tau_bar > 0) s.delays.mode = "uniform";
      break;
    case SweepParam::C:
      s.run.c = value;
      break;
    case SweepParam::Seed:
      whole(value, "seed");
      s.seed = static_cast<std::uint64_t>(value);
      break;
  }
  s.name = fmt::format("{}_{}{:g}", base.name, param_name(param), value);
  return s;
}

SweepResult sweep(const Scenario& base, SweepParam param, const std::vector<double>& values) {
  if (values.empty()) throw Error("sweep needs at least one value");
  const int m = static_cast<int>(values.size());
  SweepResult res{values, std::vector<Outcome>(m)};
  std::vector<std::string> errors(m);
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < m; ++k) {
    try {
      Scenario s = with_param(base, param, values[k]);
      s.run.execution = Execution::Serial;
      res.outcomes[k] = run_scenario(s);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  }
  for (int k = 0; k < m; ++k) {
    if (!errors[k].empty()) {
      throw Error(fmt::format("{}={:g}: {}", param_name(param), values[k], errors[k]));
    }
  }
  return res;
}

void write_sweep(const SweepResult& result, SweepParam param, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string name = param_name(param);
  std::string wide = "iter";
  std::size_t len = 0;
  for (std::size_t k = 0; k < result.values.size(); ++k) {
    wide += fmt::format(",{}={:g}", name, result.values[k]);
    len = std::max(len, result.outcomes[k].record.d_bar.size());
  }
  wide += '\n';
  for (std::size_t it = 0; it < len; ++it) {
    wide += std::to_string(it);
    for (const auto& o : result.outcomes) {
      const auto& d = o.record.d_bar;
      wide += ',';
      if (it < d.size()) wide += num(std::abs(d[it]));
    }
    wide += '\n';
  }
  write_file(dir / "sweep.csv", wide);

  std::string table =
      fmt::format("{},iterations,converged,d_bar_final,x_spread,primal_gap,dual_gap,objective_gap\n",
                  name);
  for (std::size_t k = 0; k < result.values.size(); ++k) {
    const Outcome& o = result.outcomes[k];
    const auto& x = o.record.last().x;
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    table += fmt::format("{:g},{},{},{},{},{},{},{}\n", result.values[k], o.record.iterations,
                         o.record.converged ? "true" : "false", num(o.record.d_bar.back()),
                         num(*hi - *lo), num(o.gap.primal), num(o.gap.dual),
                         num(o.gap.objective));
    write_outputs(o, dir / fmt::format("{}_{:g}", name, result.values[k]));
  }
  write_file(dir / "sweep_summary.csv", table);
}

}  // namespace dtac
