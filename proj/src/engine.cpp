#include "dtac/engine.hpp"

#include "dtac/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace dtac {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Parallel: return "parallel";
    case Variant::Distributed: return "distributed";
    case Variant::Homogeneous: return "homogeneous";
    case Variant::Dtac: return "dtac";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  if (name == "parallel") return Variant::Parallel;
  if (name == "distributed") return Variant::Distributed;
  if (name == "homogeneous") return Variant::Homogeneous;
  if (name == "dtac") return Variant::Dtac;
  throw Error(fmt::format("unknown variant '{}'", name));
}

// --- link buffers -------------------------------------------------------------

LinkBuffer::LinkBuffer(int delay, AgentState pre_history) : delay_(delay), current_(pre_history) {
  if (delay < 0) throw Error("link delay must be non-negative");
}

void LinkBuffer::push(int send_iter, const AgentState& payload) {
  if (!queue_.empty() && send_iter <= queue_.back().sent) {
    throw Error("link buffer: payloads must be pushed in iteration order");
  }
  queue_.push_back({send_iter, payload});
}

const AgentState& LinkBuffer::read(int iter) {
  while (!queue_.empty() && queue_.front().sent + delay_ <= iter) {
    current_ = queue_.front().payload;
    queue_.pop_front();
  }
  return current_;
}

DelayedExchange::DelayedExchange(const Network& net, const DelaySchedule& delays,
                                 std::span<const AgentState> initial)
    : inbox_(net.size()) {
  const int n = net.size();
  const auto w = kernels::SparseWeights::from(net);
  for (int i = 0; i < n; ++i) {
    inbox_[i].reserve(w.offsets[i + 1] - w.offsets[i]);
    for (int p = w.offsets[i]; p < w.offsets[i + 1]; ++p) {
      const int j = w.cols[p];
      // Nothing is on the wire before the first send: d and x read as zero.
      const AgentState pre{initial[j].y, 0.0, 0.0};
      inbox_[i].push_back({j, w.vals[p], LinkBuffer(delays.delay(i, j), pre)});
    }
  }
  publish(0, initial, Execution::Serial);
}

void DelayedExchange::gather(int iter, std::span<kernels::Aggregate> out, Execution exec) {
  const int n = static_cast<int>(inbox_.size());
  auto one = [&](int i) {
    kernels::Aggregate a;
    for (auto& in : inbox_[i]) {
      const AgentState& s = in.buffer.read(iter);
      a.eta += in.weight * s.x;
      a.delta += in.weight * s.d;
    }
    out[i] = a;
  };
  if (exec == Execution::OpenMP) {
#pragma omp parallel for schedule(static) if (n >= kernels::kParallelThreshold)
    for (int i = 0; i < n; ++i) one(i);
  } else {
    for (int i = 0; i < n; ++i) one(i);
  }
}

void DelayedExchange::publish(int iter, std::span<const AgentState> states, Execution exec) {
  const int n = static_cast<int>(inbox_.size());
  auto one = [&](int i) {
    for (auto& in : inbox_[i]) in.buffer.push(iter, states[in.sender]);
  };
  if (exec == Execution::OpenMP) {
#pragma omp parallel for schedule(static) if (n >= kernels::kParallelThreshold)
    for (int i = 0; i < n; ++i) one(i);
  } else {
    for (int i = 0; i < n; ++i) one(i);
  }
}

double DelayedExchange::pending_d() const {
  double s = 0.0;
  for (const auto& links : inbox_) {
    for (const auto& in : links) {
      s += in.weight * in.buffer.pending_sum([](const AgentState& p) { return p.d; });
    }
  }
  return s / static_cast<double>(inbox_.size());
}

double DelayedExchange::pending_x() const {
  double s = 0.0;
  for (const auto& links : inbox_) {
    for (const auto& in : links) {
      s += in.weight * in.buffer.pending_sum([](const AgentState& p) { return p.x; });
    }
  }
  return s / static_cast<double>(inbox_.size());
}

// --- runs ---------------------------------------------------------------------

namespace {

void validate_config(const Problem& problem, const RunConfig& cfg) {
  if (!(cfg.c > 0.0) || !std::isfinite(cfg.c)) throw Error("penalty c must be positive");
  if (cfg.max_iters < 0) throw Error("max_iters must be non-negative");
  if (cfg.record_every < 1) throw Error("record_every must be >= 1");
  if (!(cfg.termination.eps_d > 0.0) || !(cfg.termination.eps_x > 0.0)) {
    throw Error("termination tolerances must be positive");
  }
  if (cfg.termination.patience < 1) throw Error("termination patience must be >= 1");
  if (problem.size() == 0) throw Error("problem has no agents");
  for (int i = 0; i < problem.size(); ++i) {
    try {
      validate_agent(problem.agents[i]);
    } catch (const Error& e) {
      throw Error(fmt::format("agent {}: {}", i, e.what()));
    }
  }
  if (!cfg.y0.empty()) {
    if (static_cast<int>(cfg.y0.size()) != problem.size()) {
      throw Error("initial allocation size does not match agent count");
    }
    for (int i = 0; i < problem.size(); ++i) {
      if (!problem.agents[i].box.contains(cfg.y0[i])) {
        throw Error(fmt::format("agent {}: initial value {} outside box", i, cfg.y0[i]));
      }
    }
  }
}

double spread_x(std::span<const AgentState> s) {
  auto [lo, hi] = std::minmax_element(s.begin(), s.end(), [](const auto& a, const auto& b) {
    return a.x < b.x;
  });
  return hi->x - lo->x;
}

/// Accumulates the RunRecord and evaluates the termination rule.
class Recorder {
 public:
  Recorder(const Problem& problem, const RunConfig& cfg) : problem_(problem), cfg_(cfg) {
    rec_.variant = to_string(cfg.variant);
    rec_.n = problem.size();
    rec_.c = cfg.c;
    for (const auto& a : problem.agents) {
      rec_.weights.push_back(a.weight);
      rec_.demands.push_back(a.demand);
    }
    const std::size_t reserve = static_cast<std::size_t>(cfg.max_iters) + 1;
    rec_.d_bar.reserve(reserve);
    rec_.x_bar.reserve(reserve);
    rec_.d_mean.reserve(reserve);
    rec_.tracked_d.reserve(reserve);
    rec_.tracked_x.reserve(reserve);
  }

  /// Returns true when the run should stop early.
  bool push(int k, std::span<const AgentState> s, double tracked_d, double tracked_x) {
    const int n = rec_.n;
    double dev = 0.0, xs = 0.0, ds = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(s[i].y) || !std::isfinite(s[i].d) || !std::isfinite(s[i].x)) {
        throw Error(fmt::format("divergence detected at iteration {} (agent {})", k, i));
      }
      dev += rec_.weights[i] * s[i].y - rec_.demands[i];
      xs += s[i].x;
      ds += s[i].d;
    }
    rec_.d_bar.push_back(dev / n);
    rec_.x_bar.push_back(xs / n);
    rec_.d_mean.push_back(ds / n);
    rec_.tracked_d.push_back(tracked_d);
    rec_.tracked_x.push_back(tracked_x);
    rec_.iterations = k;

    if (k % cfg_.record_every == 0) snapshot(k, s);
    last_.assign(s.begin(), s.end());

    const auto& t = cfg_.termination;
    const bool ok = std::abs(dev / n) < t.eps_d && spread_x(s) < t.eps_x;
    streak_ = ok ? streak_ + 1 : 0;
    return t.early_stop && streak_ >= t.patience;
  }

  RunRecord finish(bool stopped_early) {
    if (rec_.snapshots.empty() || rec_.snapshots.back().iter != rec_.iterations) {
      snapshot(rec_.iterations, last_);
    }
    rec_.stopped_early = stopped_early;
    const auto& t = cfg_.termination;
    rec_.converged = std::abs(rec_.d_bar.back()) < t.eps_d && spread_x(last_) < t.eps_x;
    return std::move(rec_);
  }

 private:
  void snapshot(int k, std::span<const AgentState> s) {
    Snapshot snap;
    snap.iter = k;
    for (const auto& a : s) {
      snap.y.push_back(a.y);
      snap.d.push_back(a.d);
      snap.x.push_back(a.x);
    }
    rec_.snapshots.push_back(std::move(snap));
  }

  const Problem& problem_;
  const RunConfig& cfg_;
  RunRecord rec_;
  std::vector<AgentState> last_;
  int streak_ = 0;
};

std::vector<AgentState> initial_states(const Problem& problem, const std::vector<double>& y0) {
  std::vector<AgentState> s(problem.size());
  for (int i = 0; i < problem.size(); ++i) {
    const auto& a = problem.agents[i];
    s[i] = {y0[i], a.weight * y0[i] - a.demand, 0.0};
  }
  return s;
}

void update(const Problem& p, std::span<const AgentState> prev,
            std::span<const kernels::Aggregate> agg, double c, std::span<AgentState> next,
            Execution exec) {
  if (exec == Execution::OpenMP) {
    kernels::update_omp(p, prev, agg, c, next);
  } else {
    kernels::update_serial(p, prev, agg, c, next);
  }
}

void consensus(const kernels::SparseWeights& w, std::span<const AgentState> src,
               std::span<kernels::Aggregate> out, Execution exec) {
  if (exec == Execution::OpenMP) {
    kernels::consensus_omp(w, src, out);
  } else {
    kernels::consensus_serial(w, src, out);
  }
}

int common_delay(const DelaySchedule& delays) {
  for (const auto& [e, t] : delays.tau) {
    if (t != delays.self_delay) {
      throw Error("homogeneous variant needs one delay on every link and self-loop");
    }
  }
  return delays.self_delay;
}

}  // namespace

std::vector<double> initial_allocation(const Problem& problem, const RunConfig& config) {
  if (!config.y0.empty()) return config.y0;
  std::mt19937_64 rng(config.seed);
  std::vector<double> y0(problem.size());
  for (int i = 0; i < problem.size(); ++i) {
    const Box& b = problem.agents[i].box;
    y0[i] = std::uniform_real_distribution<double>(b.lo, b.hi)(rng);
    y0[i] = b.clamp(y0[i]);
  }
  return y0;
}

RunRecord run(const Problem& problem, const Network& net, const DelaySchedule& delays,
              const RunConfig& cfg) {
  if (cfg.variant == Variant::Parallel) {
    if (delays.tau_bar != 0) throw Error("parallel variant requires zero delays");
    return run_parallel(problem, cfg);
  }
  validate_config(problem, cfg);
  if (net.size() != problem.size()) throw Error("network and problem sizes differ");
  if (cfg.variant == Variant::Distributed &&
      (delays.self_delay != 0 ||
       std::any_of(delays.tau.begin(), delays.tau.end(), [](auto& kv) { return kv.second != 0; }))) {
    throw Error("distributed variant requires zero delays");
  }

  const int n = problem.size();
  const auto y0 = initial_allocation(problem, cfg);
  std::vector<AgentState> prev = initial_states(problem, y0);
  std::vector<AgentState> next(n);
  std::vector<kernels::Aggregate> agg(n);
  const auto weights = kernels::SparseWeights::from(net);

  Recorder rec(problem, cfg);
  auto mean = [n](std::span<const AgentState> s, auto field) {
    double t = 0.0;
    for (const auto& a : s) t += field(a);
    return t / n;
  };
  auto get_d = [](const AgentState& a) { return a.d; };
  auto get_x = [](const AgentState& a) { return a.x; };

  bool early = false;
  switch (cfg.variant) {
    case Variant::Distributed: {
      early = rec.push(0, prev, mean(prev, get_d), mean(prev, get_x));
      for (int k = 0; k < cfg.max_iters && !early; ++k) {
        consensus(weights, prev, agg, cfg.execution);
        try {
          update(problem, prev, agg, cfg.c, next, cfg.execution);
        } catch (const Error& e) {
          throw Error(fmt::format("iteration {}: {}", k, e.what()));
        }
        early = rec.push(k + 1, next, mean(next, get_d), mean(next, get_x));
        std::swap(prev, next);
      }
      break;
    }
    case Variant::Homogeneous: {
      const int tau = common_delay(delays);
      // history.front() is the state tau rounds back; before time 0 only y is known.
      std::deque<std::vector<AgentState>> history;
      std::vector<AgentState> pre(n);
      for (int i = 0; i < n; ++i) pre[i] = {y0[i], 0.0, 0.0};
      for (int s = 0; s < tau; ++s) history.push_back(pre);
      history.push_back(prev);
      auto tracked = [&](auto field) {
        double t = 0.0;
        for (const auto& st : history) t += mean(st, field);
        return t;
      };
      early = rec.push(0, prev, tracked(get_d), tracked(get_x));
      for (int k = 0; k < cfg.max_iters && !early; ++k) {
        consensus(weights, history.front(), agg, cfg.execution);
        try {
          update(problem, prev, agg, cfg.c, next, cfg.execution);
        } catch (const Error& e) {
          throw Error(fmt::format("iteration {}: {}", k, e.what()));
        }
        history.pop_front();
        history.push_back(next);
        early = rec.push(k + 1, next, tracked(get_d), tracked(get_x));
        std::swap(prev, next);
      }
      break;
    }
    case Variant::Dtac: {
      DelayedExchange exchange(net, delays, prev);
      early = rec.push(0, prev, exchange.pending_d(), exchange.pending_x());
      for (int k = 0; k < cfg.max_iters && !early; ++k) {
        exchange.gather(k, agg, cfg.execution);
        try {
          update(problem, prev, agg, cfg.c, next, cfg.execution);
        } catch (const Error& e) {
          throw Error(fmt::format("iteration {}: {}", k, e.what()));
        }
        exchange.publish(k + 1, next, cfg.execution);
        early = rec.push(k + 1, next, exchange.pending_d(), exchange.pending_x());
        std::swap(prev, next);
      }
      break;
    }
    case Variant::Parallel: break;
  }
  return rec.finish(early);
}

RunRecord run_parallel(const Problem& problem, const RunConfig& cfg) {
  validate_config(problem, cfg);
  const int n = problem.size();
  const auto y0 = initial_allocation(problem, cfg);

  std::vector<AgentState> prev(n), next(n);
  std::vector<kernels::Aggregate> agg(n);
  auto deviation = [&](std::span<const AgentState> s) {
    double t = 0.0;
    for (int i = 0; i < n; ++i) t += problem.agents[i].weight * s[i].y - problem.agents[i].demand;
    return t / n;
  };
  for (int i = 0; i < n; ++i) prev[i].y = y0[i];
  double d = deviation(prev);
  double x = 0.0;
  for (auto& s : prev) s = {s.y, d, x};

  Recorder rec(problem, cfg);
  bool early = rec.push(0, prev, d, x);
  for (int k = 0; k < cfg.max_iters && !early; ++k) {
    std::fill(agg.begin(), agg.end(), kernels::Aggregate{x, d});
    try {
      update(problem, prev, agg, cfg.c, next, cfg.execution);
    } catch (const Error& e) {
      throw Error(fmt::format("iteration {}: {}", k, e.what()));
    }
    d = deviation(next);
    x = x + cfg.c * d;
    for (auto& s : next) s = {s.y, d, x};
    early = rec.push(k + 1, next, d, x);
    std::swap(prev, next);
  }
  return rec.finish(early);
}

}  // namespace dtac
