#include "dtac/kernels.hpp"

#include "dtac/error.hpp"

#include <fmt/format.h>

#include <limits>

namespace dtac::kernels {

SparseWeights SparseWeights::from(const Network& net) {
  SparseWeights w;
  const int n = net.size();
  w.offsets.reserve(n + 1);
  w.offsets.push_back(0);
  for (int i = 0; i < n; ++i) {
    const auto& nb = net.neighbors(i);
    bool self_done = false;
    for (int j : nb) {
      if (!self_done && j > i) {
        w.cols.push_back(i);
        w.vals.push_back(net.weight(i, i));
        self_done = true;
      }
      w.cols.push_back(j);
      w.vals.push_back(net.weight(i, j));
    }
    if (!self_done) {
      w.cols.push_back(i);
      w.vals.push_back(net.weight(i, i));
    }
    w.offsets.push_back(static_cast<int>(w.cols.size()));
  }
  return w;
}

AgentState step_agent(const AgentSpec& spec, const AgentState& prev, Aggregate agg, double c) {
  AgentState next;
  next.y = local_argmin(spec, agg.eta, prev.y, agg.delta, c);
  next.d = agg.delta + spec.weight * (next.y - prev.y);
  next.x = agg.eta + c * next.d;
  return next;
}

namespace {

inline Aggregate row_sum(const SparseWeights& w, std::span<const AgentState> src, int i) {
  Aggregate a;
  for (int p = w.offsets[i]; p < w.offsets[i + 1]; ++p) {
    const AgentState& s = src[w.cols[p]];
    a.eta += w.vals[p] * s.x;
    a.delta += w.vals[p] * s.d;
  }
  return a;
}

}  // namespace

void consensus_serial(const SparseWeights& w, std::span<const AgentState> src,
                      std::span<Aggregate> out) {
  const int n = w.rows();
  for (int i = 0; i < n; ++i) out[i] = row_sum(w, src, i);
}

void consensus_omp(const SparseWeights& w, std::span<const AgentState> src,
                   std::span<Aggregate> out) {
  const int n = w.rows();
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (int i = 0; i < n; ++i) out[i] = row_sum(w, src, i);
}

void update_serial(const Problem& problem, std::span<const AgentState> prev,
                   std::span<const Aggregate> agg, double c, std::span<AgentState> next) {
  const int n = problem.size();
  for (int i = 0; i < n; ++i) {
    try {
      next[i] = step_agent(problem.agents[i], prev[i], agg[i], c);
    } catch (const Error& e) {
      throw Error(fmt::format("agent {}: {}", i, e.what()));
    }
  }
}

void update_omp(const Problem& problem, std::span<const AgentState> prev,
                std::span<const Aggregate> agg, double c, std::span<AgentState> next) {
  const int n = problem.size();
  // Exceptions must not cross the parallel region; keep the lowest failing agent.
  int failed = std::numeric_limits<int>::max();
  std::string message;
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (int i = 0; i < n; ++i) {
    try {
      next[i] = step_agent(problem.agents[i], prev[i], agg[i], c);
    } catch (const std::exception& e) {
#pragma omp critical(dtac_update_error)
      if (i < failed) {
        failed = i;
        message = e.what();
      }
    }
  }
  if (failed != std::numeric_limits<int>::max()) {
    throw Error(fmt::format("agent {}: {}", failed, message));
  }
}

}  // namespace dtac::kernels
