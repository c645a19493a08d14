#pragma once

// Per-round agent kernels. Every kernel has a serial reference and an OpenMP
// version; both produce bit-identical results because each agent's update
// reads only the previous round's data and sums in a fixed neighbour order.

#include "dtac/costs.hpp"
#include "dtac/topology.hpp"

#include <span>
#include <vector>

namespace dtac {

/// (y, d, x) of one agent: primal share, feasibility tracker, local dual.
struct AgentState {
  double y = 0.0;
  double d = 0.0;
  double x = 0.0;

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

enum class Execution { Serial, OpenMP };

namespace kernels {

/// Rows of W in CSR form, self weight included, columns ascending.
struct SparseWeights {
  std::vector<int> offsets;
  std::vector<int> cols;
  std::vector<double> vals;

  static SparseWeights from(const Network& net);
  int rows() const { return static_cast<int>(offsets.size()) - 1; }
};

/// Weighted neighbour sums eta_i = sum_j W_ij x_j and delta_i = sum_j W_ij d_j.
struct Aggregate {
  double eta = 0.0;
  double delta = 0.0;
};

/// y <- local argmin, d <- delta + a(y - y_prev), x <- eta + c d.
AgentState step_agent(const AgentSpec& spec, const AgentState& prev, Aggregate agg, double c);

void consensus_serial(const SparseWeights& w, std::span<const AgentState> src,
                      std::span<Aggregate> out);
void consensus_omp(const SparseWeights& w, std::span<const AgentState> src,
                   std::span<Aggregate> out);

/// Throws dtac::Error naming the lowest failing agent.
void update_serial(const Problem& problem, std::span<const AgentState> prev,
                   std::span<const Aggregate> agg, double c, std::span<AgentState> next);
void update_omp(const Problem& problem, std::span<const AgentState> prev,
                std::span<const Aggregate> agg, double c, std::span<AgentState> next);

/// Agent count below which the OpenMP kernels run single-threaded.
inline constexpr int kParallelThreshold = 64;

}  // namespace kernels
}  // namespace dtac
