#pragma once

// Synchronous-round simulation of the ADMM allocation protocols:
//   parallel     - semi-centralised ADMM with one shared dual and deviation
//   distributed  - consensus-tracking ADMM without delays
//   homogeneous  - every term (the node's own included) delayed by one common tau
//   dtac         - per-link delays delivered through FIFO link buffers

#include "dtac/costs.hpp"
#include "dtac/kernels.hpp"
#include "dtac/record.hpp"
#include "dtac/topology.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dtac {

enum class Variant { Parallel, Distributed, Homogeneous, Dtac };

std::string to_string(Variant v);
Variant parse_variant(const std::string& name);

struct Termination {
  /// Stop once |d_bar| < eps_d and max_i x_i - min_i x_i < eps_x held for
  /// `patience` consecutive rounds. Without early stop the tolerances only
  /// classify the final state.
  bool early_stop = false;
  double eps_d = 1e-3;
  double eps_x = 1e-2;
  int patience = 50;
};

struct RunConfig {
  Variant variant = Variant::Dtac;
  double c = 5.0;
  int max_iters = 10000;
  Termination termination;
  std::uint64_t seed = 0;
  int record_every = 1;
  /// Initial allocation. Empty means uniform random inside each box, drawn from `seed`.
  std::vector<double> y0;
  Execution execution = Execution::Serial;
};

/// Receiver-side FIFO for one directed link with a constant delay.
///
/// A payload pushed at iteration s becomes readable at s + delay and stays
/// current until the next one is delivered. Before the first delivery the
/// receiver sees `pre_history`.
class LinkBuffer {
 public:
  LinkBuffer(int delay, AgentState pre_history);

  void push(int send_iter, const AgentState& payload);
  const AgentState& read(int iter);

  int delay() const { return delay_; }
  std::size_t pending() const { return queue_.size(); }

  /// Sum of a field over payloads not yet consumed.
  template <class F>
  double pending_sum(F field) const {
    double s = 0.0;
    for (const auto& m : queue_) s += field(m.payload);
    return s;
  }

 private:
  struct Message {
    int sent;
    AgentState payload;
  };
  int delay_;
  std::deque<Message> queue_;
  AgentState current_;
};

/// All link buffers of a network, grouped by receiver. Incoming links of each
/// node are ordered by sender index and include the node's own state.
class DelayedExchange {
 public:
  DelayedExchange(const Network& net, const DelaySchedule& delays,
                  std::span<const AgentState> initial);

  void gather(int iter, std::span<kernels::Aggregate> out, Execution exec);
  void publish(int iter, std::span<const AgentState> states, Execution exec);

  /// (1/n) sum_i sum_j W_ij * (d or x payloads queued on link j -> i).
  double pending_d() const;
  double pending_x() const;

 private:
  struct Incoming {
    int sender;
    double weight;
    LinkBuffer buffer;
  };
  std::vector<std::vector<Incoming>> inbox_;
};

/// Runs the distributed variants (distributed, homogeneous, dtac); the
/// parallel variant is forwarded to run_parallel.
RunRecord run(const Problem& problem, const Network& net, const DelaySchedule& delays,
              const RunConfig& config);

/// Semi-centralised ADMM: d and x are shared scalars.
RunRecord run_parallel(const Problem& problem, const RunConfig& config);

/// Initial allocation used by a run: config.y0 if given, otherwise a seeded
/// uniform draw inside each box.
std::vector<double> initial_allocation(const Problem& problem, const RunConfig& config);

}  // namespace dtac
