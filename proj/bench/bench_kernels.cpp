// Serial vs OpenMP timing of the per-round kernels and of a full delayed run.
//
//   bench_kernels [n] [rounds]

#include "dtac/engine.hpp"
#include "dtac/kernels.hpp"
#include "dtac/topology.hpp"

#include <fmt/core.h>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <random>
#include <vector>

using namespace dtac;

namespace {

template <class F>
double seconds(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Ring plus a few random chords; max-degree weights.
Network chordal_ring(int n, std::mt19937_64& rng) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int k = 0; k < n; ++k) {
    const int a = pick(rng), b = pick(rng);
    if (a != b) edges.emplace_back(a, b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return build_weights(edges, n);
}

Problem logexp_problem(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> w(0.02, 0.06), ctr(40, 100), sl(0.05, 0.2), sh(40, 90);
  Problem p;
  for (int i = 0; i < n; ++i) {
    AgentSpec a;
    a.cost = LogExp{w(rng), ctr(rng), sl(rng), sh(rng)};
    a.demand = 50.0;
    a.box = {0.0, 100.0};
    p.agents.push_back(a);
  }
  return p;
}

void report(const char* what, double serial, double omp) {
  fmt::print("{:<22} serial {:9.4f} s   openmp {:9.4f} s   speedup {:5.2f}x\n", what, serial, omp,
             serial / omp);
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 2000;
  const int rounds = argc > 2 ? std::atoi(argv[2]) : 200;
  fmt::print("n = {}, rounds = {}, threads = {}\n", n, rounds, omp_get_max_threads());

  std::mt19937_64 rng(1);
  const Network net = chordal_ring(n, rng);
  const Problem problem = logexp_problem(n, rng);
  const auto w = kernels::SparseWeights::from(net);

  std::vector<AgentState> states(n);
  std::uniform_real_distribution<double> u(0, 100);
  for (auto& s : states) s = {u(rng), u(rng) - 50, u(rng) - 50};
  std::vector<kernels::Aggregate> agg(n);
  std::vector<AgentState> next(n);

  const double cs = seconds([&] {
    for (int r = 0; r < rounds; ++r) kernels::consensus_serial(w, states, agg);
  });
  const double co = seconds([&] {
    for (int r = 0; r < rounds; ++r) kernels::consensus_omp(w, states, agg);
  });
  report("consensus", cs, co);

  const double us = seconds([&] {
    for (int r = 0; r < rounds; ++r) kernels::update_serial(problem, states, agg, 1.0, next);
  });
  const double uo = seconds([&] {
    for (int r = 0; r < rounds; ++r) kernels::update_omp(problem, states, agg, 1.0, next);
  });
  report("update (logexp)", us, uo);

  const auto delays = assign_delays(net, 5, delay_mode::UniformRandom{}, 2);
  RunConfig cfg;
  cfg.c = 1.0;
  cfg.max_iters = rounds;
  cfg.record_every = rounds;
  cfg.y0.assign(n, 25.0);
  RunRecord serial_rec, omp_rec;
  const double rs = seconds([&] { serial_rec = run(problem, net, delays, cfg); });
  cfg.execution = Execution::OpenMP;
  const double ro = seconds([&] { omp_rec = run(problem, net, delays, cfg); });
  report("dtac run", rs, ro);
  fmt::print("identical final state: {}\n",
             serial_rec.last().y == omp_rec.last().y && serial_rec.last().x == omp_rec.last().x);
  return 0;
}
