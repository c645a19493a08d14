#pragma once

// Shared fixtures for the unit and acceptance suites.

#include "dtac/costs.hpp"
#include "dtac/engine.hpp"
#include "dtac/scenario.hpp"
#include "dtac/topology.hpp"

#include <cmath>
#include <functional>
#include <quadmath.h>
#include <random>
#include <string>
#include <vector>

namespace dtac::test {

inline std::string scenario_path(const std::string& name) {
  return std::string(DTAC_SCENARIO_DIR) + "/" + name + ".scn";
}

inline const std::vector<std::string>& shipped_scenarios() {
  static const std::vector<std::string> names = {
      "fig1_tau0",   "fig1_tau3",   "fig1_tau10",     "fig1_homogeneous",
      "fig2_battery", "fig3_logexp", "random8_hetero"};
  return names;
}

/// Erdos-Renyi graph, redrawn until connected.
inline std::vector<Edge> random_connected_edges(int n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  for (;;) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (coin(rng)) edges.emplace_back(i, j);
      }
    }
    if (is_connected(n, edges)) return edges;
  }
}

inline Network random_network(int n, std::mt19937_64& rng, double p = 0.5) {
  return build_weights(random_connected_edges(n, p, rng), n);
}

inline std::vector<Edge> cycle_edges(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return e;
}

/// Cycle with self weight 0.5 and neighbour weight 0.25.
inline Network half_quarter_cycle(int n) {
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    W(i, i) = 0.5;
    W(i, (i + 1) % n) = 0.25;
    W((i + 1) % n, i) = 0.25;
  }
  return build_weights_custom(W);
}

/// Quadratic costs with gamma in [0.02, 0.05], beta in [-4, 1], boxes [0, 100].
inline Problem random_quadratic_problem(int n, double total_demand, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> g(0.02, 0.05), b(-4.0, 1.0);
  Problem p;
  for (int i = 0; i < n; ++i) {
    AgentSpec a;
    a.cost = Quadratic{g(rng), b(rng), 0.0};
    a.demand = total_demand / n;
    a.box = {0.0, 100.0};
    p.agents.push_back(a);
  }
  return p;
}

using quad = __float128;

/// Golden-section minimiser, independent of the library's bisection. Runs in
/// quad precision: comparing function values only resolves the minimiser to
/// about sqrt(epsilon), which is ~1e-8 in double and ~3e-9 in long double.
inline double golden_section(const std::function<quad(quad)>& f, double lo, double hi,
                             double tol = 1e-12) {
  const quad r = (sqrtq(5.0Q) - 1) / 2;
  quad a = lo, b = hi;
  quad c = b - r * (b - a), d = a + r * (b - a);
  quad fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
    if (c >= d) break;
  }
  return static_cast<double>((a + b) / 2);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Largest per-state difference between two runs over every recorded iteration.
inline double trajectory_distance(const RunRecord& a, const RunRecord& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < std::min(a.snapshots.size(), b.snapshots.size()); ++k) {
    m = std::max(m, max_abs_diff(a.snapshots[k].y, b.snapshots[k].y));
    m = std::max(m, max_abs_diff(a.snapshots[k].d, b.snapshots[k].d));
    m = std::max(m, max_abs_diff(a.snapshots[k].x, b.snapshots[k].x));
  }
  if (a.snapshots.size() != b.snapshots.size()) return INFINITY;
  return m;
}

}  // namespace dtac::test
