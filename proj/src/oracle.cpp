#include "dtac/oracle.hpp"

#include "dtac/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace dtac {

namespace {

constexpr int kMaxBisect = 2000;

// Boundary between a predicate that holds on the left and fails on the right.
// Returns the last point where it holds.
double last_true(const std::function<bool(double)>& pred, double lo, double hi) {
  for (int it = 0; it < kMaxBisect; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (pred(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

double dual_slope(const Problem& problem, double x) {
  double g = 0.0;
  for (const auto& a : problem.agents) g += a.weight * dual_value(a, x).minimizer - a.demand;
  return g;
}

double dual_function(const Problem& problem, double x) {
  double f = 0.0;
  for (const auto& a : problem.agents) f += dual_value(a, x).value;
  return f;
}

void check_feasible(const Problem& problem) {
  double lo = 0.0, hi = 0.0, demand = 0.0;
  for (const auto& a : problem.agents) {
    const double p = a.weight * a.box.lo;
    const double q = a.weight * a.box.hi;
    lo += std::min(p, q);
    hi += std::max(p, q);
    demand += a.demand;
  }
  if (!(demand > lo && demand < hi)) {
    throw Error(fmt::format(
        "infeasible: total demand {} is not strictly inside the reachable range [{}, {}]", demand,
        lo, hi));
  }
}

OracleSolution solve_dual_bisection(const Problem& problem, double tol) {
  if (problem.size() == 0) throw Error("problem has no agents");
  for (int i = 0; i < problem.size(); ++i) {
    try {
      validate_agent(problem.agents[i]);
    } catch (const Error& e) {
      throw Error(fmt::format("agent {}: {}", i, e.what()));
    }
  }
  auto g = [&](double x) { return dual_slope(problem, x); };

  // Expand past the region where |g| <= tol so a flat dual is bracketed on both sides.
  double x_lo = -1.0;
  while (g(x_lo) <= tol && -x_lo <= kOracleBracketLimit) x_lo *= 2.0;
  double x_hi = 1.0;
  while (g(x_hi) >= -tol && x_hi <= kOracleBracketLimit) x_hi *= 2.0;
  if (g(x_lo) < -tol || g(x_hi) > tol) throw Error("infeasible or degenerate scenario");

  // [left, right] is where |g| <= tol; it is a single point unless the dual is flat.
  const double left =
      g(x_lo) > tol ? last_true([&](double x) { return g(x) > tol; }, x_lo, x_hi) : x_lo;
  const double right =
      g(x_hi) >= -tol ? x_hi : last_true([&](double x) { return g(x) >= -tol; }, x_lo, x_hi);

  OracleSolution sol;
  sol.dual_low = std::min(left, right);
  sol.dual_high = std::max(left, right);
  sol.x_star = 0.5 * (sol.dual_low + sol.dual_high);
  sol.unique_dual = right - left <= 1e-6 * std::max(1.0, std::abs(sol.x_star));
  sol.y_star.resize(problem.size());
  for (int i = 0; i < problem.size(); ++i) {
    sol.y_star[i] = dual_value(problem.agents[i], sol.x_star).minimizer;
  }
  sol.objective = problem.objective(sol.y_star);
  sol.residual = std::abs(problem.coupling_residual(sol.y_star));
  return sol;
}

double stationarity_violation(const Problem& problem, const OracleSolution& sol) {
  double worst = 0.0;
  for (int i = 0; i < problem.size(); ++i) {
    const auto& a = problem.agents[i];
    const double y = sol.y_star[i];
    if (y <= a.box.lo || y >= a.box.hi) continue;
    worst = std::max(worst, std::abs(subgradient(a.cost, y) + a.weight * sol.x_star));
  }
  return worst;
}

std::vector<double> project_feasible(const Problem& problem, const std::vector<double>& v) {
  check_feasible(problem);
  double demand = 0.0;
  for (const auto& a : problem.agents) demand += a.demand;
  const int n = problem.size();
  auto at = [&](double lambda) {
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
      y[i] = problem.agents[i].box.clamp(v[i] - lambda * problem.agents[i].weight);
    }
    return y;
  };
  // h(lambda) = sum a_i y_i(lambda) - demand is non-increasing.
  auto h = [&](double lambda) {
    const auto y = at(lambda);
    double s = -demand;
    for (int i = 0; i < n; ++i) s += problem.agents[i].weight * y[i];
    return s;
  };
  double lo = -1.0, hi = 1.0;
  while (h(lo) < 0.0) lo *= 2.0;
  while (h(hi) > 0.0) hi *= 2.0;
  const double lambda = last_true([&](double l) { return h(l) > 0.0; }, lo, hi);
  // Pick whichever bracket end lands closer to the constraint.
  const double next = std::nextafter(lambda, hi);
  return std::abs(h(lambda)) <= std::abs(h(next)) ? at(lambda) : at(next);
}

std::vector<std::vector<double>> random_feasible_candidates(const Problem& problem, int count,
                                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    std::vector<double> v(problem.size());
    for (int i = 0; i < problem.size(); ++i) {
      const Box& b = problem.agents[i].box;
      v[i] = std::uniform_real_distribution<double>(b.lo, b.hi)(rng);
    }
    out.push_back(project_feasible(problem, v));
  }
  return out;
}

}  // namespace dtac
