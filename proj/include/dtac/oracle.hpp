#pragma once

// Centralised reference solution of the allocation problem via its scalar
// dual: g(x) = sum_i (a_i y_i*(x) - b_i) is non-increasing in x, so the
// optimal multiplier is found by bracketing and bisection.

#include "dtac/costs.hpp"

#include <cstdint>
#include <vector>

namespace dtac {

struct OracleSolution {
  std::vector<double> y_star;
  double x_star = 0.0;
  double objective = 0.0;
  double residual = 0.0;   ///< |sum(a_i y_i* - b_i)|
  bool unique_dual = true; ///< false when g vanishes on an interval (midpoint returned)
  double dual_low = 0.0;   ///< ends of the interval where |g| <= tolerance
  double dual_high = 0.0;
};

inline constexpr double kOracleTol = 1e-10;
inline constexpr double kOracleBracketLimit = 1e9;

/// sum_i (a_i y_i*(x) - b_i)
double dual_slope(const Problem& problem, double x);

/// sum_i f_i(x), the concave dual function.
double dual_function(const Problem& problem, double x);

/// Throws "infeasible or degenerate scenario" when g keeps its sign up to |x| = 1e9.
OracleSolution solve_dual_bisection(const Problem& problem, double tol = kOracleTol);

/// Largest |phi_i'(y_i*) + a_i x*| over agents strictly inside their box.
double stationarity_violation(const Problem& problem, const OracleSolution& sol);

/// Euclidean projection of v onto {y in boxes : sum a_i y_i = sum b_i}.
std::vector<double> project_feasible(const Problem& problem, const std::vector<double>& v);

/// Feasible, box-respecting points built by projecting uniform draws.
std::vector<std::vector<double>> random_feasible_candidates(const Problem& problem, int count,
                                                            std::uint64_t seed);

/// Throws when no allocation inside the boxes satisfies the coupling constraint.
void check_feasible(const Problem& problem);

}  // namespace dtac
