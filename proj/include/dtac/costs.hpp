#pragma once

// Per-agent convex costs and the scalar subproblems solved at every node.

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace dtac {

/// gamma*y^2 + beta*y + alpha
struct Quadratic {
  double gamma = 0.0;
  double beta = 0.0;
  double alpha = 0.0;
};

/// 0.5*weight*(y - center)^2 + log(1 + exp(slope*(y - shift)))
struct LogExp {
  double weight = 0.0;
  double center = 0.0;
  double slope = 0.0;
  double shift = 0.0;
};

/// User-supplied convex cost. The subgradient must be non-decreasing.
struct Custom {
  std::function<double(double)> value;
  std::function<double(double)> subgradient;
};

using CostModel = std::variant<Quadratic, LogExp, Custom>;

double evaluate(const CostModel& cost, double y);
double subgradient(const CostModel& cost, double y);
std::string cost_name(const CostModel& cost);

struct Box {
  double lo = 0.0;
  double hi = 0.0;

  double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
  bool contains(double v) const { return v >= lo && v <= hi; }
  double width() const { return hi - lo; }
};

/// One agent: cost, demand share b_i, box [m_i, M_i] and coupling weight a_i.
struct AgentSpec {
  CostModel cost = Quadratic{};
  double demand = 0.0;
  Box box;
  double weight = 1.0;
};

/// Resource allocation problem: min sum phi_i(y_i) s.t. sum(a_i y_i - b_i) = 0, y_i in box_i.
struct Problem {
  std::vector<AgentSpec> agents;

  int size() const { return static_cast<int>(agents.size()); }
  double objective(const std::vector<double>& y) const;
  /// sum_i (a_i y_i - b_i)
  double coupling_residual(const std::vector<double>& y) const;
};

/// Throws dtac::Error when an agent violates its invariants (empty box,
/// zero weight, negative curvature, non-finite parameters).
void validate_agent(const AgentSpec& spec);

inline constexpr double kArgminTol = 1e-12;
inline constexpr int kArgminMaxIter = 200;

/// Minimiser of a convex scalar function on a box, given its non-decreasing
/// subgradient. Bisection to `tol` in y; throws "argmin failed" when the
/// iteration cap is hit first.
double minimize_on_box(const std::function<double(double)>& slope, Box box,
                       double tol = kArgminTol, int max_iter = kArgminMaxIter);

/// argmin over the box of
///   phi(y) + eta*a*y + (c/2)*(a*y - a*y_prev + delta)^2.
/// Quadratic costs use the closed form; everything else bisects.
double local_argmin(const AgentSpec& spec, double eta, double y_prev, double delta, double c);

/// Same objective, always solved by bisection on the subgradient.
double local_argmin_bisection(const AgentSpec& spec, double eta, double y_prev, double delta,
                              double c);

struct DualValue {
  double value = 0.0;      ///< f_i(x)
  double minimizer = 0.0;  ///< y_i*(x)
};

/// f_i(x) = min over the box of phi(y) + x*(a*y - b).
DualValue dual_value(const AgentSpec& spec, double x);

}  // namespace dtac
