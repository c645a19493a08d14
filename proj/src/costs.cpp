#include "dtac/costs.hpp"

#include "dtac/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace dtac {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// log(1 + exp(z)) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(fmt::format("non-finite input: {}", what));
}

}  // namespace

double evaluate(const CostModel& cost, double y) {
  return std::visit(
      overloaded{
          [y](const Quadratic& q) { return q.gamma * y * y + q.beta * y + q.alpha; },
          [y](const LogExp& l) {
            const double r = y - l.center;
            return 0.5 * l.weight * r * r + softplus(l.slope * (y - l.shift));
          },
          [y](const Custom& c) { return c.value(y); },
      },
      cost);
}

double subgradient(const CostModel& cost, double y) {
  return std::visit(
      overloaded{
          [y](const Quadratic& q) { return 2.0 * q.gamma * y + q.beta; },
          [y](const LogExp& l) {
            return l.weight * (y - l.center) + l.slope * logistic(l.slope * (y - l.shift));
          },
          [y](const Custom& c) { return c.subgradient(y); },
      },
      cost);
}

std::string cost_name(const CostModel& cost) {
  return std::visit(overloaded{
                        [](const Quadratic&) { return std::string("quadratic"); },
                        [](const LogExp&) { return std::string("logexp"); },
                        [](const Custom&) { return std::string("custom"); },
                    },
                    cost);
}

double Problem::objective(const std::vector<double>& y) const {
  double total = 0.0;
  for (std::size_t i = 0; i < agents.size(); ++i) total += evaluate(agents[i].cost, y[i]);
  return total;
}

double Problem::coupling_residual(const std::vector<double>& y) const {
  double total = 0.0;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    total += agents[i].weight * y[i] - agents[i].demand;
  }
  return total;
}

void validate_agent(const AgentSpec& spec) {
  if (!std::isfinite(spec.box.lo) || !std::isfinite(spec.box.hi)) {
    throw Error("box bounds must be finite");
  }
  if (spec.box.lo > spec.box.hi) {
    throw Error(fmt::format("empty box [{}, {}]", spec.box.lo, spec.box.hi));
  }
  if (spec.weight == 0.0 || !std::isfinite(spec.weight)) throw Error("weight must be non-zero");
  if (!std::isfinite(spec.demand)) throw Error("demand must be finite");
  std::visit(overloaded{
                 [](const Quadratic& q) {
                   if (!(q.gamma >= 0.0)) throw Error("quadratic gamma must be >= 0");
                   if (!std::isfinite(q.beta) || !std::isfinite(q.alpha) ||
                       !std::isfinite(q.gamma)) {
                     throw Error("quadratic parameters must be finite");
                   }
                 },
                 [](const LogExp& l) {
                   if (!(l.weight >= 0.0)) throw Error("logexp weight must be >= 0");
                   if (!std::isfinite(l.center) || !std::isfinite(l.slope) ||
                       !std::isfinite(l.shift) || !std::isfinite(l.weight)) {
                     throw Error("logexp parameters must be finite");
                   }
                 },
                 [](const Custom& c) {
                   if (!c.value || !c.subgradient) {
                     throw Error("custom cost needs value and subgradient");
                   }
                 },
             },
             spec.cost);
}

double minimize_on_box(const std::function<double(double)>& slope, Box box, double tol,
                       int max_iter) {
  if (slope(box.lo) >= 0.0) return box.lo;
  if (slope(box.hi) <= 0.0) return box.hi;
  double lo = box.lo;
  double hi = box.hi;
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= tol || mid <= lo || mid >= hi) return mid;
    const double g = slope(mid);
    if (g == 0.0) return mid;
    if (g > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  throw Error("argmin failed");
}

double local_argmin_bisection(const AgentSpec& spec, double eta, double y_prev, double delta,
                              double c) {
  require_finite(eta, "eta");
  require_finite(y_prev, "y_prev");
  require_finite(delta, "delta");
  if (!(c > 0.0)) throw Error("penalty c must be positive");
  const double a = spec.weight;
  auto slope = [&](double y) {
    return subgradient(spec.cost, y) + a * eta + c * a * (a * y - a * y_prev + delta);
  };
  return minimize_on_box(slope, spec.box);
}

double local_argmin(const AgentSpec& spec, double eta, double y_prev, double delta, double c) {
  if (const auto* q = std::get_if<Quadratic>(&spec.cost)) {
    require_finite(eta, "eta");
    require_finite(y_prev, "y_prev");
    require_finite(delta, "delta");
    if (!(c > 0.0)) throw Error("penalty c must be positive");
    const double a = spec.weight;
    const double y = (c * a * a * y_prev - c * a * delta - a * eta - q->beta) /
                     (2.0 * q->gamma + c * a * a);
    return spec.box.clamp(y);
  }
  return local_argmin_bisection(spec, eta, y_prev, delta, c);
}

DualValue dual_value(const AgentSpec& spec, double x) {
  require_finite(x, "x");
  const double a = spec.weight;
  double y = 0.0;
  if (const auto* q = std::get_if<Quadratic>(&spec.cost)) {
    const double lin = q->beta + a * x;
    if (q->gamma > 0.0) {
      y = spec.box.clamp(-lin / (2.0 * q->gamma));
    } else if (lin > 0.0) {
      y = spec.box.lo;
    } else if (lin < 0.0) {
      y = spec.box.hi;
    } else {
      y = 0.5 * (spec.box.lo + spec.box.hi);
    }
  } else {
    y = minimize_on_box([&](double v) { return subgradient(spec.cost, v) + a * x; }, spec.box);
  }
  return {evaluate(spec.cost, y) + x * (a * y - spec.demand), y};
}

}  // namespace dtac
