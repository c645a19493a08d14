#include "dtac/metrics.hpp"

#include "dtac/error.hpp"


#include <algorithm>
#include <cmath>
#include <limits>

namespace dtac {

namespace {

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += e;
  return s / static_cast<double>(v.size());
}

double deviation(const RunRecord& r, const Snapshot& s) {
  double t = 0.0;
  for (int i = 0; i < r.n; ++i) t += r.weights[i] * s.y[i] - r.demands[i];
  return t / r.n;
}

TailStats tail(const std::vector<double>& v, int window) {
  TailStats t;
  if (v.empty()) return t;
  t.last = v.back();
  const std::size_t from = v.size() > static_cast<std::size_t>(window) ? v.size() - window : 0;
  t.tail_max = *std::max_element(v.begin() + from, v.end());
  return t;
}

}  // namespace

ErrorSeries error_series(const RunRecord& record, int window) {
  if (record.snapshots.empty()) throw Error("run record is empty");
  ErrorSeries out;
  for (const auto& s : record.snapshots) {
    const double d_bar = deviation(record, s);
    const double x_bar = mean(s.x);
    double ed = 0.0, ex = 0.0;
    for (int i = 0; i < record.n; ++i) {
      ed += (s.d[i] - d_bar) * (s.d[i] - d_bar);
      ex += (s.x[i] - x_bar) * (s.x[i] - x_bar);
    }
    out.iter.push_back(s.iter);
    out.e_d.push_back(std::sqrt(ed));
    out.e_x.push_back(std::sqrt(ex));
    out.d_bar_abs.push_back(std::abs(d_bar));
  }
  out.e_d_tail = tail(out.e_d, window);
  out.e_x_tail = tail(out.e_x, window);
  out.d_bar_tail = tail(out.d_bar_abs, window);
  return out;
}

LyapunovSeries lyapunov_series(const RunRecord& record, const std::optional<OracleSolution>& oracle,
                               int window, int burn_in, double slack) {
  if (!oracle) throw Error("Lyapunov series needs an oracle solution");
  if (record.snapshots.empty()) throw Error("run record is empty");
  if (static_cast<int>(oracle->y_star.size()) != record.n) {
    throw Error("oracle solution size does not match the run");
  }
  const double c2 = record.c * record.c;
  std::vector<double> single;
  single.reserve(record.snapshots.size());
  for (const auto& s : record.snapshots) {
    const double d_bar = deviation(record, s);
    double v = 0.0;
    for (int i = 0; i < record.n; ++i) {
      const double ex = s.x[i] - oracle->x_star;
      const double ez = s.y[i] - d_bar - oracle->y_star[i];
      v += ex * ex + c2 * ez * ez;
    }
    single.push_back(v);
  }

  LyapunovSeries out;
  if (window > 0) {
    for (std::size_t k = 1; k < record.snapshots.size(); ++k) {
      if (record.snapshots[k].iter != record.snapshots[k - 1].iter + 1) {
        throw Error("augmented Lyapunov series needs every iteration recorded");
      }
    }
  }
  for (std::size_t k = 0; k < single.size(); ++k) {
    double v = 0.0;
    // Before time 0 the history repeats the initial state.
    for (int s = 0; s <= window; ++s) {
      v += single[k >= static_cast<std::size_t>(s) ? k - s : 0];
    }
    out.iter.push_back(record.snapshots[k].iter);
    out.value.push_back(v);
  }

  const double s0 = out.value.front();
  out.max_increase = -std::numeric_limits<double>::infinity();
  out.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < out.value.size(); ++k) {
    if (out.iter[k] < burn_in) continue;
    out.max_excess = std::max(out.max_excess, out.value[k] - s0);
    if (k + 1 < out.value.size()) {
      out.max_increase = std::max(out.max_increase, out.value[k + 1] - out.value[k]);
    }
  }
  out.non_increasing = !(out.max_increase > slack);
  out.bounded = !(out.max_excess > slack);
  return out;
}

OptimalityGap optimality_gap(const Problem& problem, const Snapshot& state,
                             const OracleSolution& oracle) {
  if (state.y.size() != oracle.y_star.size() || state.y.size() != problem.agents.size()) {
    throw Error("state, problem and oracle sizes differ");
  }
  OptimalityGap g;
  for (std::size_t i = 0; i < state.y.size(); ++i) {
    g.primal = std::max(g.primal, std::abs(state.y[i] - oracle.y_star[i]));
    g.dual = std::max(g.dual, std::abs(state.x[i] - oracle.x_star));
  }
  g.objective = std::abs(problem.objective(state.y) - oracle.objective);
  return g;
}

OptimalityGap optimality_gap(const Problem& problem, const RunRecord& record,
                             const OracleSolution& oracle) {
  if (record.snapshots.empty()) throw Error("run record is empty");
  return optimality_gap(problem, record.last(), oracle);
}

IdentityResiduals identity_residuals(const RunRecord& record) {
  IdentityResiduals r;
  for (const auto& s : record.snapshots) {
    r.d_bar = std::max(r.d_bar, std::abs(record.d_bar[s.iter] - deviation(record, s)));
  }
  const std::size_t len = record.d_bar.size();
  for (std::size_t k = 0; k < len; ++k) {
    r.tracked_d = std::max(r.tracked_d, std::abs(record.tracked_d[k] - record.d_bar[k]));
    if (k >= 1) r.mean_d = std::max(r.mean_d, std::abs(record.d_mean[k] - record.d_bar[k]));
    if (k + 1 < len) {
      const double tx = record.tracked_x[k + 1] - record.tracked_x[k] - record.c * record.d_mean[k + 1];
      const double mx = record.x_bar[k + 1] - record.x_bar[k] - record.c * record.d_bar[k + 1];
      r.tracked_x = std::max(r.tracked_x, std::abs(tx));
      r.mean_dual = std::max(r.mean_dual, std::abs(mx));
    }
  }
  return r;
}

}  // namespace dtac
