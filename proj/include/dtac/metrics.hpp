#pragma once

// Error, feasibility and Lyapunov diagnostics over a RunRecord.

#include "dtac/costs.hpp"
#include "dtac/oracle.hpp"
#include "dtac/record.hpp"

#include <optional>
#include <vector>

namespace dtac {

struct TailStats {
  double last = 0.0;
  double tail_max = 0.0;  ///< max over the last `window` recorded entries
};

/// Per recorded snapshot: ||d - d_bar 1||, ||x - x_bar 1|| and |d_bar|.
struct ErrorSeries {
  std::vector<int> iter;
  std::vector<double> e_d;
  std::vector<double> e_x;
  std::vector<double> d_bar_abs;
  TailStats e_d_tail, e_x_tail, d_bar_tail;
};

ErrorSeries error_series(const RunRecord& record, int window = 100);

inline constexpr int kBurnIn = 100;
inline constexpr double kLyapunovSlack = 1e-6;

struct LyapunovSeries {
  std::vector<int> iter;
  std::vector<double> value;
  double max_increase = 0.0;  ///< largest S(k+1) - S(k) after burn-in
  double max_excess = 0.0;    ///< largest S(k) - S(0) after burn-in
  bool non_increasing = false;
  bool bounded = false;
};

/// S = ||x - x* 1||^2 + c^2 ||y - d_bar 1 - y*||^2 per snapshot. With
/// `window` > 0 each value is summed over the last window+1 snapshots, the
/// augmented form for a delay bound of `window` (needs record_every = 1).
LyapunovSeries lyapunov_series(const RunRecord& record, const std::optional<OracleSolution>& oracle,
                               int window = 0, int burn_in = kBurnIn,
                               double slack = kLyapunovSlack);

struct OptimalityGap {
  double primal = 0.0;     ///< ||y - y*||_inf
  double dual = 0.0;       ///< max_i |x_i - x*|
  double objective = 0.0;  ///< |Phi(y) - Phi(y*)|
};

OptimalityGap optimality_gap(const Problem& problem, const Snapshot& state,
                             const OracleSolution& oracle);
OptimalityGap optimality_gap(const Problem& problem, const RunRecord& record,
                             const OracleSolution& oracle);

/// Largest violations of the bookkeeping identities over a run.
struct IdentityResiduals {
  double d_bar = 0.0;        ///< |d_bar - (1/n) sum(a y - b)| recomputed from snapshots
  double tracked_d = 0.0;    ///< |tracked d mass - d_bar|
  double tracked_x = 0.0;    ///< |T_x(k+1) - T_x(k) - c mean d(k+1)|
  double mean_d = 0.0;       ///< |mean d - d_bar|; zero only without delays
  double mean_dual = 0.0;    ///< |x_bar(k+1) - x_bar(k) - c d_bar(k+1)|; zero only without delays
};

IdentityResiduals identity_residuals(const RunRecord& record);

}  // namespace dtac
