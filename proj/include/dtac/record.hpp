#pragma once

#include <string>
#include <vector>

namespace dtac {

/// Agent states at one iteration.
struct Snapshot {
  int iter = 0;
  std::vector<double> y;
  std::vector<double> d;
  std::vector<double> x;
};

/// Trajectory of a run. Snapshots are decimated by record_every (the last
/// iteration is always kept); the scalar series have one entry per iteration
/// k = 0..iterations.
struct RunRecord {
  std::string variant;
  int n = 0;
  double c = 0.0;
  std::vector<double> weights;  ///< a_i
  std::vector<double> demands;  ///< b_i

  std::vector<Snapshot> snapshots;

  std::vector<double> d_bar;      ///< (1/n) sum(a_i y_i - b_i)
  std::vector<double> x_bar;      ///< mean of the x states
  std::vector<double> d_mean;     ///< mean of the d states
  std::vector<double> tracked_d;  ///< (1/n) weighted d mass not yet consumed, including in-flight
  std::vector<double> tracked_x;  ///< same for x

  int iterations = 0;
  bool stopped_early = false;
  bool converged = false;  ///< final |d_bar| < eps_d and x spread < eps_x

  const Snapshot& last() const { return snapshots.back(); }
};

}  // namespace dtac
