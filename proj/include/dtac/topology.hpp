#pragma once

// Networks, consensus weights, link delays and the augmented delay matrices
// used to analyse delayed consensus.

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace dtac {

/// Unordered agent pair, stored with i < j.
struct Edge {
  int i = 0;
  int j = 0;

  Edge() = default;
  Edge(int a, int b) : i(a < b ? a : b), j(a < b ? b : a) {}

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected connected graph with a symmetric, bi-stochastic, PSD weight matrix.
class Network {
 public:
  Network() = default;
  Network(int n, std::vector<Edge> edges, Eigen::MatrixXd weights);

  int size() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Eigen::MatrixXd& weights() const { return W_; }
  double weight(int i, int j) const { return W_(i, j); }
  bool has_edge(int i, int j) const;

  /// Neighbours of i in increasing index order (excluding i).
  const std::vector<int>& neighbors(int i) const { return adj_[i]; }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  Eigen::MatrixXd W_;
  std::vector<std::vector<int>> adj_;
};

/// Max-degree (Metropolis-style) weights followed by the lazy step W <- (W+I)/2.
Network build_weights(std::span<const Edge> edges, int n);

/// Validates a user-supplied weight matrix. Edges are the non-zero off-diagonal entries.
Network build_weights_custom(const Eigen::MatrixXd& raw);

/// True when the undirected graph on n nodes is connected.
bool is_connected(int n, std::span<const Edge> edges);

/// Second-smallest eigenvalue of the combinatorial graph Laplacian.
double algebraic_connectivity(int n, std::span<const Edge> edges);

// --- delays ---------------------------------------------------------------

namespace delay_mode {
struct UniformRandom {};
struct Constant {
  int tau = 0;
};
/// Per-link delays. Both orientations of a link may be listed but must agree.
struct Explicit {
  struct Entry {
    int i = 0;
    int j = 0;
    int tau = 0;
  };
  std::vector<Entry> entries;
};
}  // namespace delay_mode

using DelayMode =
    std::variant<delay_mode::UniformRandom, delay_mode::Constant, delay_mode::Explicit>;

/// Time-invariant, symmetric integer link delays bounded by tau_bar.
///
/// self_delay is the delay a node applies to its own state. It is zero for
/// heterogeneous schedules; a constant(tau) schedule delays every term,
/// including the node's own, which is the homogeneous protocol.
struct DelaySchedule {
  std::map<Edge, int> tau;
  int tau_bar = 0;
  int self_delay = 0;

  int delay(int i, int j) const;
  bool homogeneous() const;
};

DelaySchedule assign_delays(const Network& net, int tau_bar, const DelayMode& mode,
                            std::uint64_t seed);

// --- augmented system -------------------------------------------------------

/// Augmented delay system of size n(tau_bar+1).
struct AugmentedSystem {
  int n = 0;
  int tau_bar = 0;
  Eigen::MatrixXd W;
  /// Delay class of every ordered pair. Pairs without a link use the self delay.
  Eigen::MatrixXi pair_delay;
  std::vector<Eigen::MatrixXd> P;  ///< 0-1 delay matrices P_0..P_tau_bar over links and self-loops
  Eigen::MatrixXd PW_bar;          ///< first block row P_r o W, identity sub-diagonal
  Eigen::MatrixXd P1_bar;          ///< augmented (1/n) ones, same delay pattern
  Eigen::MatrixXd PW_tilde;        ///< PW_bar - P1_bar

  int dim() const { return n * (tau_bar + 1); }

  /// Block selector Xi_r (n x n(tau_bar+1)), 0-based block index.
  Eigen::MatrixXd selection(int block) const;
  /// Unit vector u_r of length tau_bar+1, 0-based.
  Eigen::VectorXd unit(int block) const;
  /// W - (1/n) ones.
  Eigen::MatrixXd W_tilde() const;

  /// Single-delay-class matrix: only P_r o W_tilde in the first block row and
  /// sub-diagonal identity blocks scaled by 1/(tau_bar+1).
  Eigen::MatrixXd single_class(int r) const;
};

AugmentedSystem build_augmented(const Network& net, const DelaySchedule& delays);

struct SpectralReport {
  double rho_W_tilde = 0.0;
  double rho_PW_tilde = 0.0;
  double predicted = 0.0;  ///< rho(W_tilde)^(1/(tau_bar+1))
  bool homogeneous = false;
  bool stable = false;             ///< rho(PW_tilde) < 1
  bool within_bound = false;       ///< rho(PW_tilde) <= predicted + tol
  bool matches_prediction = false; ///< homogeneous only: |rho - predicted| <= tol
};

inline constexpr double kSpectralTol = 1e-9;

SpectralReport spectral_radius_check(const AugmentedSystem& sys);

/// Largest eigenvalue modulus of a symmetric matrix.
double symmetric_spectral_radius(const Eigen::MatrixXd& m);
/// Largest eigenvalue modulus of a general square matrix.
double spectral_radius(const Eigen::MatrixXd& m);

}  // namespace dtac
