#include "dtac/topology.hpp"

#include "dtac/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace dtac {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kStochasticTol = 1e-9;
constexpr double kPsdTol = 1e-10;

std::vector<Edge> normalize_edges(std::span<const Edge> edges, int n) {
  std::set<Edge> unique;
  for (const Edge& e : edges) {
    if (e.i < 0 || e.j >= n) {
      throw Error(fmt::format("edge ({}, {}) out of range for n = {}", e.i, e.j, n));
    }
    if (e.i == e.j) throw Error(fmt::format("self-loop edge ({}, {})", e.i, e.j));
    unique.insert(e);
  }
  return {unique.begin(), unique.end()};
}

}  // namespace

Network::Network(int n, std::vector<Edge> edges, Eigen::MatrixXd weights)
    : n_(n), edges_(std::move(edges)), W_(std::move(weights)), adj_(n) {
  for (const Edge& e : edges_) {
    adj_[e.i].push_back(e.j);
    adj_[e.j].push_back(e.i);
  }
  for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
}

bool Network::has_edge(int i, int j) const {
  if (i == j) return false;
  return std::binary_search(edges_.begin(), edges_.end(), Edge(i, j));
}

bool is_connected(int n, std::span<const Edge> edges) {
  if (n <= 0) return false;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  int components = n;
  for (const Edge& e : edges) {
    int a = find(e.i), b = find(e.j);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

double algebraic_connectivity(int n, std::span<const Edge> edges) {
  if (n < 2) return 0.0;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : edges) {
    L(e.i, e.j) -= 1.0;
    L(e.j, e.i) -= 1.0;
    L(e.i, e.i) += 1.0;
    L(e.j, e.j) += 1.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(1);
}

Network build_weights(std::span<const Edge> raw_edges, int n) {
  if (n < 2) throw Error("build_weights: need at least 2 nodes");
  auto edges = normalize_edges(raw_edges, n);
  if (!is_connected(n, edges)) throw Error("graph not connected");

  std::vector<int> degree(n, 0);
  for (const Edge& e : edges) {
    ++degree[e.i];
    ++degree[e.j];
  }

  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : edges) {
    const double w = 1.0 / (std::max(degree[e.i], degree[e.j]) + 1);
    W(e.i, e.j) = w;
    W(e.j, e.i) = w;
  }
  for (int i = 0; i < n; ++i) W(i, i) = 1.0 - W.row(i).sum();

  W = 0.5 * (W + Eigen::MatrixXd::Identity(n, n));
  return Network(n, std::move(edges), std::move(W));
}

Network build_weights_custom(const Eigen::MatrixXd& raw) {
  if (raw.rows() != raw.cols() || raw.rows() == 0) {
    throw Error("weight matrix must be square and non-empty");
  }
  const int n = static_cast<int>(raw.rows());
  if (!raw.allFinite()) throw Error("weight matrix has non-finite entries");
  if ((raw - raw.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
    throw Error("weight matrix not symmetric");
  }
  Eigen::MatrixXd W = 0.5 * (raw + raw.transpose());

  if (W.minCoeff() < 0.0) throw Error("weight matrix has negative entries");
  for (int i = 0; i < n; ++i) {
    if (std::abs(W.row(i).sum() - 1.0) > kStochasticTol ||
        std::abs(W.col(i).sum() - 1.0) > kStochasticTol) {
      throw Error(fmt::format("not bi-stochastic (row/column {})", i));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTol) {
    throw Error(fmt::format("not PSD (min eigenvalue {:.3e})", es.eigenvalues().minCoeff()));
  }

  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (W(i, j) != 0.0) edges.emplace_back(i, j);
    }
  }
  if (!is_connected(n, edges)) throw Error("graph not connected");
  return Network(n, std::move(edges), std::move(W));
}

// --- delays -----------------------------------------------------------------

int DelaySchedule::delay(int i, int j) const {
  if (i == j) return self_delay;
  auto it = tau.find(Edge(i, j));
  if (it == tau.end()) throw Error(fmt::format("no delay for pair ({}, {})", i, j));
  return it->second;
}

bool DelaySchedule::homogeneous() const {
  if (self_delay != tau_bar) return false;
  return std::all_of(tau.begin(), tau.end(), [&](const auto& kv) { return kv.second == tau_bar; });
}

namespace {

struct DelayBuilder {
  const Network& net;
  int tau_bar;
  std::uint64_t seed;

  DelaySchedule operator()(const delay_mode::UniformRandom&) const {
    DelaySchedule s;
    s.tau_bar = tau_bar;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dist(0, tau_bar);
    for (const Edge& e : net.edges()) s.tau[e] = dist(rng);
    return s;
  }

  DelaySchedule operator()(const delay_mode::Constant& c) const {
    if (c.tau < 0 || c.tau > tau_bar) {
      throw Error(fmt::format("constant delay {} outside [0, {}]", c.tau, tau_bar));
    }
    DelaySchedule s;
    s.tau_bar = tau_bar;
    s.self_delay = c.tau;
    for (const Edge& e : net.edges()) s.tau[e] = c.tau;
    return s;
  }

  DelaySchedule operator()(const delay_mode::Explicit& x) const {
    DelaySchedule s;
    s.tau_bar = tau_bar;
    for (const auto& entry : x.entries) {
      if (!net.has_edge(entry.i, entry.j)) {
        throw Error(fmt::format("delay given for non-edge ({}, {})", entry.i, entry.j));
      }
      if (entry.tau < 0 || entry.tau > tau_bar) {
        throw Error(fmt::format("delay {} on ({}, {}) outside [0, {}]", entry.tau, entry.i,
                                entry.j, tau_bar));
      }
      auto [it, inserted] = s.tau.emplace(Edge(entry.i, entry.j), entry.tau);
      if (!inserted && it->second != entry.tau) {
        throw Error(fmt::format("asymmetric delay on ({}, {}): {} vs {}", entry.i, entry.j,
                                it->second, entry.tau));
      }
    }
    for (const Edge& e : net.edges()) {
      if (!s.tau.contains(e)) throw Error(fmt::format("missing delay for edge ({}, {})", e.i, e.j));
    }
    return s;
  }
};

}  // namespace

DelaySchedule assign_delays(const Network& net, int tau_bar, const DelayMode& mode,
                            std::uint64_t seed) {
  if (tau_bar < 0) throw Error("tau_bar must be non-negative");
  return std::visit(DelayBuilder{net, tau_bar, seed}, mode);
}

// --- augmented system --------------------------------------------------------

Eigen::MatrixXd AugmentedSystem::selection(int block) const {
  Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(n, dim());
  xi.block(0, block * n, n, n).setIdentity();
  return xi;
}

Eigen::VectorXd AugmentedSystem::unit(int block) const {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(tau_bar + 1);
  u(block) = 1.0;
  return u;
}

Eigen::MatrixXd AugmentedSystem::W_tilde() const {
  return W - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
}

Eigen::MatrixXd AugmentedSystem::single_class(int r) const {
  const Eigen::MatrixXd Wt = W_tilde();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim(), dim());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (pair_delay(i, j) == r) m(i, r * n + j) = Wt(i, j);
    }
  }
  const double scale = 1.0 / (tau_bar + 1);
  for (int b = 1; b <= tau_bar; ++b) {
    m.block(b * n, (b - 1) * n, n, n) = scale * Eigen::MatrixXd::Identity(n, n);
  }
  return m;
}

AugmentedSystem build_augmented(const Network& net, const DelaySchedule& delays) {
  AugmentedSystem s;
  s.n = net.size();
  s.tau_bar = delays.tau_bar;
  s.W = net.weights();
  const int n = s.n;
  const int T = s.tau_bar;
  if (delays.self_delay < 0 || delays.self_delay > T) {
    throw Error("self delay outside [0, tau_bar]");
  }

  s.pair_delay = Eigen::MatrixXi::Constant(n, n, delays.self_delay);
  for (const Edge& e : net.edges()) {
    const int d = delays.delay(e.i, e.j);
    if (d < 0 || d > T) throw Error(fmt::format("delay on ({}, {}) outside [0, {}]", e.i, e.j, T));
    s.pair_delay(e.i, e.j) = d;
    s.pair_delay(e.j, e.i) = d;
  }

  s.P.assign(T + 1, Eigen::MatrixXd::Zero(n, n));
  for (int i = 0; i < n; ++i) s.P[delays.self_delay](i, i) = 1.0;
  for (const Edge& e : net.edges()) {
    const int d = s.pair_delay(e.i, e.j);
    s.P[d](e.i, e.j) = 1.0;
    s.P[d](e.j, e.i) = 1.0;
  }

  const int N = s.dim();
  s.PW_bar = Eigen::MatrixXd::Zero(N, N);
  s.P1_bar = Eigen::MatrixXd::Zero(N, N);
  for (int r = 0; r <= T; ++r) {
    s.PW_bar.block(0, r * n, n, n) = s.P[r].cwiseProduct(s.W);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) s.P1_bar(i, s.pair_delay(i, j) * n + j) = 1.0 / n;
  }
  for (int b = 1; b <= T; ++b) {
    s.PW_bar.block(b * n, (b - 1) * n, n, n).setIdentity();
  }
  s.PW_tilde = s.PW_bar - s.P1_bar;
  return s;
}

double symmetric_spectral_radius(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_radius(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  if (es.info() != Eigen::Success) throw Error("eigenvalue computation failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

SpectralReport spectral_radius_check(const AugmentedSystem& sys) {
  SpectralReport r;
  r.rho_W_tilde = symmetric_spectral_radius(sys.W_tilde());
  // Without delays the augmented matrix is W_tilde itself and stays symmetric.
  r.rho_PW_tilde = sys.tau_bar == 0 ? symmetric_spectral_radius(sys.PW_tilde)
                                    : spectral_radius(sys.PW_tilde);
  r.predicted = std::pow(r.rho_W_tilde, 1.0 / (sys.tau_bar + 1));
  r.homogeneous = (sys.pair_delay.array() == sys.tau_bar).all();
  r.stable = r.rho_PW_tilde < 1.0;
  r.within_bound = r.rho_PW_tilde <= r.predicted + kSpectralTol;
  r.matches_prediction = r.homogeneous && std::abs(r.rho_PW_tilde - r.predicted) <= kSpectralTol;
  return r;
}

}  // namespace dtac
