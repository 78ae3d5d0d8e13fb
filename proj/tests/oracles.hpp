// Test-side oracles: independent brute-force routes for the quantities the
// library computes. These deliberately avoid the library's code paths.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "alpine/cne_model.hpp"
#include "alpine/pon_graph.hpp"
#include "alpine/rng.hpp"
#include "alpine/strategies.hpp"

namespace alpine::testing {

// Term-by-term sum over every pair using status(), plain std::log.
inline double brute_force_log_likelihood(const EmbeddingModel& model,
                                         const PartialNetwork& net) {
  double total = 0.0;
  const uint32_t n = net.num_nodes();
  for (uint32_t i = 0; i < n; ++i) {
    for (uint32_t j = i + 1; j < n; ++j) {
      const PairStatus s = net.status(NodePair{i, j});
      if (s == PairStatus::Unknown) continue;
      double sq = 0.0;
      for (int k = 0; k < model.dim(); ++k) {
        const double diff = model.coords(i, k) - model.coords(j, k);
        sq += diff * diff;
      }
      const double z = model.beta - 0.5 * model.gamma * sq;
      const double p = 1.0 / (1.0 + std::exp(-z));
      total += s == PairStatus::Connected ? std::log(p) : std::log(1.0 - p);
    }
  }
  return total;
}

// Central finite differences of the brute-force likelihood.
inline Eigen::MatrixXd fd_coordinate_gradient(const EmbeddingModel& model,
                                              const PartialNetwork& net,
                                              double h = 1e-5) {
  Eigen::MatrixXd g(model.coords.rows(), model.coords.cols());
  EmbeddingModel probe = model;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index k = 0; k < g.cols(); ++k) {
      const double saved = probe.coords(i, k);
      probe.coords(i, k) = saved + h;
      const double up = brute_force_log_likelihood(probe, net);
      probe.coords(i, k) = saved - h;
      const double down = brute_force_log_likelihood(probe, net);
      probe.coords(i, k) = saved;
      g(i, k) = (up - down) / (2.0 * h);
    }
  }
  return g;
}

inline double fd_beta_gradient(const EmbeddingModel& model,
                               const PartialNetwork& net, double h = 1e-5) {
  EmbeddingModel probe = model;
  probe.beta = model.beta + h;
  const double up = brute_force_log_likelihood(probe, net);
  probe.beta = model.beta - h;
  const double down = brute_force_log_likelihood(probe, net);
  return (up - down) / (2.0 * h);
}

// Element-wise loop oracle for the observed information matrix.
inline Eigen::MatrixXd brute_force_fisher(const EmbeddingModel& model,
                                          const PartialNetwork& net,
                                          uint32_t i) {
  const int d = model.dim();
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(d, d);
  for (uint32_t j = 0; j < net.num_nodes(); ++j) {
    if (j == i) continue;
    if (net.status(NodePair::of(i, j)) == PairStatus::Unknown) continue;
    double sq = 0.0;
    for (int k = 0; k < d; ++k) {
      const double diff = model.coords(i, k) - model.coords(j, k);
      sq += diff * diff;
    }
    const double z = model.beta - 0.5 * model.gamma * sq;
    const double p = 1.0 / (1.0 + std::exp(-z));
    const double w = model.gamma * model.gamma * p * (1.0 - p);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        info(r, c) += w * (model.coords(i, r) - model.coords(j, r)) *
                      (model.coords(i, c) - model.coords(j, c));
  }
  return info;
}

// Direct route for the rank-one covariance update: invert, add, invert.
inline Eigen::MatrixXd direct_updated_covariance(const Eigen::MatrixXd& cov,
                                                 double c,
                                                 const Eigen::VectorXd& v) {
  const Eigen::MatrixXd inner =
      cov.inverse() + c * (v * v.transpose());
  return inner.inverse();
}

// Dense transition-matrix PageRank.
inline std::vector<double> dense_pagerank(const PartialNetwork& net,
                                          const PageRankConfig& cfg) {
  const uint32_t n = net.num_nodes();
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  const auto adj = net.edge_adjacency();
  for (uint32_t j = 0; j < n; ++j) {
    if (adj[j].empty()) {
      for (uint32_t i = 0; i < n; ++i) T(i, j) = 1.0 / n;
    } else {
      for (uint32_t i : adj[j]) T(i, j) = 1.0 / adj[j].size();
    }
  }
  Eigen::VectorXd pr = Eigen::VectorXd::Constant(n, 1.0 / n);
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    Eigen::VectorXd next = Eigen::VectorXd::Constant(n, (1.0 - cfg.damping) / n) +
                           cfg.damping * (T * pr);
    const double delta = (next - pr).cwiseAbs().sum();
    pr = next;
    if (delta < cfg.tolerance) break;
  }
  return {pr.data(), pr.data() + n};
}

// Exhaustive positive-negative comparison AUC, ties worth one half.
inline double enumeration_auc(const std::vector<double>& scores,
                              const std::vector<int>& labels) {
  double wins = 0.0, ties = 0.0;
  size_t pos = 0, neg = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] == 1) {
      ++pos;
      for (size_t j = 0; j < scores.size(); ++j) {
        if (labels[j] == 1) continue;
        if (scores[i] > scores[j]) wins += 1.0;
        else if (scores[i] == scores[j]) ties += 1.0;
      }
    } else {
      ++neg;
    }
  }
  return (wins + 0.5 * ties) / (static_cast<double>(pos) * neg);
}

// Random fully observed graph + uniform mask, for property sweeps.
inline PartialNetwork random_masked_net(uint32_t n, double edge_prob,
                                        double hide_prob, uint64_t seed) {
  Rng rng(mix_seed(seed, 0x746573746eULL));
  PartialNetwork net(n);
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = i + 1; j < n; ++j)
      if (rng.uniform01() < edge_prob) net.add_edge(NodePair{i, j});
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = i + 1; j < n; ++j)
      if (rng.uniform01() < hide_prob) net.set_unknown(NodePair{i, j});
  return net;
}

inline EmbeddingModel random_model(uint32_t n, int d, uint64_t seed,
                                   double gamma = 1.0, double spread = 1.0) {
  Rng rng(mix_seed(seed, 0x746573746dULL));
  EmbeddingModel m;
  m.gamma = gamma;
  m.beta = rng.normal() * 0.5;
  m.coords = Eigen::MatrixXd(n, d);
  for (uint32_t i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) m.coords(i, k) = spread * rng.normal();
  return m;
}

inline Eigen::MatrixXd random_spd(int d, uint64_t seed, double jitter = 0.1) {
  Rng rng(mix_seed(seed, 0x737064ULL));
  Eigen::MatrixXd A(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) A(r, c) = rng.normal();
  return A * A.transpose() + jitter * Eigen::MatrixXd::Identity(d, d);
}

}  // namespace alpine::testing
