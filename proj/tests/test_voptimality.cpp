#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "alpine/voptimality.hpp"
#include "oracles.hpp"

using namespace alpine;
namespace oracle = alpine::testing;

namespace {

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvalues().minCoeff();
}

// Definitional route for one side of the utility: quadratic forms through
// the explicitly updated covariance.
double definitional_side(const EmbeddingModel& model,
                         const PartialNetwork& net,
                         const Eigen::MatrixXd& cov, uint32_t node,
                         uint32_t other) {
  const double p = model.link_probability(node, other);
  const double c = model.gamma * model.gamma * p * (1.0 - p);
  const Eigen::VectorXd v =
      (model.coords.row(node) - model.coords.row(other)).transpose();
  const Eigen::MatrixXd updated =
      oracle::direct_updated_covariance(cov, c, v);
  const Eigen::MatrixXd shrink = cov - updated;

  double total = 0.0;
  for (const NodePair& q : net.unknown_sorted()) {
    if (!q.contains(node)) continue;
    const uint32_t k = q.other(node);
    const double pk = model.link_probability(node, k);
    const double w = model.gamma * pk * (1.0 - pk);
    const Eigen::VectorXd vk =
        (model.coords.row(node) - model.coords.row(k)).transpose();
    total += w * w * vk.dot(shrink * vk);
  }
  return total;
}

}  // namespace

TEST_CASE("fisher information of a single observed pair is rank one") {
  PartialNetwork net(3);
  net.add_edge(NodePair{0, 1});
  net.set_unknown(NodePair{0, 2});
  const EmbeddingModel m = oracle::random_model(3, 3, 1, 1.7);

  const Eigen::MatrixXd info = fisher_information(m, net, 0);
  const double p = m.link_probability(0, 1);
  const Eigen::VectorXd v = (m.coords.row(0) - m.coords.row(1)).transpose();
  const Eigen::MatrixXd expected =
      m.gamma * m.gamma * p * (1.0 - p) * (v * v.transpose());
  CHECK((info - expected).cwiseAbs().maxCoeff() < 1e-14);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info);
  int nonzero = 0;
  for (int k = 0; k < 3; ++k)
    if (es.eigenvalues()(k) > 1e-12) ++nonzero;
  CHECK(nonzero == 1);
}

TEST_CASE("fisher information is the empty sum when all pairs are unknown") {
  PartialNetwork net(4);
  net.add_edge(NodePair{1, 2});
  for (uint32_t j = 1; j < 4; ++j) net.set_unknown(NodePair{0, j});
  const EmbeddingModel m = oracle::random_model(4, 2, 2);
  CHECK(fisher_information(m, net, 0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fisher information matches the loop oracle and is symmetric PSD") {
  for (uint64_t seed : {5ULL, 6ULL, 7ULL, 8ULL}) {
    const PartialNetwork net = oracle::random_masked_net(6, 0.5, 0.25, seed);
    const EmbeddingModel m = oracle::random_model(6, 3, seed);
    for (uint32_t i = 0; i < 6; ++i) {
      const Eigen::MatrixXd info = fisher_information(m, net, i);
      CHECK((info - oracle::brute_force_fisher(m, net, i))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
      CHECK((info - info.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK(min_eigenvalue(info) >= -1e-10);
    }
  }
}

TEST_CASE("node covariance inverts the regularized information") {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  CHECK((node_covariance(id, 0.0, 0).cov - id).cwiseAbs().maxCoeff() < 1e-12);

  const NodeCovariance isolated =
      node_covariance(Eigen::MatrixXd::Zero(2, 2), 1e-4, 5);
  CHECK((isolated.cov - 1e4 * Eigen::MatrixXd::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() < 1e-6);
  CHECK(isolated.node == 5);

  for (uint64_t seed : {20ULL, 21ULL, 22ULL}) {
    const Eigen::MatrixXd info = oracle::random_spd(4, seed, 0.0);
    const NodeCovariance nc = node_covariance(info, 1e-4, 0);
    const Eigen::MatrixXd prod =
        (info + 1e-4 * Eigen::MatrixXd::Identity(4, 4)) * nc.cov;
    CHECK((prod - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <
          1e-8);
    CHECK((nc.cov - nc.cov.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }

  CHECK_THROWS_AS(node_covariance(id, -1.0, 0), ContractViolation);
}

TEST_CASE("rank-one update agrees with direct inversion") {
  double worst = 0.0;
  for (int t = 0; t < 25; ++t) {
    const uint64_t seed = 300 + t;
    const int d = 2 + static_cast<int>(seed % 9);  // <= 10
    const Eigen::MatrixXd cov = oracle::random_spd(d, seed).inverse();
    const Eigen::MatrixXd sym = ((cov + cov.transpose()) * 0.5).eval();

    EmbeddingModel m = oracle::random_model(2, d, seed, 1.3);
    const double p = m.link_probability(0, 1);
    const double c = m.gamma * m.gamma * p * (1.0 - p);
    const Eigen::VectorXd v =
        (m.coords.row(0) - m.coords.row(1)).transpose();

    const Eigen::MatrixXd sm = updated_covariance(sym, m, 0, 1);
    const Eigen::MatrixXd direct =
        oracle::direct_updated_covariance(sym, c, v);
    worst = std::max(worst,
                     (sm - direct).norm() / std::max(1e-30, direct.norm()));

    // Information can only shrink variance.
    CHECK(min_eigenvalue(sym - sm) >= -1e-12);
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("coincident embeddings leave the covariance unchanged") {
  EmbeddingModel m;
  m.gamma = 1.0;
  m.beta = 0.3;
  m.coords = Eigen::MatrixXd::Zero(2, 3);
  const Eigen::MatrixXd cov = oracle::random_spd(3, 4).inverse();
  CHECK((updated_covariance(cov, m, 0, 1) - cov).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("saturated probabilities give a vanishing update weight") {
  EmbeddingModel m = oracle::random_model(2, 2, 13);
  m.beta = 80.0;  // P -> 1
  const Eigen::MatrixXd cov = oracle::random_spd(2, 5).inverse();
  CHECK((updated_covariance(cov, m, 0, 1) - cov).cwiseAbs().maxCoeff() < 1e-10);
  m.beta = -80.0;  // P -> 0
  CHECK((updated_covariance(cov, m, 0, 1) - cov).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("three-node utility matches a hand evaluation in one dimension") {
  // Nodes on a line: x0 = 0, x1 = 1, x2 = 3; only {0,1} unknown.
  PartialNetwork net(3);
  net.add_edge(NodePair{1, 2});
  net.set_unknown(NodePair{0, 1});
  EmbeddingModel m;
  m.gamma = 1.0;
  m.beta = 0.25;
  m.coords = Eigen::MatrixXd(3, 1);
  m.coords << 0.0, 1.0, 3.0;

  const double ridge = 1e-4;
  const CovarianceSet covs = build_covariances(m, net, ridge);

  auto sigma = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
  auto weight = [&](double dist) {
    const double p = sigma(m.beta - 0.5 * dist * dist);
    return p * (1.0 - p);
  };
  // Node 0 observes only node 2 (distance 3); node 1 observes node 2
  // (distance 2). Scalar covariances:
  const double c0 = 1.0 / (weight(3.0) * 9.0 + ridge);
  const double c1 = 1.0 / (weight(2.0) * 4.0 + ridge);
  const double w01 = weight(1.0);
  // Side of node 0: k ranges over {1}; d_jj = d_kj = c0 * 1^2.
  const double side0 = w01 / (1.0 + w01 * c0) * w01 * w01 * c0 * c0;
  const double side1 = w01 / (1.0 + w01 * c1) * w01 * w01 * c1 * c1;

  const double u = vopt_utility(m, net, covs, 0, 1);
  CHECK(u == doctest::Approx(side0 + side1).epsilon(1e-12));
  // Symmetric in the pair argument order.
  CHECK(vopt_utility(m, net, covs, 1, 0) == doctest::Approx(u).epsilon(1e-15));
}

TEST_CASE("utility vanishes when the pair embeddings coincide") {
  PartialNetwork net(3);
  net.add_edge(NodePair{0, 2});
  net.set_unknown(NodePair{0, 1});
  EmbeddingModel m;
  m.gamma = 1.0;
  m.beta = 0.0;
  m.coords = Eigen::MatrixXd::Zero(3, 2);
  m.coords(2, 0) = 1.0;
  const CovarianceSet covs = build_covariances(m, net, 1e-4);
  CHECK(vopt_utility(m, net, covs, 0, 1) == 0.0);
}

TEST_CASE("closed form equals the definitional two-path computation") {
  double worst = 0.0;
  for (uint64_t seed : {40ULL, 41ULL, 42ULL, 43ULL, 44ULL}) {
    const uint32_t n = 6 + seed % 5;  // <= 10
    const PartialNetwork net = oracle::random_masked_net(n, 0.45, 0.3, seed);
    if (net.num_unknown() == 0) continue;
    const EmbeddingModel m = oracle::random_model(n, 2, seed, 1.2);
    const CovarianceSet covs = build_covariances(m, net, 1e-4);
    for (const NodePair& q : net.unknown_sorted()) {
      const double closed = vopt_utility(m, net, covs, q.a, q.b);
      const double definitional =
          definitional_side(m, net, covs.nodes[q.a].cov, q.a, q.b) +
          definitional_side(m, net, covs.nodes[q.b].cov, q.b, q.a);
      worst = std::max(worst, std::abs(closed - definitional));
      CHECK(closed >= 0.0);
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("endpoint variance bound shrinks under any extra observation") {
  const PartialNetwork net = oracle::random_masked_net(8, 0.5, 0.3, 50);
  const EmbeddingModel m = oracle::random_model(8, 3, 50);
  const CovarianceSet covs = build_covariances(m, net, 1e-4);
  for (const NodePair& q : net.unknown_sorted()) {
    const Eigen::VectorXd v =
        (m.coords.row(q.a) - m.coords.row(q.b)).transpose();
    const double before = v.dot(covs.nodes[q.a].cov * v);
    CHECK(before >= 0.0);
    for (uint32_t k = 0; k < 8; ++k) {
      if (k == q.a) continue;
      const Eigen::MatrixXd after_cov =
          updated_covariance(covs.nodes[q.a].cov, m, q.a, k);
      CHECK(v.dot(after_cov * v) <= before + 1e-12);
    }
  }
}

TEST_CASE("score_all_vopt covers exactly the unknown pool") {
  const PartialNetwork net = oracle::random_masked_net(9, 0.4, 0.25, 60);
  const EmbeddingModel m = oracle::random_model(9, 2, 60);
  const UtilityScores scores = score_all_vopt(m, net, 1e-4);
  CHECK(scores.pairs == net.unknown_sorted());
  CHECK(scores.strategy == "v-opt");
  CHECK(!scores.complexity_note.empty());

  const CovarianceSet covs = build_covariances(m, net, 1e-4);
  for (size_t idx = 0; idx < scores.pairs.size(); ++idx) {
    CHECK(scores.values[idx] >= 0.0);
    CHECK(scores.values[idx] ==
          doctest::Approx(vopt_utility(m, net, covs, scores.pairs[idx].a,
                                       scores.pairs[idx].b))
              .epsilon(1e-12));
  }
}

TEST_CASE("single-candidate pools reduce to the pairwise utility") {
  PartialNetwork net(4);
  net.add_edge(NodePair{0, 1});
  net.add_edge(NodePair{1, 2});
  net.add_edge(NodePair{2, 3});
  net.set_unknown(NodePair{0, 3});
  const EmbeddingModel m = oracle::random_model(4, 2, 70);
  const UtilityScores scores = score_all_vopt(m, net, 1e-4);
  REQUIRE(scores.pairs.size() == 1);
  const CovarianceSet covs = build_covariances(m, net, 1e-4);
  CHECK(scores.values[0] == vopt_utility(m, net, covs, 0, 3));
}

TEST_CASE("scores stay finite across a ridge sweep") {
  const PartialNetwork net = oracle::random_masked_net(10, 0.35, 0.3, 80);
  const EmbeddingModel m = oracle::random_model(10, 3, 80);
  for (double ridge : {1e-6, 1e-4, 1e-2}) {
    const UtilityScores scores = score_all_vopt(m, net, ridge);
    for (double v : scores.values) {
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0);
    }
  }
}

TEST_CASE("stale covariance snapshots are rejected") {
  const PartialNetwork net = oracle::random_masked_net(6, 0.5, 0.3, 90);
  EmbeddingModel m = oracle::random_model(6, 2, 90);
  const CovarianceSet covs = build_covariances(m, net, 1e-4);
  m.coords(0, 0) += 0.5;  // model moved; covariances are stale
  const NodePair q = net.unknown_sorted().front();
  CHECK_THROWS_AS(vopt_utility(m, net, covs, q.a, q.b), ContractViolation);
}

TEST_CASE("utility requires the pair to be unknown") {
  PartialNetwork net(3);
  net.add_edge(NodePair{0, 1});
  net.set_unknown(NodePair{0, 2});
  const EmbeddingModel m = oracle::random_model(3, 2, 91);
  const CovarianceSet covs = build_covariances(m, net, 1e-4);
  CHECK_THROWS_AS(vopt_utility(m, net, covs, 0, 1), ContractViolation);
}

TEST_CASE("excluding the self pair only removes its own terms") {
  const PartialNetwork net = oracle::random_masked_net(8, 0.45, 0.3, 95);
  const EmbeddingModel m = oracle::random_model(8, 2, 95);
  const CovarianceSet covs = build_covariances(m, net, 1e-4);
  for (const NodePair& q : net.unknown_sorted()) {
    const double with_self = vopt_utility(m, net, covs, q.a, q.b, false);
    const double without = vopt_utility(m, net, covs, q.a, q.b, true);
    CHECK(without <= with_self + 1e-15);
    CHECK(without >= 0.0);
  }
}
