#include "alpine/voptimality.hpp"

#include <cmath>

#include "alpine/threads.hpp"

namespace alpine {

Eigen::MatrixXd fisher_information(const EmbeddingModel& model,
                                   const PartialNetwork& net, uint32_t i) {
  if (model.num_nodes() != net.num_nodes())
    throw ContractViolation("model/network node count mismatch");
  net.check_node(i);
  const int d = model.dim();
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(d, d);
  const double g2 = model.gamma * model.gamma;
  Eigen::VectorXd v(d);
  Eigen::MatrixXd outer(d, d);
  for_each_observed_neighbor(net, i, [&](uint32_t j, int) {
    const double p = model.link_probability(i, j);
    const double w = g2 * p * (1.0 - p);
    v = (model.coords.row(i) - model.coords.row(j)).transpose();
    // Materialized so the scalar scales an exactly symmetric matrix.
    outer.noalias() = v * v.transpose();
    info += w * outer;
  });
  return info;
}

NodeCovariance node_covariance(const Eigen::MatrixXd& info, double ridge,
                               uint32_t node) {
  if (ridge < 0.0) throw ContractViolation("ridge must be non-negative");
  NodeCovariance out;
  out.node = node;
  out.ridge = ridge;
  out.info = info;
  const int d = static_cast<int>(info.rows());
  Eigen::MatrixXd regularized =
      info + ridge * Eigen::MatrixXd::Identity(d, d);
  Eigen::LLT<Eigen::MatrixXd> llt(regularized);
  if (llt.info() != Eigen::Success)
    throw NumericError("covariance inversion failed for node " +
                       std::to_string(node) +
                       " (information matrix singular; increase ridge)");
  out.cov = llt.solve(Eigen::MatrixXd::Identity(d, d));
  // Cholesky solve is symmetric only up to roundoff.
  out.cov = ((out.cov + out.cov.transpose()) * 0.5).eval();
  return out;
}

CovarianceSet build_covariances(const EmbeddingModel& model,
                                const PartialNetwork& net, double ridge) {
  CovarianceSet set;
  set.ridge = ridge;
  set.model_snapshot = model.fingerprint();
  set.nodes.resize(net.num_nodes());
  parallel_for(net.num_nodes(), [&](size_t i) {
    set.nodes[i] = node_covariance(
        fisher_information(model, net, static_cast<uint32_t>(i)), ridge,
        static_cast<uint32_t>(i));
  });
  return set;
}

Eigen::MatrixXd updated_covariance(const Eigen::MatrixXd& cov,
                                   const EmbeddingModel& model, uint32_t i,
                                   uint32_t j) {
  const double p = model.link_probability(i, j);
  const double c = model.gamma * model.gamma * p * (1.0 - p);
  const Eigen::VectorXd v =
      (model.coords.row(i) - model.coords.row(j)).transpose();
  const Eigen::VectorXd cv = cov * v;
  const double denom = 1.0 + c * v.dot(cv);
  const Eigen::MatrixXd outer = cv * cv.transpose();
  return cov - (c / denom) * outer;
}

namespace {

// One side of the Theorem-1 sum: variance-bound reduction over the unknown
// pairs incident to `node` when (node, other) is queried, in the
// Sherman-Morrison closed form.
double side_utility(const EmbeddingModel& model,
                    const std::vector<uint32_t>& unknown_partners,
                    const Eigen::MatrixXd& cov, uint32_t node, uint32_t other,
                    bool exclude_self_pair) {
  const double gamma2 = model.gamma * model.gamma;
  const double p_no = model.link_probability(node, other);
  const double w_no = p_no * (1.0 - p_no);

  const Eigen::VectorXd v =
      (model.coords.row(node) - model.coords.row(other)).transpose();
  const Eigen::VectorXd cv = cov * v;
  const double d_jj = v.dot(cv);
  const double lead = gamma2 * gamma2 * w_no / (1.0 + gamma2 * w_no * d_jj);

  double acc = 0.0;
  for (uint32_t k : unknown_partners) {
    if (exclude_self_pair && k == other) continue;
    const double p_nk = model.link_probability(node, k);
    const double w_nk = p_nk * (1.0 - p_nk);
    const double d_kj =
        (model.coords.row(node) - model.coords.row(k)).dot(cv.transpose());
    acc += w_nk * w_nk * d_kj * d_kj;
  }
  return lead * acc;
}

}  // namespace

double vopt_utility(const EmbeddingModel& model, const PartialNetwork& net,
                    const CovarianceSet& covariances, uint32_t i, uint32_t j,
                    bool exclude_self_pair) {
  if (!net.is_unknown(NodePair::of(i, j)))
    throw ContractViolation("v-opt utility is defined for pairs in U");
  if (covariances.model_snapshot != model.fingerprint())
    throw ContractViolation("stale covariance snapshot for this model");
  const auto uadj = net.unknown_adjacency();
  return side_utility(model, uadj[i], covariances.nodes[i].cov, i, j,
                      exclude_self_pair) +
         side_utility(model, uadj[j], covariances.nodes[j].cov, j, i,
                      exclude_self_pair);
}

UtilityScores score_all_vopt(const EmbeddingModel& model,
                             const PartialNetwork& net, double ridge,
                             int iteration, bool exclude_self_pair) {
  const CovarianceSet covs = build_covariances(model, net, ridge);
  const auto uadj = net.unknown_adjacency();

  UtilityScores out;
  out.strategy = "v-opt";
  out.iteration = iteration;
  out.model_snapshot = covs.model_snapshot;
  out.pairs = net.unknown_sorted();
  out.values.resize(out.pairs.size());

  size_t term_count = 0;
  for (const NodePair& p : out.pairs)
    term_count += uadj[p.a].size() + uadj[p.b].size();

  parallel_for(out.pairs.size(), [&](size_t idx) {
    const NodePair p = out.pairs[idx];
    out.values[idx] =
        side_utility(model, uadj[p.a], covs.nodes[p.a].cov, p.a, p.b,
                     exclude_self_pair) +
        side_utility(model, uadj[p.b], covs.nodes[p.b].cov, p.b, p.a,
                     exclude_self_pair);
  });

  out.complexity_note =
      "covariances: " + std::to_string(net.num_nodes()) +
      " nodes x O(n d^2); scoring: " + std::to_string(term_count) +
      " rank-one terms x O(d)";
  return out;
}

}  // namespace alpine
