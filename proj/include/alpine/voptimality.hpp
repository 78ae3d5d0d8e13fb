#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "alpine/cne_model.hpp"
#include "alpine/pon_graph.hpp"

namespace alpine {

// Per-node observed information and its ridge-regularized inverse, the
// covariance surrogate from the Cramer-Rao bound.
struct NodeCovariance {
  uint32_t node = 0;
  Eigen::MatrixXd info;  // d x d, symmetric PSD
  Eigen::MatrixXd cov;   // (info + ridge*I)^-1, symmetric PD
  double ridge = 0.0;
};

struct CovarianceSet {
  std::vector<NodeCovariance> nodes;
  uint64_t model_snapshot = 0;  // EmbeddingModel::fingerprint at build time
  double ridge = 0.0;
};

struct UtilityScores {
  std::string strategy;
  // Keys are exactly the current U, ascending pair order.
  std::vector<NodePair> pairs;
  std::vector<double> values;
  int iteration = 0;
  uint64_t model_snapshot = 0;
  std::string complexity_note;
};

// gamma^2 * sum over observed partners of P(1-P) (x_i-x_j)(x_i-x_j)^T.
Eigen::MatrixXd fisher_information(const EmbeddingModel& model,
                                   const PartialNetwork& net, uint32_t i);

// cov = (info + ridge*I)^-1 via Cholesky; throws NumericError naming the
// node if the factorization fails.
NodeCovariance node_covariance(const Eigen::MatrixXd& info, double ridge,
                               uint32_t node);

CovarianceSet build_covariances(const EmbeddingModel& model,
                                const PartialNetwork& net, double ridge);

// Rank-one covariance update for node i after querying pair (i,j),
// computed in closed form (Sherman-Morrison, no inversion):
//   C_i^j = C_i - c * C_i v v^T C_i / (1 + c * v^T C_i v),
//   c = gamma^2 P_ij (1-P_ij),  v = x_i - x_j.
Eigen::MatrixXd updated_covariance(const Eigen::MatrixXd& cov,
                                   const EmbeddingModel& model, uint32_t i,
                                   uint32_t j);

// Variance-reduction utility of querying (i,j) in U: summed bound
// reduction over the unknown pairs incident to i and to j. The sums are
// taken literally, so the candidate pair contributes its own two terms;
// exclude_self_pair drops them for sensitivity analysis.
double vopt_utility(const EmbeddingModel& model, const PartialNetwork& net,
                    const CovarianceSet& covariances, uint32_t i, uint32_t j,
                    bool exclude_self_pair = false);

UtilityScores score_all_vopt(const EmbeddingModel& model,
                             const PartialNetwork& net, double ridge,
                             int iteration = 0,
                             bool exclude_self_pair = false);

}  // namespace alpine
