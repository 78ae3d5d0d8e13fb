#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "alpine/pon_graph.hpp"

namespace alpine {

// Embedding with link probability sigmoid(beta - gamma/2 * |x_i - x_j|^2).
// gamma is a fixed spread hyperparameter; beta is a learned global bias.
struct EmbeddingModel {
  Eigen::MatrixXd coords;  // n x d, row i = x_i
  double gamma = 1.0;
  double beta = 0.0;

  uint32_t num_nodes() const { return static_cast<uint32_t>(coords.rows()); }
  int dim() const { return static_cast<int>(coords.cols()); }

  double pair_logit(uint32_t i, uint32_t j) const {
    if (i == j) throw ContractViolation("link probability needs i != j");
    const double sq = (coords.row(i) - coords.row(j)).squaredNorm();
    return beta - 0.5 * gamma * sq;
  }

  // Strictly inside (0,1); symmetric in (i,j).
  double link_probability(uint32_t i, uint32_t j) const;

  // Content hash of (n, d, gamma, beta, X); pins covariance snapshots.
  uint64_t fingerprint() const;
};

struct FitConfig {
  int dim = 8;
  int max_epochs = 500;
  double learning_rate = 0.1;
  // Stop when the mean absolute parameter update falls below this.
  double tolerance = 1e-6;
  // Gaussian init scale; < 0 means 1/sqrt(dim).
  double init_scale = -1.0;
  uint64_t seed = 0;
  // Warm start from a previous embedding instead of random init.
  const EmbeddingModel* warm_start = nullptr;
  // Update beta by gradient ascent alongside X. When false, beta stays at
  // its initial value, which regularizes the fit the way a fixed prior
  // does.
  bool learn_beta = true;
  // Explicit initial bias; NaN means logit of the observed link density,
  // plus dim*ln(2) when beta_dim_offset is set. The offset is the
  // dimension-dependent normalization of a Gaussian link prior with twice
  // the unlinked spread; it places the p=0.5 shell at a positive distance
  // instead of at zero.
  double beta_init = std::numeric_limits<double>::quiet_NaN();
  bool beta_dim_offset = false;

  // Above this node count, disconnected pairs are subsampled per node with
  // inverse-probability weighting instead of summed exactly.
  uint32_t exact_pair_limit = 2000;
  int neg_samples_per_node = 500;

  // Optional instrumentation.
  std::vector<double>* likelihood_trace = nullptr;
  int* epochs_run = nullptr;
};

// Sum over observed pairs of log P (links) and log(1-P) (non-links);
// pairs in U contribute nothing.
double log_likelihood(const EmbeddingModel& model, const PartialNetwork& net);

struct Gradient {
  Eigen::MatrixXd coords;  // n x d
  double beta = 0.0;
};

// Row i: sum over observed partners of gamma*(a_ij - P_ij)*(x_j - x_i).
// d/dbeta: sum over observed pairs of (a_ij - P_ij).
Gradient gradient(const EmbeddingModel& model, const PartialNetwork& net);

// Full-batch gradient ascent MLE of (X, beta) with step halving on
// likelihood decrease. beta starts at logit of the observed link density.
EmbeddingModel fit(const PartialNetwork& net, const FitConfig& cfg,
                   double gamma);

// Text export: header "n d gamma beta", then one row of d floats per node,
// %.17g formatting.
void write_embedding(const std::string& path, const EmbeddingModel& model);
EmbeddingModel read_embedding(const std::string& path);

}  // namespace alpine
