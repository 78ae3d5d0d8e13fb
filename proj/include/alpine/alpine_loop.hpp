#pragma once

#include <optional>
#include <string>
#include <vector>

#include "alpine/strategies.hpp"

namespace alpine {

struct CampaignConfig {
  // Campaign fits pin beta to the density-derived prior value; the raw
  // fit op defaults to the full MLE. Learned beta lets the optimizer push
  // the observed part to probabilities near 0/1, which hurts
  // generalization on the unknown pool.
  CampaignConfig() {
    fit.learn_beta = false;
    fit.beta_dim_offset = true;
  }

  Strategy strategy = Strategy::Random;
  long step = 10;
  // Budget: absolute count, or fraction of |U(0)| resolved at start.
  // Exactly one must be set.
  long budget = -1;
  double budget_fraction = -1.0;
  FitConfig fit;
  // Epoch cap for warm-started refits after the first round; < 0 means
  // fit.max_epochs.
  int refit_max_epochs = -1;
  double gamma = 1.0;
  double ridge = 1e-4;
  std::optional<double> early_stop_auc;
  uint64_t seed = 0;
  // Re-randomize the embedding every iteration instead of warm-starting.
  bool cold_start = false;
  bool exclude_self_pair = false;
  PageRankConfig pagerank;
  // Written after every iteration when non-empty.
  std::string checkpoint_path;
  // Stop (checkpointable, unfinished) after this many scoring rounds; < 0
  // disables. Used to exercise interrupt/resume.
  int max_scoring_rounds = -1;

  uint64_t fingerprint() const;
};

struct QueryRecord {
  NodePair pair;
  PairStatus status = PairStatus::Unknown;
  int iteration = 0;
};

struct IterationRecord {
  int iteration = 0;
  long queries_used = 0;  // reveals before this record
  // AUC over U(0), revealed pairs scored at their current model
  // probability; NaN when undefined.
  double auc_initial_pool = 0.0;
  // AUC over the still-unknown pool only; NaN when undefined.
  double auc_remaining = 0.0;
  double fit_seconds = 0.0;
  // Scoring wall time of the round started at this record; < 0 when the
  // round issued no queries.
  double scoring_seconds = -1.0;
  double wall_seconds = 0.0;
  int fit_epochs = 0;
};

struct CampaignState {
  int iteration = 0;  // next scoring round
  PartialNetwork net;
  EmbeddingModel model;
  long budget = 0;
  long remaining = 0;
  std::vector<QueryRecord> query_log;
  std::vector<IterationRecord> trajectory;
  std::vector<NodePair> initial_pool;  // U(0), ascending
  std::vector<int> initial_labels;     // ground truth for U(0)
  uint64_t graph_hash = 0;             // content hash of net(0)
  bool finished = false;
};

// Iterates embed -> score -> select -> query -> update until the budget is
// exhausted, U empties, or an early-stop threshold is met.
CampaignState run_campaign(const PartialNetwork& net0, const Oracle& oracle,
                           const CampaignConfig& cfg);

void write_checkpoint(const std::string& path, const CampaignState& state,
                      const CampaignConfig& cfg);

// Continues a checkpointed campaign as if uninterrupted. Refuses when the
// checkpoint was produced for a different graph or config.
CampaignState resume(const std::string& checkpoint_path,
                     const PartialNetwork& net0, const Oracle& oracle,
                     const CampaignConfig& cfg);

}  // namespace alpine
