#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alpine/alpine_loop.hpp"

namespace alpine {

struct AucInput {
  std::vector<double> scores;
  std::vector<int> labels;  // 0/1
};

// Probability that a random positive outranks a random negative, ties
// counted one half; rank-based, O(m log m). Throws DataError on
// single-class input.
double auc(std::span<const double> scores, std::span<const int> labels);
inline double auc(const AucInput& in) { return auc(in.scores, in.labels); }
std::optional<double> try_auc(std::span<const double> scores,
                              std::span<const int> labels);

inline constexpr const char* kResultsSchema = "# alpine-results v1";

struct ExperimentRow {
  std::string dataset;
  std::string strategy;
  uint64_t seed = 0;       // embedding/campaign seed
  uint64_t mask_seed = 0;  // U(0) seed
  long step = 0;
  int iteration = 0;
  long queries_used = 0;
  double auc_initial_pool = 0.0;
  double auc_remaining = 0.0;    // NaN when undefined
  double scoring_seconds = -1.0; // < 0: round issued no queries
  double wall_seconds = 0.0;
};

struct ExperimentGrid {
  std::string dataset_name = "graph";
  double hide_fraction = 0.2;
  std::vector<Strategy> strategies;
  std::vector<uint64_t> mask_seeds;
  std::vector<uint64_t> fit_seeds;
  std::vector<long> steps;
  CampaignConfig base;  // budget, fit, gamma, ridge, flags
};

// One campaign per grid cell (strategy x mask seed x fit seed x step).
// Rows are appended to out_csv incrementally when non-empty; per-cell
// failures are recorded as comment lines and the remaining cells continue.
std::vector<ExperimentRow> run_experiment(const PartialNetwork& full,
                                          const ExperimentGrid& grid,
                                          const std::string& out_csv = "");

std::vector<ExperimentRow> rows_from_campaign(const CampaignState& state,
                                              const std::string& dataset,
                                              const std::string& strategy,
                                              uint64_t seed,
                                              uint64_t mask_seed, long step);

void write_results_header(std::ostream& out);
void write_result_row(std::ostream& out, const ExperimentRow& row);

struct NewNodeIteration {
  int iteration = 0;
  // Candidate partners, descending score, ties by ascending node id.
  std::vector<std::pair<uint32_t, double>> ranking;
};

struct NewNodeResult {
  std::vector<NewNodeIteration> iterations;
  std::vector<uint32_t> top1;  // per iteration
};

// New-node protocol: all pairs incident to `node` unknown except the
// anchor; one query per iteration. Refuses when {node, anchor} is not a
// ground-truth edge.
NewNodeResult new_node_study(const PartialNetwork& full, uint32_t node,
                             uint32_t anchor, Strategy strategy, int iters,
                             const CampaignConfig& base);

struct StrategyTiming {
  std::string strategy;
  double mean_scoring_seconds = 0.0;
  int rounds = 0;
};

// Mean wall time of the scoring step only (fit excluded).
std::vector<StrategyTiming> timing_report(std::span<const ExperimentRow> rows);

// Score dump: i,j,score,strategy,iteration; descending score, ties by
// ascending (i,j).
void write_scores_csv(const std::string& path, const UtilityScores& scores);

}  // namespace alpine
