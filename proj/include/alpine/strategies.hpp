#pragma once

#include <array>
#include <string>
#include <vector>

#include "alpine/voptimality.hpp"

namespace alpine {

enum class Strategy {
  Random,
  MaxDegree,
  PageRank,
  MinDistance,
  MaxProbability,
  MaxEntropy,
  VOptimality,
};

inline constexpr std::array<Strategy, 7> kAllStrategies = {
    Strategy::Random,      Strategy::MaxDegree,      Strategy::PageRank,
    Strategy::MinDistance, Strategy::MaxProbability, Strategy::MaxEntropy,
    Strategy::VOptimality,
};

std::string strategy_name(Strategy s);
// Throws UsageError listing the valid names on an unknown name.
Strategy parse_strategy(const std::string& name);
bool needs_embedding(Strategy s);

struct PageRankConfig {
  double damping = 0.85;
  int max_iters = 200;
  double tolerance = 1e-10;  // L1 change per iteration
};

// PageRank over (V, E) with uniform teleport; unknown pairs are treated as
// disconnected, dangling mass redistributed uniformly. Warns and returns
// the last iterate on non-convergence.
std::vector<double> pagerank(const PartialNetwork& net,
                             const PageRankConfig& cfg);

// Binary entropy of the link probability, natural log, in [0, ln 2].
double entropy_utility(const EmbeddingModel& model, uint32_t i, uint32_t j);
double prob_utility(const EmbeddingModel& model, uint32_t i, uint32_t j);
// Negative embedding distance; zero iff coincident.
double distance_utility(const EmbeddingModel& model, uint32_t i, uint32_t j);
// Sum of the endpoints' observed degrees.
double degree_utility(const PartialNetwork& net, uint32_t i, uint32_t j);
double pagerank_utility(const PartialNetwork& net, uint32_t i, uint32_t j,
                        const PageRankConfig& cfg);
// Seeded i.i.d. uniform score; pure function of (seed, i, j).
double random_utility(uint64_t seed, uint32_t i, uint32_t j);

struct ScoreContext {
  uint64_t seed = 0;
  int iteration = 0;
  PageRankConfig pagerank;
  double ridge = 1e-4;
  bool exclude_self_pair = false;
};

// Scores every pair in U. `model` may be null for strategies that do not
// need the embedding.
UtilityScores score_pool(Strategy strategy, const EmbeddingModel* model,
                         const PartialNetwork& net, const ScoreContext& ctx);

// min(s, budget, |U|) pairs, descending score, ties by ascending (i,j).
std::vector<NodePair> select_top(const UtilityScores& scores, long step,
                                 long budget);

}  // namespace alpine
