#include "alpine/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "alpine/mathutil.hpp"
#include "alpine/rng.hpp"
#include "alpine/threads.hpp"

namespace alpine {

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Random: return "rand";
    case Strategy::MaxDegree: return "max-deg";
    case Strategy::PageRank: return "page-rank";
    case Strategy::MinDistance: return "min-dis";
    case Strategy::MaxProbability: return "max-prob";
    case Strategy::MaxEntropy: return "max-ent";
    case Strategy::VOptimality: return "v-opt";
  }
  throw ContractViolation("unhandled strategy");
}

Strategy parse_strategy(const std::string& name) {
  for (Strategy s : kAllStrategies)
    if (strategy_name(s) == name) return s;
  std::string valid;
  for (Strategy s : kAllStrategies) {
    if (!valid.empty()) valid += ", ";
    valid += strategy_name(s);
  }
  throw UsageError("unknown strategy '" + name + "' (valid: " + valid + ")");
}

bool needs_embedding(Strategy s) {
  switch (s) {
    case Strategy::MinDistance:
    case Strategy::MaxProbability:
    case Strategy::MaxEntropy:
    case Strategy::VOptimality:
      return true;
    default:
      return false;
  }
}

std::vector<double> pagerank(const PartialNetwork& net,
                             const PageRankConfig& cfg) {
  const uint32_t n = net.num_nodes();
  if (n == 0) return {};
  const auto adj = net.edge_adjacency();
  const double teleport = (1.0 - cfg.damping) / n;
  std::vector<double> pr(n, 1.0 / n), next(n, 0.0);

  bool converged = false;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    double dangling = 0.0;
    for (uint32_t i = 0; i < n; ++i)
      if (adj[i].empty()) dangling += pr[i];
    const double base = teleport + cfg.damping * dangling / n;
    std::fill(next.begin(), next.end(), base);
    for (uint32_t i = 0; i < n; ++i) {
      if (adj[i].empty()) continue;
      const double share = cfg.damping * pr[i] / adj[i].size();
      for (uint32_t j : adj[i]) next[j] += share;
    }
    double delta = 0.0;
    for (uint32_t i = 0; i < n; ++i) delta += std::abs(next[i] - pr[i]);
    pr.swap(next);
    if (delta < cfg.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged)
    std::fprintf(stderr,
                 "warning: pagerank did not converge in %d iterations; "
                 "using last iterate\n",
                 cfg.max_iters);
  return pr;
}

double entropy_utility(const EmbeddingModel& model, uint32_t i, uint32_t j) {
  const double z = model.pair_logit(i, j);
  const double p = clamp_probability(sigmoid(z));
  // -p log p - (1-p) log(1-p), in the overflow-safe softplus form.
  return p * softplus(-z) + (1.0 - p) * softplus(z);
}

double prob_utility(const EmbeddingModel& model, uint32_t i, uint32_t j) {
  return model.link_probability(i, j);
}

double distance_utility(const EmbeddingModel& model, uint32_t i, uint32_t j) {
  if (i == j) throw ContractViolation("distance utility needs i != j");
  return -(model.coords.row(i) - model.coords.row(j)).norm();
}

double degree_utility(const PartialNetwork& net, uint32_t i, uint32_t j) {
  return static_cast<double>(net.observed_degree(i)) +
         static_cast<double>(net.observed_degree(j));
}

double pagerank_utility(const PartialNetwork& net, uint32_t i, uint32_t j,
                        const PageRankConfig& cfg) {
  const auto pr = pagerank(net, cfg);
  return pr[i] + pr[j];
}

double random_utility(uint64_t seed, uint32_t i, uint32_t j) {
  const NodePair p = NodePair::of(i, j);
  return u64_to_unit(splitmix64(splitmix64(seed) ^ p.key()));
}

UtilityScores score_pool(Strategy strategy, const EmbeddingModel* model,
                         const PartialNetwork& net, const ScoreContext& ctx) {
  if (needs_embedding(strategy) && model == nullptr)
    throw ContractViolation(strategy_name(strategy) +
                            " requires a fitted embedding");
  if (model != nullptr && model->num_nodes() != net.num_nodes())
    throw ContractViolation("model/network node count mismatch");

  if (strategy == Strategy::VOptimality)
    return score_all_vopt(*model, net, ctx.ridge, ctx.iteration,
                          ctx.exclude_self_pair);

  UtilityScores out;
  out.strategy = strategy_name(strategy);
  out.iteration = ctx.iteration;
  out.model_snapshot = model ? model->fingerprint() : 0;
  out.pairs = net.unknown_sorted();
  out.values.resize(out.pairs.size());

  // Per-iteration stream for the random baseline.
  const uint64_t rand_seed =
      mix_seed(ctx.seed, 0x72616e64ULL + static_cast<uint64_t>(ctx.iteration));
  std::vector<double> pr;
  if (strategy == Strategy::PageRank) pr = pagerank(net, ctx.pagerank);

  parallel_for(out.pairs.size(), [&](size_t idx) {
    const NodePair p = out.pairs[idx];
    double v = 0.0;
    switch (strategy) {
      case Strategy::Random: v = random_utility(rand_seed, p.a, p.b); break;
      case Strategy::MaxDegree: v = degree_utility(net, p.a, p.b); break;
      case Strategy::PageRank: v = pr[p.a] + pr[p.b]; break;
      case Strategy::MinDistance: v = distance_utility(*model, p.a, p.b); break;
      case Strategy::MaxProbability: v = prob_utility(*model, p.a, p.b); break;
      case Strategy::MaxEntropy: v = entropy_utility(*model, p.a, p.b); break;
      case Strategy::VOptimality: break;  // handled above
    }
    out.values[idx] = v;
  });
  return out;
}

std::vector<NodePair> select_top(const UtilityScores& scores, long step,
                                 long budget) {
  if (step < 1) throw ContractViolation("step size must be >= 1");
  if (budget < 1) throw ContractViolation("budget must be >= 1");
  const size_t take = std::min<size_t>(
      scores.pairs.size(),
      static_cast<size_t>(std::min<long>(step, budget)));
  std::vector<size_t> order(scores.pairs.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::partial_sort(order.begin(), order.begin() + take, order.end(),
                    [&](size_t lhs, size_t rhs) {
                      if (scores.values[lhs] != scores.values[rhs])
                        return scores.values[lhs] > scores.values[rhs];
                      return scores.pairs[lhs] < scores.pairs[rhs];
                    });
  std::vector<NodePair> out;
  out.reserve(take);
  for (size_t t = 0; t < take; ++t) out.push_back(scores.pairs[order[t]]);
  return out;
}

}  // namespace alpine
