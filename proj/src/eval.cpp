#include "alpine/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>

#include "alpine/rng.hpp"

namespace alpine {

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    throw ContractViolation("auc: scores/labels size mismatch");
  size_t pos = 0, neg = 0;
  for (int l : labels) (l == 1 ? pos : neg) += 1;
  if (pos == 0 || neg == 0)
    throw DataError("AUC undefined: input has a single class");

  const size_t m = scores.size();
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  // Average ranks over ties; rank sums stay exact (half-integers).
  double pos_rank_sum = 0.0;
  size_t i = 0;
  while (i < m) {
    size_t j = i;
    while (j < m && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + j) / 2.0;
    for (size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) pos_rank_sum += avg_rank;
    i = j;
  }
  const double p = static_cast<double>(pos);
  return (pos_rank_sum - p * (p + 1.0) / 2.0) /
         (p * static_cast<double>(neg));
}

std::optional<double> try_auc(std::span<const double> scores,
                              std::span<const int> labels) {
  size_t pos = 0, neg = 0;
  for (int l : labels) (l == 1 ? pos : neg) += 1;
  if (pos == 0 || neg == 0) return std::nullopt;
  return auc(scores, labels);
}

namespace {

void csv_double(std::string& out, double v) {
  if (std::isnan(v)) return;  // empty field
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  out += buf;
}

}  // namespace

void write_results_header(std::ostream& out) {
  out << kResultsSchema << '\n'
      << "dataset,strategy,seed,mask_seed,step,iteration,queries_used,"
         "auc_initial_pool,auc_remaining,scoring_seconds,"
         "wall_seconds_per_iteration\n";
}

void write_result_row(std::ostream& out, const ExperimentRow& r) {
  std::string line;
  line += r.dataset;
  line += ',';
  line += r.strategy;
  line += ',';
  line += std::to_string(r.seed);
  line += ',';
  line += std::to_string(r.mask_seed);
  line += ',';
  line += std::to_string(r.step);
  line += ',';
  line += std::to_string(r.iteration);
  line += ',';
  line += std::to_string(r.queries_used);
  line += ',';
  csv_double(line, r.auc_initial_pool);
  line += ',';
  csv_double(line, r.auc_remaining);
  line += ',';
  if (r.scoring_seconds >= 0) csv_double(line, r.scoring_seconds);
  line += ',';
  csv_double(line, r.wall_seconds);
  out << line << '\n';
}

std::vector<ExperimentRow> rows_from_campaign(const CampaignState& state,
                                              const std::string& dataset,
                                              const std::string& strategy,
                                              uint64_t seed,
                                              uint64_t mask_seed, long step) {
  std::vector<ExperimentRow> rows;
  rows.reserve(state.trajectory.size());
  for (const IterationRecord& t : state.trajectory) {
    ExperimentRow r;
    r.dataset = dataset;
    r.strategy = strategy;
    r.seed = seed;
    r.mask_seed = mask_seed;
    r.step = step;
    r.iteration = t.iteration;
    r.queries_used = t.queries_used;
    r.auc_initial_pool = t.auc_initial_pool;
    r.auc_remaining = t.auc_remaining;
    r.scoring_seconds = t.scoring_seconds;
    r.wall_seconds = t.wall_seconds;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ExperimentRow> run_experiment(const PartialNetwork& full,
                                          const ExperimentGrid& grid,
                                          const std::string& out_csv) {
  std::ofstream csv;
  if (!out_csv.empty()) {
    csv.open(out_csv);
    if (!csv) throw DataError("cannot write results CSV: " + out_csv);
    write_results_header(csv);
  }

  std::vector<ExperimentRow> all;
  if (grid.strategies.empty() || grid.mask_seeds.empty() ||
      grid.fit_seeds.empty() || grid.steps.empty()) {
    std::fprintf(stderr, "warning: empty experiment grid, nothing to run\n");
    return all;
  }

  for (uint64_t mask_seed : grid.mask_seeds) {
    MaskSpec mask;
    mask.hide_fraction = grid.hide_fraction;
    mask.seed = mask_seed;
    auto [masked, oracle] = apply_mask(full, mask);
    for (Strategy strategy : grid.strategies) {
      for (uint64_t fit_seed : grid.fit_seeds) {
        for (long step : grid.steps) {
          CampaignConfig cfg = grid.base;
          cfg.strategy = strategy;
          cfg.step = step;
          cfg.seed = fit_seed;
          try {
            const CampaignState state = run_campaign(masked, oracle, cfg);
            auto rows = rows_from_campaign(
                state, grid.dataset_name, strategy_name(strategy), fit_seed,
                mask_seed, step);
            for (const ExperimentRow& r : rows) {
              if (csv.is_open()) write_result_row(csv, r);
              all.push_back(r);
            }
            if (csv.is_open()) csv.flush();  // crash-tolerant appends
          } catch (const std::exception& e) {
            std::fprintf(stderr, "cell failed (%s seed=%llu mask=%llu s=%ld): %s\n",
                         strategy_name(strategy).c_str(),
                         static_cast<unsigned long long>(fit_seed),
                         static_cast<unsigned long long>(mask_seed), step,
                         e.what());
            if (csv.is_open()) {
              csv << "# cell-error strategy=" << strategy_name(strategy)
                  << " seed=" << fit_seed << " mask_seed=" << mask_seed
                  << " step=" << step << ": " << e.what() << '\n';
              csv.flush();
            }
          }
        }
      }
    }
  }
  return all;
}

NewNodeResult new_node_study(const PartialNetwork& full, uint32_t node,
                             uint32_t anchor, Strategy strategy, int iters,
                             const CampaignConfig& base) {
  full.check_node(node);
  full.check_node(anchor);
  if (!full.fully_observed())
    throw ContractViolation("new-node study needs a fully observed network");
  if (node == anchor || !full.is_edge(NodePair::of(node, anchor)))
    throw DataError(
        "new-node study: anchor must be connected to the node in the "
        "ground truth");
  if (iters < 1) throw UsageError("new-node study needs iters >= 1");

  MaskSpec mask;
  mask.mode = MaskSpec::Mode::NewNode;
  mask.node = node;
  mask.anchor = anchor;
  auto [net, oracle] = apply_mask(full, mask);

  NewNodeResult result;
  EmbeddingModel model;
  for (int it = 0; it < iters && net.num_unknown() > 0; ++it) {
    FitConfig fc = base.fit;
    fc.seed = mix_seed(base.seed, 0x6e6e66ULL + static_cast<uint64_t>(it));
    fc.warm_start = (it > 0 && !base.cold_start) ? &model : nullptr;
    model = fit(net, fc, base.gamma);

    ScoreContext ctx;
    ctx.seed = base.seed;
    ctx.iteration = it;
    ctx.pagerank = base.pagerank;
    ctx.ridge = base.ridge;
    ctx.exclude_self_pair = base.exclude_self_pair;
    const UtilityScores scores = score_pool(
        strategy, needs_embedding(strategy) ? &model : nullptr, net, ctx);

    NewNodeIteration record;
    record.iteration = it;
    record.ranking.reserve(scores.pairs.size());
    for (size_t k = 0; k < scores.pairs.size(); ++k)
      record.ranking.emplace_back(scores.pairs[k].other(node),
                                  scores.values[k]);
    std::sort(record.ranking.begin(), record.ranking.end(),
              [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;
              });
    result.top1.push_back(record.ranking.front().first);
    result.iterations.push_back(std::move(record));

    const NodePair q = NodePair::of(node, result.top1.back());
    reveal_in_place(net, q, oracle.query(q));
  }
  return result;
}

std::vector<StrategyTiming> timing_report(
    std::span<const ExperimentRow> rows) {
  std::vector<StrategyTiming> out;
  for (const ExperimentRow& r : rows) {
    if (r.scoring_seconds < 0) continue;  // round issued no queries
    auto it = std::find_if(out.begin(), out.end(), [&](const StrategyTiming& t) {
      return t.strategy == r.strategy;
    });
    if (it == out.end()) {
      out.push_back({r.strategy, 0.0, 0});
      it = out.end() - 1;
    }
    it->mean_scoring_seconds += r.scoring_seconds;
    it->rounds += 1;
  }
  for (StrategyTiming& t : out)
    if (t.rounds > 0) t.mean_scoring_seconds /= t.rounds;
  return out;
}

void write_scores_csv(const std::string& path, const UtilityScores& scores) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write scores CSV: " + path);
  out << "i,j,score,strategy,iteration\n";
  std::vector<size_t> order(scores.pairs.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (scores.values[a] != scores.values[b])
      return scores.values[a] > scores.values[b];
    return scores.pairs[a] < scores.pairs[b];
  });
  for (size_t idx : order) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", scores.values[idx]);
    out << scores.pairs[idx].a << ',' << scores.pairs[idx].b << ',' << buf
        << ',' << scores.strategy << ',' << scores.iteration << '\n';
  }
}

}  // namespace alpine
