// alpine: active link prediction on partially observed networks.
#include <CLI11.hpp>
#include <cstdio>
#include <limits>
#include <fstream>
#include <iostream>
#include <sstream>

#include "alpine/eval.hpp"
#include "alpine/synthetic.hpp"

namespace {

using namespace alpine;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

uint32_t resolve_node(const PartialNetwork& net, const std::string& token) {
  const int64_t by_label = net.find_label(token);
  if (by_label >= 0) return static_cast<uint32_t>(by_label);
  try {
    const unsigned long v = std::stoul(token);
    if (v < net.num_nodes()) return static_cast<uint32_t>(v);
  } catch (...) {
  }
  throw DataError("unknown node '" + token + "'");
}

std::vector<Strategy> parse_strategy_list(const std::string& csv) {
  std::vector<Strategy> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "all") {
      out.assign(kAllStrategies.begin(), kAllStrategies.end());
      continue;
    }
    if (!item.empty()) out.push_back(parse_strategy(item));
  }
  if (out.empty()) throw UsageError("no strategies given");
  return out;
}

template <typename T>
std::vector<T> parse_num_list(const std::string& csv, const char* what) {
  std::vector<T> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(static_cast<T>(std::stoll(item)));
    } catch (...) {
      throw UsageError(std::string("bad ") + what + " value '" + item + "'");
    }
  }
  return out;
}

struct CommonModelOpts {
  int dim = 8;
  double gamma = 1.0;
  double ridge = 1e-4;
  int epochs = 500;
  double lr = 0.1;
  double tolerance = 1e-6;
  uint64_t seed = 0;
  bool cold_start = false;
  bool exclude_self_pair = false;
  bool learn_beta = false;
  double beta_override = std::numeric_limits<double>::quiet_NaN();

  void attach(CLI::App* cmd) {
    cmd->add_option("--dim", dim, "embedding dimension");
    cmd->add_option("--gamma", gamma, "embedding spread parameter");
    cmd->add_option("--ridge", ridge, "covariance ridge epsilon");
    cmd->add_option("--epochs", epochs, "max fit epochs");
    cmd->add_option("--lr", lr, "initial learning rate");
    cmd->add_option("--tol", tolerance, "fit stopping tolerance");
    cmd->add_option("--seed", seed, "embedding/campaign seed");
    cmd->add_flag("--cold-start", cold_start,
                  "re-randomize the embedding every iteration");
    cmd->add_flag("--exclude-self-pair", exclude_self_pair,
                  "drop the queried pair's own terms from the v-opt sums");
    cmd->add_flag("--learn-beta", learn_beta,
                  "learn the global bias by MLE instead of pinning it to "
                  "the density-derived prior");
    cmd->add_option("--beta", beta_override,
                    "fix the global bias at this value");
  }

  void fill(CampaignConfig& cfg) const {
    cfg.fit.dim = dim;
    cfg.fit.max_epochs = epochs;
    cfg.fit.learning_rate = lr;
    cfg.fit.tolerance = tolerance;
    cfg.gamma = gamma;
    cfg.ridge = ridge;
    cfg.seed = seed;
    cfg.cold_start = cold_start;
    cfg.exclude_self_pair = exclude_self_pair;
    cfg.fit.learn_beta = learn_beta;
    cfg.fit.beta_init = beta_override;
  }
};

EmbeddingModel fit_for_scoring(const PartialNetwork& net,
                               const CommonModelOpts& opts) {
  FitConfig fc;
  fc.dim = opts.dim;
  fc.max_epochs = opts.epochs;
  fc.learning_rate = opts.lr;
  fc.tolerance = opts.tolerance;
  fc.seed = opts.seed;
  fc.learn_beta = opts.learn_beta;
  fc.beta_dim_offset = true;
  fc.beta_init = opts.beta_override;
  return fit(net, fc, opts.gamma);
}

int cmd_run(const std::string& graph, const std::string& dataset,
            const CommonModelOpts& opts, Strategy strategy, double hide_frac,
            uint64_t mask_seed, const std::string& mask_file, long budget,
            double budget_frac, long step, double early_stop,
            const std::string& out_csv, const std::string& checkpoint,
            bool do_resume, const std::string& mask_out,
            const std::string& embedding_out) {
  const PartialNetwork full = load_edge_list(graph);

  PartialNetwork masked;
  Oracle oracle(full);
  if (!mask_file.empty()) {
    auto [m, o] = apply_mask_pairs(full, read_mask_file(mask_file));
    masked = std::move(m);
    oracle = std::move(o);
  } else {
    MaskSpec spec;
    spec.hide_fraction = hide_frac;
    spec.seed = mask_seed;
    auto [m, o] = apply_mask(full, spec);
    masked = std::move(m);
    oracle = std::move(o);
  }
  if (!mask_out.empty()) write_mask_file(mask_out, masked);

  CampaignConfig cfg;
  opts.fill(cfg);
  cfg.strategy = strategy;
  cfg.step = step;
  cfg.budget = budget;
  cfg.budget_fraction = budget_frac;
  cfg.checkpoint_path = checkpoint;
  if (early_stop > 0) cfg.early_stop_auc = early_stop;

  const CampaignState state =
      do_resume ? resume(checkpoint, masked, oracle, cfg)
                : run_campaign(masked, oracle, cfg);

  const auto rows = rows_from_campaign(state, dataset, strategy_name(strategy),
                                       opts.seed, mask_seed, step);
  if (!out_csv.empty()) {
    std::ofstream out(out_csv);
    if (!out) throw DataError("cannot write results CSV: " + out_csv);
    write_results_header(out);
    for (const auto& r : rows) write_result_row(out, r);
  }
  if (!embedding_out.empty()) write_embedding(embedding_out, state.model);

  const IterationRecord& first = state.trajectory.front();
  const IterationRecord& last = state.trajectory.back();
  std::printf("%s on %s: %zu queries in %d rounds, AUC(U0) %.4f -> %.4f\n",
              strategy_name(strategy).c_str(), dataset.c_str(),
              state.query_log.size(), state.iteration,
              first.auc_initial_pool, last.auc_initial_pool);
  return 0;
}

int cmd_experiment(const std::string& graph, const std::string& dataset,
                   const CommonModelOpts& opts, const std::string& strategies,
                   const std::string& mask_seeds, const std::string& seeds,
                   const std::string& steps, double hide_frac, long budget,
                   double budget_frac, const std::string& out_csv) {
  const PartialNetwork full = load_edge_list(graph);
  ExperimentGrid grid;
  grid.dataset_name = dataset;
  grid.hide_fraction = hide_frac;
  grid.strategies = parse_strategy_list(strategies);
  grid.mask_seeds = parse_num_list<uint64_t>(mask_seeds, "mask seed");
  grid.fit_seeds = parse_num_list<uint64_t>(seeds, "seed");
  grid.steps = parse_num_list<long>(steps, "step");
  opts.fill(grid.base);
  grid.base.budget = budget;
  grid.base.budget_fraction = budget_frac;

  const auto rows = run_experiment(full, grid, out_csv);
  std::printf("wrote %zu result rows", rows.size());
  if (!out_csv.empty()) std::printf(" to %s", out_csv.c_str());
  std::printf("\n");

  for (const StrategyTiming& t : timing_report(rows))
    std::printf("  %-10s mean scoring %.6f s over %d rounds\n",
                t.strategy.c_str(), t.mean_scoring_seconds, t.rounds);
  return 0;
}

int cmd_new_node(const std::string& graph, const std::string& node_token,
                 const std::string& anchor_token, const CommonModelOpts& opts,
                 Strategy strategy, int iters, const std::string& out_csv) {
  const PartialNetwork full = load_edge_list(graph);
  const uint32_t node = resolve_node(full, node_token);
  const uint32_t anchor = resolve_node(full, anchor_token);

  CampaignConfig base;
  opts.fill(base);
  const NewNodeResult res =
      new_node_study(full, node, anchor, strategy, iters, base);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_csv.empty()) {
    file.open(out_csv);
    if (!file) throw DataError("cannot write ranking CSV: " + out_csv);
    out = &file;
  }
  (*out) << "iteration,rank,candidate,label,score\n";
  const auto& labels = full.labels();
  for (const NewNodeIteration& it : res.iterations) {
    int rank = 1;
    for (const auto& [candidate, score] : it.ranking) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.12g", score);
      (*out) << it.iteration << ',' << rank++ << ',' << candidate << ','
             << (candidate < labels.size() ? labels[candidate] : "") << ','
             << buf << '\n';
    }
  }
  std::fprintf(stderr, "top-1 per iteration:");
  for (uint32_t t : res.top1) std::fprintf(stderr, " %u", t);
  std::fprintf(stderr, "\n");
  return 0;
}

int cmd_score(const std::string& graph, const std::string& mask_file,
              const CommonModelOpts& opts, Strategy strategy,
              const std::string& out_csv, const std::string& embedding_out) {
  const PartialNetwork full = load_edge_list(graph);
  auto [masked, oracle] = apply_mask_pairs(full, read_mask_file(mask_file));

  EmbeddingModel model;
  const bool fitted = needs_embedding(strategy);
  if (fitted) model = fit_for_scoring(masked, opts);

  ScoreContext ctx;
  ctx.seed = opts.seed;
  ctx.ridge = opts.ridge;
  ctx.exclude_self_pair = opts.exclude_self_pair;
  const UtilityScores scores =
      score_pool(strategy, fitted ? &model : nullptr, masked, ctx);
  write_scores_csv(out_csv, scores);
  if (!embedding_out.empty() && fitted) write_embedding(embedding_out, model);
  std::printf("scored %zu candidate pairs with %s\n", scores.pairs.size(),
              strategy_name(strategy).c_str());
  return 0;
}

int cmd_auc(const std::string& scores_file) {
  std::ifstream in(scores_file);
  if (!in) throw DataError("cannot open scores file: " + scores_file);
  std::string header;
  if (!std::getline(in, header)) throw DataError("empty scores file");

  // Locate score/label columns from the header; default to the first two
  // columns of a headerless file.
  int score_col = 0, label_col = 1;
  {
    std::stringstream ss(header);
    std::string col;
    int idx = 0;
    bool named = false;
    while (std::getline(ss, col, ',')) {
      if (col == "score") {
        score_col = idx;
        named = true;
      }
      if (col == "label") {
        label_col = idx;
        named = true;
      }
      ++idx;
    }
    if (!named) {
      in.clear();
      in.seekg(0);
    }
  }

  AucInput input;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    int idx = 0;
    double score = 0.0;
    int label = -1;
    while (std::getline(ss, cell, ',')) {
      try {
        if (idx == score_col) score = std::stod(cell);
        if (idx == label_col) label = std::stoi(cell);
      } catch (...) {
        throw DataError("bad numeric cell in scores file at data line " +
                        std::to_string(lineno));
      }
      ++idx;
    }
    if (label != 0 && label != 1)
      throw DataError("label not in {0,1} at data line " +
                      std::to_string(lineno));
    input.scores.push_back(score);
    input.labels.push_back(label);
  }
  std::printf("%.12g\n", auc(input));
  return 0;
}

int cmd_synth(const std::string& model, const std::string& out, uint64_t seed,
              const std::string& sizes, double p_in, double p_out, double skew,
              long edges, uint32_t nodes, uint32_t leaves, double radius,
              double scatter, double rewire, const std::string& comment) {
  PartialNetwork net;
  if (model == "latent") {
    LatentSpec spec;
    spec.community_sizes = parse_num_list<uint32_t>(sizes, "community size");
    if (spec.community_sizes.empty()) throw UsageError("latent needs --sizes");
    if (edges <= 0) throw UsageError("latent needs --edges");
    spec.center_radius = radius;
    spec.scatter = scatter;
    spec.degree_skew = skew;
    spec.rewire_fraction = rewire;
    spec.target_edges = edges;
    spec.seed = seed;
    net = latent_community_graph(spec);
  } else if (model == "sbm") {
    SbmSpec spec;
    spec.block_sizes = parse_num_list<uint32_t>(sizes, "block size");
    if (spec.block_sizes.empty()) throw UsageError("sbm needs --sizes");
    spec.p_in = p_in;
    spec.p_out = p_out;
    spec.weight_skew = skew;
    spec.target_edges = edges;
    spec.seed = seed;
    net = sbm_graph(spec);
  } else if (model == "two-hub") {
    net = two_hub_new_node_instance(leaves).full;
  } else if (model == "random") {
    net = random_connected_graph(nodes, edges, seed);
  } else {
    throw UsageError("unknown synth model '" + model +
                     "' (valid: latent, sbm, two-hub, random)");
  }
  write_edge_list(out, net, comment);
  std::printf("wrote %s: %u nodes, %zu edges\n", out.c_str(), net.num_nodes(),
              net.num_edges());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ALPINE: active link prediction in partially observed networks"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run one active-learning campaign");
  std::string graph, dataset = "graph", out_csv, checkpoint, mask_file;
  std::string mask_out, embedding_out, strategy_name_arg = "v-opt";
  double hide_frac = 0.2, budget_frac = -1.0, early_stop = -1.0;
  long budget = -1, step = 10;
  uint64_t mask_seed = 0;
  bool do_resume = false;
  CommonModelOpts run_opts;
  run->add_option("--graph", graph, "edge list file")->required();
  run->add_option("--dataset", dataset, "dataset name for the CSV");
  run->add_option("--strategy", strategy_name_arg, "query strategy");
  run->add_option("--hide-frac", hide_frac, "fraction of pairs masked");
  run->add_option("--mask", mask_file, "mask file to replay instead");
  run->add_option("--mask-seed", mask_seed, "mask seed");
  run->add_option("--budget", budget, "absolute query budget");
  run->add_option("--budget-frac", budget_frac, "budget as fraction of |U|");
  run->add_option("--step", step, "queries per iteration");
  run->add_option("--early-stop-auc", early_stop, "stop once AUC reaches this");
  run->add_option("--out", out_csv, "results CSV path");
  run->add_option("--checkpoint", checkpoint, "checkpoint path");
  run->add_flag("--resume", do_resume, "resume from --checkpoint");
  run->add_option("--mask-out", mask_out, "write the U set for replay");
  run->add_option("--save-embedding", embedding_out, "final embedding path");
  run_opts.attach(run);

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a strategy/seed grid");
  std::string exp_graph, exp_dataset = "graph", exp_out;
  std::string strategies = "all", mask_seeds = "0", seeds = "0", steps = "10";
  double exp_hide = 0.2, exp_budget_frac = 0.1;
  long exp_budget = -1;
  CommonModelOpts exp_opts;
  exp->add_option("--graph", exp_graph, "edge list file")->required();
  exp->add_option("--dataset", exp_dataset, "dataset name for the CSV");
  exp->add_option("--strategies", strategies,
                  "comma list of strategies, or 'all'");
  exp->add_option("--mask-seeds", mask_seeds, "comma list of mask seeds");
  exp->add_option("--seeds", seeds, "comma list of embedding seeds");
  exp->add_option("--steps", steps, "comma list of step sizes");
  exp->add_option("--hide-frac", exp_hide, "fraction of pairs masked");
  exp->add_option("--budget", exp_budget, "absolute query budget");
  exp->add_option("--budget-frac", exp_budget_frac,
                  "budget as fraction of |U|");
  exp->add_option("--out", exp_out, "results CSV path");
  exp_opts.attach(exp);

  // new-node
  auto* nn = app.add_subcommand("new-node", "rank queries for a new node");
  std::string nn_graph, nn_node, nn_anchor, nn_out,
      nn_strategy_name = "v-opt";
  int nn_iters = 5;
  CommonModelOpts nn_opts;
  nn->add_option("--graph", nn_graph, "edge list file")->required();
  nn->add_option("--node", nn_node, "new node (label or index)")->required();
  nn->add_option("--anchor", nn_anchor, "anchor node (label or index)")
      ->required();
  nn->add_option("--strategy", nn_strategy_name, "query strategy");
  nn->add_option("--iters", nn_iters, "number of one-query iterations");
  nn->add_option("--out", nn_out, "ranking CSV path (default stdout)");
  nn_opts.attach(nn);

  // score
  auto* score = app.add_subcommand("score", "score a pool once and dump CSV");
  std::string sc_graph, sc_mask, sc_out = "scores.csv", sc_embedding,
      sc_strategy_name = "v-opt";
  CommonModelOpts sc_opts;
  score->add_option("--graph", sc_graph, "edge list file")->required();
  score->add_option("--mask", sc_mask, "mask file listing U")->required();
  score->add_option("--strategy", sc_strategy_name, "query strategy");
  score->add_option("--out", sc_out, "scores CSV path");
  score->add_option("--save-embedding", sc_embedding, "embedding path");
  sc_opts.attach(score);

  // auc
  auto* auc_cmd = app.add_subcommand("auc", "AUC of a score/label CSV");
  std::string auc_file;
  auc_cmd->add_option("--scores", auc_file, "CSV with score and label columns")
      ->required();

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic edge list");
  std::string sy_model = "sbm", sy_out, sy_sizes = "", sy_comment = "";
  double sy_pin = 0.2, sy_pout = 0.02, sy_skew = 0.0;
  long sy_edges = -1;
  uint32_t sy_nodes = 100, sy_leaves = 10;
  uint64_t sy_seed = 0;
  double sy_radius = 4.0, sy_scatter = 1.0, sy_rewire = 0.0;
  synth->add_option("--model", sy_model, "latent | sbm | two-hub | random");
  synth->add_option("--out", sy_out, "output edge list")->required();
  synth->add_option("--seed", sy_seed, "generator seed");
  synth->add_option("--sizes", sy_sizes, "sbm block sizes, comma list");
  synth->add_option("--p-in", sy_pin, "sbm within-block probability");
  synth->add_option("--p-out", sy_pout, "sbm between-block probability");
  synth->add_option("--skew", sy_skew, "degree-weight skew exponent");
  synth->add_option("--edges", sy_edges, "exact edge count");
  synth->add_option("--nodes", sy_nodes, "node count (random model)");
  synth->add_option("--leaves", sy_leaves, "leaves per hub (two-hub model)");
  synth->add_option("--radius", sy_radius, "community center radius (latent)");
  synth->add_option("--scatter", sy_scatter, "node scatter (latent)");
  synth->add_option("--rewire", sy_rewire, "fraction of edges rewired (latent)");
  synth->add_option("--comment", sy_comment, "header comment line");

  try {
    app.parse(argc, argv);
    if (run->parsed())
      return cmd_run(graph, dataset, run_opts,
                     parse_strategy(strategy_name_arg), hide_frac, mask_seed,
                     mask_file, budget, budget_frac, step, early_stop, out_csv,
                     checkpoint, do_resume, mask_out, embedding_out);
    if (exp->parsed())
      return cmd_experiment(exp_graph, exp_dataset, exp_opts, strategies,
                            mask_seeds, seeds, steps, exp_hide, exp_budget,
                            exp_budget_frac, exp_out);
    if (nn->parsed())
      return cmd_new_node(nn_graph, nn_node, nn_anchor, nn_opts,
                          parse_strategy(nn_strategy_name), nn_iters, nn_out);
    if (score->parsed())
      return cmd_score(sc_graph, sc_mask, sc_opts,
                       parse_strategy(sc_strategy_name), sc_out, sc_embedding);
    if (auc_cmd->parsed()) return cmd_auc(auc_file);
    if (synth->parsed())
      return cmd_synth(sy_model, sy_out, sy_seed, sy_sizes, sy_pin, sy_pout,
                       sy_skew, sy_edges, sy_nodes, sy_leaves, sy_radius,
                       sy_scatter, sy_rewire, sy_comment);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kExitNumeric;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const ContractViolation& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
}
