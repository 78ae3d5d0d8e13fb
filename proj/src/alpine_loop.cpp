#include "alpine/alpine_loop.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "alpine/eval.hpp"
#include "alpine/mathutil.hpp"
#include "alpine/rng.hpp"

namespace alpine {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

nlohmann::json json_double(double v) {
  if (std::isnan(v)) return nullptr;  // JSON has no NaN
  return v;
}

double double_or_nan(const nlohmann::json& v) {
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return v.get<double>();
}

long resolve_budget(const CampaignConfig& cfg, size_t pool_size) {
  long b = -1;
  if (cfg.budget > 0 && cfg.budget_fraction > 0)
    throw UsageError("set either an absolute budget or a fraction, not both");
  if (cfg.budget > 0) {
    b = cfg.budget;
  } else if (cfg.budget_fraction > 0) {
    if (cfg.budget_fraction > 1.0)
      throw UsageError("budget fraction must lie in (0,1]");
    b = std::lround(cfg.budget_fraction * static_cast<double>(pool_size));
  } else {
    throw UsageError("campaign needs a budget (absolute or fraction)");
  }
  b = std::min<long>(b, static_cast<long>(pool_size));
  if (b < 1) throw UsageError("resolved budget is empty");
  return b;
}

// AUC over U(0) with every pair scored at its current model probability.
double pool0_auc(const CampaignState& st) {
  std::vector<double> scores;
  scores.reserve(st.initial_pool.size());
  for (const NodePair& p : st.initial_pool)
    scores.push_back(st.model.link_probability(p.a, p.b));
  const auto v = try_auc(scores, st.initial_labels);
  return v ? *v : std::numeric_limits<double>::quiet_NaN();
}

double remaining_auc(const CampaignState& st, const Oracle& oracle) {
  std::vector<double> scores;
  std::vector<int> labels;
  for (const NodePair& p : st.net.unknown_sorted()) {
    scores.push_back(st.model.link_probability(p.a, p.b));
    labels.push_back(oracle.query(p) == PairStatus::Connected ? 1 : 0);
  }
  const auto v = try_auc(scores, labels);
  return v ? *v : std::numeric_limits<double>::quiet_NaN();
}

// Runs from the state's current round to completion. When
// `model_ready` is set the current round's fit (and its trajectory
// record) were restored from a checkpoint and must not be redone.
CampaignState run_loop(CampaignState st, const Oracle& oracle,
                       const CampaignConfig& cfg, bool model_ready) {
  bool skip_fit = model_ready;
  while (true) {
    const auto round_start = Clock::now();
    if (!skip_fit) {
      IterationRecord rec;
      rec.iteration = st.iteration;
      rec.queries_used = st.budget - st.remaining;
      st.trajectory.push_back(rec);

      const auto fit_start = Clock::now();
      FitConfig fc = cfg.fit;
      fc.seed = mix_seed(cfg.seed,
                         0x666974ULL + static_cast<uint64_t>(st.iteration));
      fc.warm_start =
          (st.iteration > 0 && !cfg.cold_start) ? &st.model : nullptr;
      if (fc.warm_start && cfg.refit_max_epochs > 0)
        fc.max_epochs = cfg.refit_max_epochs;
      int epochs = 0;
      fc.epochs_run = &epochs;
      st.model = fit(st.net, fc, cfg.gamma);
      st.trajectory.back().fit_epochs = epochs;
      st.trajectory.back().fit_seconds = seconds_since(fit_start);
      st.trajectory.back().auc_initial_pool = pool0_auc(st);
      st.trajectory.back().auc_remaining = remaining_auc(st, oracle);

      const bool early_stop =
          cfg.early_stop_auc &&
          st.trajectory.back().auc_initial_pool >= *cfg.early_stop_auc;
      if (st.remaining == 0 || st.net.num_unknown() == 0 || early_stop) {
        st.trajectory.back().wall_seconds = seconds_since(round_start);
        st.finished = true;
        if (!cfg.checkpoint_path.empty())
          write_checkpoint(cfg.checkpoint_path, st, cfg);
        break;
      }
    }
    skip_fit = false;

    if (cfg.max_scoring_rounds >= 0 &&
        st.iteration >= cfg.max_scoring_rounds) {
      st.trajectory.back().wall_seconds = seconds_since(round_start);
      if (!cfg.checkpoint_path.empty())
        write_checkpoint(cfg.checkpoint_path, st, cfg);
      break;  // interrupted, resumable
    }

    ScoreContext ctx;
    ctx.seed = cfg.seed;
    ctx.iteration = st.iteration;
    ctx.pagerank = cfg.pagerank;
    ctx.ridge = cfg.ridge;
    ctx.exclude_self_pair = cfg.exclude_self_pair;

    const auto score_start = Clock::now();
    const UtilityScores scores = score_pool(
        cfg.strategy, needs_embedding(cfg.strategy) ? &st.model : nullptr,
        st.net, ctx);
    st.trajectory.back().scoring_seconds = seconds_since(score_start);

    const std::vector<NodePair> queries =
        select_top(scores, cfg.step, st.remaining);
    try {
      for (const NodePair& q : queries) {
        const PairStatus status = oracle.query(q);
        reveal_in_place(st.net, q, status);
        st.query_log.push_back({q, status, st.iteration});
        --st.remaining;
      }
    } catch (...) {
      // Abort with a consistent prefix preserved for resume.
      if (!cfg.checkpoint_path.empty())
        write_checkpoint(cfg.checkpoint_path, st, cfg);
      throw;
    }

    st.trajectory.back().wall_seconds = seconds_since(round_start);
    ++st.iteration;
    if (!cfg.checkpoint_path.empty())
      write_checkpoint(cfg.checkpoint_path, st, cfg);
  }
  return st;
}

}  // namespace

uint64_t CampaignConfig::fingerprint() const {
  Fnv1a h;
  h.update_string(strategy_name(strategy));
  h.update_u64(static_cast<uint64_t>(step));
  h.update_u64(static_cast<uint64_t>(budget));
  h.update_double(budget_fraction);
  h.update_double(gamma);
  h.update_double(ridge);
  h.update_u64(seed);
  h.update_u64(cold_start ? 1 : 0);
  h.update_u64(exclude_self_pair ? 1 : 0);
  h.update_double(early_stop_auc ? *early_stop_auc : -1.0);
  h.update_u64(static_cast<uint64_t>(fit.dim));
  h.update_u64(static_cast<uint64_t>(fit.max_epochs));
  h.update_u64(static_cast<uint64_t>(refit_max_epochs));
  h.update_double(fit.learning_rate);
  h.update_double(fit.tolerance);
  h.update_double(fit.init_scale);
  h.update_u64(fit.learn_beta ? 1 : 0);
  h.update_double(fit.beta_init);
  h.update_u64(fit.beta_dim_offset ? 1 : 0);
  h.update_u64(fit.exact_pair_limit);
  h.update_u64(static_cast<uint64_t>(fit.neg_samples_per_node));
  h.update_double(pagerank.damping);
  h.update_u64(static_cast<uint64_t>(pagerank.max_iters));
  h.update_double(pagerank.tolerance);
  return h.digest();
}

CampaignState run_campaign(const PartialNetwork& net0, const Oracle& oracle,
                           const CampaignConfig& cfg) {
  if (net0.num_unknown() == 0)
    throw ContractViolation("campaign needs a non-empty unknown pool");
  CampaignState st;
  st.net = net0;
  st.graph_hash = net0.content_hash();
  st.initial_pool = net0.unknown_sorted();
  st.initial_labels.reserve(st.initial_pool.size());
  for (const NodePair& p : st.initial_pool)
    st.initial_labels.push_back(
        oracle.query(p) == PairStatus::Connected ? 1 : 0);
  st.budget = st.remaining = resolve_budget(cfg, st.initial_pool.size());
  return run_loop(std::move(st), oracle, cfg, /*model_ready=*/false);
}

void write_checkpoint(const std::string& path, const CampaignState& state,
                      const CampaignConfig& cfg) {
  nlohmann::json j;
  j["format"] = "alpine-checkpoint v1";
  j["graph_hash"] = state.graph_hash;
  j["config_fingerprint"] = cfg.fingerprint();
  j["iteration"] = state.iteration;
  j["budget"] = state.budget;
  j["remaining"] = state.remaining;
  j["finished"] = state.finished;
  j["beta"] = state.model.beta;
  j["gamma"] = state.model.gamma;

  auto& log = j["query_log"] = nlohmann::json::array();
  for (const QueryRecord& q : state.query_log)
    log.push_back({q.pair.a, q.pair.b,
                   q.status == PairStatus::Connected ? 1 : 0, q.iteration});

  auto& coords = j["coords"] = nlohmann::json::array();
  for (Eigen::Index r = 0; r < state.model.coords.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < state.model.coords.cols(); ++c)
      row.push_back(state.model.coords(r, c));
    coords.push_back(std::move(row));
  }

  auto& traj = j["trajectory"] = nlohmann::json::array();
  for (const IterationRecord& r : state.trajectory) {
    traj.push_back({{"iteration", r.iteration},
                    {"queries_used", r.queries_used},
                    {"auc_initial_pool", json_double(r.auc_initial_pool)},
                    {"auc_remaining", json_double(r.auc_remaining)},
                    {"fit_seconds", r.fit_seconds},
                    {"scoring_seconds", r.scoring_seconds},
                    {"wall_seconds", r.wall_seconds},
                    {"fit_epochs", r.fit_epochs}});
  }

  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out << j.dump();
}

CampaignState resume(const std::string& checkpoint_path,
                     const PartialNetwork& net0, const Oracle& oracle,
                     const CampaignConfig& cfg) {
  std::ifstream in(checkpoint_path);
  if (!in) throw DataError("cannot open checkpoint: " + checkpoint_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed checkpoint: " + std::string(e.what()));
  }
  if (j.value("format", "") != std::string("alpine-checkpoint v1"))
    throw DataError("unsupported checkpoint format");
  if (j.at("graph_hash").get<uint64_t>() != net0.content_hash())
    throw DataError("checkpoint does not match this graph (hash mismatch)");
  if (j.at("config_fingerprint").get<uint64_t>() != cfg.fingerprint())
    throw DataError("checkpoint does not match this configuration");

  CampaignState st;
  st.net = net0;
  st.graph_hash = net0.content_hash();
  st.initial_pool = net0.unknown_sorted();
  for (const NodePair& p : st.initial_pool)
    st.initial_labels.push_back(
        oracle.query(p) == PairStatus::Connected ? 1 : 0);
  st.iteration = j.at("iteration").get<int>();
  st.budget = j.at("budget").get<long>();
  st.remaining = j.at("remaining").get<long>();
  st.finished = j.at("finished").get<bool>();

  for (const auto& q : j.at("query_log")) {
    QueryRecord rec;
    rec.pair = NodePair::of(q.at(0).get<uint32_t>(), q.at(1).get<uint32_t>());
    rec.status = q.at(2).get<int>() == 1 ? PairStatus::Connected
                                         : PairStatus::Disconnected;
    rec.iteration = q.at(3).get<int>();
    reveal_in_place(st.net, rec.pair, rec.status);
    st.query_log.push_back(rec);
  }

  const auto& coords = j.at("coords");
  const auto rows = static_cast<Eigen::Index>(coords.size());
  if (rows != static_cast<Eigen::Index>(net0.num_nodes()))
    throw DataError("checkpoint embedding has wrong node count");
  const auto cols = static_cast<Eigen::Index>(coords.at(0).size());
  st.model.coords = Eigen::MatrixXd(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      st.model.coords(r, c) = coords.at(r).at(c).get<double>();
  st.model.beta = j.at("beta").get<double>();
  st.model.gamma = j.at("gamma").get<double>();

  for (const auto& t : j.at("trajectory")) {
    IterationRecord r;
    r.iteration = t.at("iteration").get<int>();
    r.queries_used = t.at("queries_used").get<long>();
    r.auc_initial_pool = double_or_nan(t.at("auc_initial_pool"));
    r.auc_remaining = double_or_nan(t.at("auc_remaining"));
    r.fit_seconds = t.at("fit_seconds").get<double>();
    r.scoring_seconds = t.at("scoring_seconds").get<double>();
    r.wall_seconds = t.at("wall_seconds").get<double>();
    r.fit_epochs = t.at("fit_epochs").get<int>();
    st.trajectory.push_back(r);
  }

  if (st.finished || st.remaining == 0) return st;  // nothing left to do

  // A trajectory record for the current round with no scoring time means
  // the checkpoint was taken between fit and scoring: the restored model
  // already is that round's fit.
  const bool model_ready = !st.trajectory.empty() &&
                           st.trajectory.back().iteration == st.iteration &&
                           st.trajectory.back().scoring_seconds < 0;
  // A mid-reveal abort leaves a scored record for the current round;
  // rebuild that round from the fit.
  if (!model_ready && !st.trajectory.empty() &&
      st.trajectory.back().iteration == st.iteration)
    st.trajectory.pop_back();
  return run_loop(std::move(st), oracle, cfg, model_ready);
}

}  // namespace alpine
