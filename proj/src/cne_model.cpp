#include "alpine/cne_model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "alpine/mathutil.hpp"
#include "alpine/rng.hpp"
#include "alpine/threads.hpp"

namespace alpine {

double EmbeddingModel::link_probability(uint32_t i, uint32_t j) const {
  return clamp_probability(sigmoid(pair_logit(i, j)));
}

uint64_t EmbeddingModel::fingerprint() const {
  Fnv1a h;
  h.update_u64(num_nodes());
  h.update_u64(static_cast<uint64_t>(dim()));
  h.update_double(gamma);
  h.update_double(beta);
  for (Eigen::Index r = 0; r < coords.rows(); ++r)
    for (Eigen::Index c = 0; c < coords.cols(); ++c)
      h.update_double(coords(r, c));
  return h.digest();
}

namespace {

bool use_exact_sums(const PartialNetwork& net, const FitConfig& cfg) {
  return net.num_nodes() <= cfg.exact_pair_limit;
}

// Exact log-likelihood. Per-node partials over j > i, reduced in node
// order, so the result is identical for any thread count.
double loglik_exact(const Eigen::MatrixXd& X, double beta, double gamma,
                    const PartialNetwork& net) {
  const uint32_t n = net.num_nodes();
  std::vector<double> partial(n, 0.0);
  parallel_for(n, [&](size_t i) {
    double acc = 0.0;
    for (uint32_t j = static_cast<uint32_t>(i) + 1; j < n; ++j) {
      const NodePair p{static_cast<uint32_t>(i), j};
      if (net.is_unknown(p)) continue;
      const double z =
          beta - 0.5 * gamma * (X.row(i) - X.row(j)).squaredNorm();
      acc += net.is_edge(p) ? log_sigmoid(z) : log_one_minus_sigmoid(z);
    }
    partial[i] = acc;
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

// Exact gradient; row i accumulated over all j != i in ascending order,
// beta partial assigned to the pair's smaller endpoint.
Gradient gradient_exact(const Eigen::MatrixXd& X, double beta, double gamma,
                        const PartialNetwork& net) {
  const uint32_t n = net.num_nodes();
  const auto d = X.cols();
  Gradient g;
  g.coords = Eigen::MatrixXd::Zero(n, d);
  std::vector<double> beta_partial(n, 0.0);
  parallel_for(n, [&](size_t i) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(d);
    double bp = 0.0;
    for (uint32_t j = 0; j < n; ++j) {
      if (j == static_cast<uint32_t>(i)) continue;
      const NodePair p = NodePair::of(static_cast<uint32_t>(i), j);
      if (net.is_unknown(p)) continue;
      const double z =
          beta - 0.5 * gamma * (X.row(i) - X.row(j)).squaredNorm();
      const double resid = (net.is_edge(p) ? 1.0 : 0.0) - sigmoid(z);
      row += gamma * resid * (X.row(j) - X.row(i));
      if (j > i) bp += resid;
    }
    g.coords.row(i) = row;
    beta_partial[i] = bp;
  });
  double bsum = 0.0;
  for (double v : beta_partial) bsum += v;
  g.beta = bsum;
  return g;
}

// Subsampled estimates for large n: links and unknown-incident pairs are
// enumerated exactly, disconnected partners estimated from m uniform
// samples per node with weight (#candidates / m).
struct SampledTerms {
  double loglik = 0.0;
  Gradient grad;
};

SampledTerms eval_subsampled(const Eigen::MatrixXd& X, double beta,
                             double gamma, const PartialNetwork& net,
                             int samples_per_node, uint64_t epoch_seed,
                             bool want_grad) {
  const uint32_t n = net.num_nodes();
  const auto d = X.cols();
  SampledTerms out;
  if (want_grad) {
    out.grad.coords = Eigen::MatrixXd::Zero(n, d);
    out.grad.beta = 0.0;
  }
  const auto eadj = net.edge_adjacency();
  const auto uadj = net.unknown_adjacency();
  std::vector<double> ll_partial(n, 0.0), beta_partial(n, 0.0);

  parallel_for(n, [&](size_t is) {
    const auto i = static_cast<uint32_t>(is);
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(d);
    double ll = 0.0, bp = 0.0;

    for (uint32_t j : eadj[i]) {
      const double z =
          beta - 0.5 * gamma * (X.row(i) - X.row(j)).squaredNorm();
      const double pz = sigmoid(z);
      if (want_grad) row += gamma * (1.0 - pz) * (X.row(j) - X.row(i));
      // Halved so that the pair, visited from both endpoints, counts once.
      ll += 0.5 * log_sigmoid(z);
      bp += 0.5 * (1.0 - pz);
    }

    const uint64_t candidates =
        static_cast<uint64_t>(n) - 1 - eadj[i].size() - uadj[i].size();
    if (candidates > 0 && samples_per_node > 0) {
      Rng rng(mix_seed(epoch_seed, 0x6e656773ULL + i));
      int kept = 0;
      double sll = 0.0, sbp = 0.0;
      Eigen::RowVectorXd srow = Eigen::RowVectorXd::Zero(d);
      // Rejection against E and U; expected acceptance is high in sparse
      // networks.
      int attempts = 0;
      const int max_attempts = samples_per_node * 8 + 64;
      while (kept < samples_per_node && attempts < max_attempts) {
        ++attempts;
        const auto j = static_cast<uint32_t>(rng.uniform_below(n));
        if (j == i) continue;
        const NodePair p = NodePair::of(i, j);
        if (net.is_edge(p) || net.is_unknown(p)) continue;
        ++kept;
        const double z =
            beta - 0.5 * gamma * (X.row(i) - X.row(j)).squaredNorm();
        const double pz = sigmoid(z);
        if (want_grad) srow += gamma * (0.0 - pz) * (X.row(j) - X.row(i));
        sll += 0.5 * log_one_minus_sigmoid(z);
        sbp += 0.5 * (0.0 - pz);
      }
      if (kept > 0) {
        const double w = static_cast<double>(candidates) / kept;
        if (want_grad) row += w * srow;
        ll += w * sll;
        bp += w * sbp;
      }
    }
    if (want_grad) out.grad.coords.row(i) = row;
    ll_partial[is] = ll;
    beta_partial[is] = bp;
  });

  for (uint32_t i = 0; i < n; ++i) {
    out.loglik += ll_partial[i];
    if (want_grad) out.grad.beta += beta_partial[i];
  }
  return out;
}

double initial_beta(const PartialNetwork& net, const FitConfig& cfg) {
  if (!std::isnan(cfg.beta_init)) return cfg.beta_init;
  const double observed =
      static_cast<double>(net.num_edges()) + net.num_disconnected();
  // Laplace-smoothed observed link density.
  const double density = (net.num_edges() + 1.0) / (observed + 2.0);
  const double offset = cfg.beta_dim_offset ? cfg.dim * std::log(2.0) : 0.0;
  return logit(density) + offset;
}

}  // namespace

double log_likelihood(const EmbeddingModel& model, const PartialNetwork& net) {
  if (model.num_nodes() != net.num_nodes())
    throw ContractViolation("model/network node count mismatch");
  return loglik_exact(model.coords, model.beta, model.gamma, net);
}

Gradient gradient(const EmbeddingModel& model, const PartialNetwork& net) {
  if (model.num_nodes() != net.num_nodes())
    throw ContractViolation("model/network node count mismatch");
  return gradient_exact(model.coords, model.beta, model.gamma, net);
}

EmbeddingModel fit(const PartialNetwork& net, const FitConfig& cfg,
                   double gamma) {
  const uint32_t n = net.num_nodes();
  if (n < 2) throw ContractViolation("fit needs at least two nodes");
  if (cfg.dim < 1) throw ContractViolation("fit needs dim >= 1");
  if (cfg.max_epochs < 1) throw ContractViolation("fit needs max_epochs >= 1");
  if (gamma <= 0.0) throw ContractViolation("gamma must be positive");

  EmbeddingModel model;
  model.gamma = gamma;
  if (cfg.warm_start != nullptr) {
    if (cfg.warm_start->num_nodes() != n)
      throw ContractViolation("warm start embedding has wrong node count");
    model.coords = cfg.warm_start->coords;
    model.beta = cfg.warm_start->beta;
    // A pinned bias is a function of the observed density, which moves as
    // pairs are revealed; refresh it instead of carrying the stale value.
    if (!cfg.learn_beta) model.beta = initial_beta(net, cfg);
  } else {
    const double scale =
        cfg.init_scale > 0.0 ? cfg.init_scale : 1.0 / std::sqrt(cfg.dim);
    Rng rng(mix_seed(cfg.seed, 0x696e6974ULL));
    model.coords = Eigen::MatrixXd(n, cfg.dim);
    for (uint32_t i = 0; i < n; ++i)
      for (int k = 0; k < cfg.dim; ++k) model.coords(i, k) = scale * rng.normal();
    model.beta = initial_beta(net, cfg);
  }

  const bool exact = use_exact_sums(net, cfg);
  const auto eval_ll = [&](const Eigen::MatrixXd& X, double beta,
                           uint64_t epoch_seed) {
    if (exact) return loglik_exact(X, beta, gamma, net);
    return eval_subsampled(X, beta, gamma, net, cfg.neg_samples_per_node,
                           epoch_seed, false)
        .loglik;
  };

  double lr = cfg.learning_rate;
  const double lr_cap = cfg.learning_rate * 10.0;
  uint64_t epoch_seed = mix_seed(cfg.seed, 0x65706f63ULL);
  double ll = eval_ll(model.coords, model.beta, epoch_seed);
  if (!std::isfinite(ll))
    throw NumericError("non-finite likelihood at initialization");
  if (cfg.likelihood_trace) cfg.likelihood_trace->push_back(ll);

  const size_t param_count = static_cast<size_t>(n) * cfg.dim + 1;
  int epochs = 0;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    epochs = epoch + 1;
    epoch_seed = mix_seed(cfg.seed, 0x65706f63ULL + epoch);
    Gradient g;
    if (exact) {
      g = gradient_exact(model.coords, model.beta, gamma, net);
    } else {
      auto terms = eval_subsampled(model.coords, model.beta, gamma, net,
                                   cfg.neg_samples_per_node, epoch_seed, true);
      g = std::move(terms.grad);
      ll = terms.loglik;  // accept test below must use the same sample
    }

    if (!cfg.learn_beta) g.beta = 0.0;

    bool accepted = false;
    double new_ll = ll;
    Eigen::MatrixXd new_X;
    double new_beta = model.beta;
    for (int backoff = 0; backoff < 40; ++backoff) {
      new_X = model.coords + lr * g.coords;
      new_beta = model.beta + lr * g.beta;
      new_ll = eval_ll(new_X, new_beta, epoch_seed);
      if (!std::isfinite(new_ll))
        throw NumericError("non-finite likelihood during optimization at epoch " +
                           std::to_string(epoch));
      if (new_ll >= ll - 1e-12) {
        accepted = true;
        break;
      }
      lr *= 0.5;
    }
    if (!accepted) break;  // step size exhausted; at a (numerical) optimum

    const double mean_update =
        (lr * (g.coords.cwiseAbs().sum() + std::abs(g.beta))) /
        static_cast<double>(param_count);
    model.coords = std::move(new_X);
    model.beta = new_beta;
    ll = new_ll;
    if (cfg.likelihood_trace) cfg.likelihood_trace->push_back(ll);
    lr = std::min(lr * 1.05, lr_cap);
    if (mean_update < cfg.tolerance) break;
  }

  if (cfg.epochs_run) *cfg.epochs_run = epochs;
  if (!model.coords.allFinite() || !std::isfinite(model.beta))
    throw NumericError("non-finite embedding after optimization");
  return model;
}

void write_embedding(const std::string& path, const EmbeddingModel& model) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write embedding file: " + path);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", model.gamma);
  out << model.num_nodes() << ' ' << model.dim() << ' ' << buf;
  std::snprintf(buf, sizeof(buf), "%.17g", model.beta);
  out << ' ' << buf << '\n';
  for (Eigen::Index i = 0; i < model.coords.rows(); ++i) {
    for (Eigen::Index k = 0; k < model.coords.cols(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", model.coords(i, k));
      out << (k ? " " : "") << buf;
    }
    out << '\n';
  }
}

EmbeddingModel read_embedding(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file: " + path);
  uint64_t n = 0;
  int d = 0;
  EmbeddingModel model;
  if (!(in >> n >> d >> model.gamma >> model.beta) || n == 0 || d <= 0)
    throw DataError("malformed embedding header in " + path);
  model.coords = Eigen::MatrixXd(n, d);
  for (uint64_t i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k)
      if (!(in >> model.coords(i, k)))
        throw DataError("truncated embedding matrix in " + path);
  return model;
}

}  // namespace alpine
