#include "alpine/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "alpine/rng.hpp"

namespace alpine {

namespace {

// Union-find over nodes.
struct Components {
  std::vector<uint32_t> parent;
  explicit Components(uint32_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0u);
  }
  uint32_t find(uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(uint32_t a, uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

bool connected(const PartialNetwork& net) {
  Components comp(net.num_nodes());
  uint32_t merges = 0;
  for (const NodePair& e : net.edges_sorted())
    if (comp.unite(e.a, e.b)) ++merges;
  return merges + 1 == net.num_nodes();
}

// Removing a random non-bridge edge keeps the graph connected.
bool is_bridge(const PartialNetwork& net, NodePair e) {
  PartialNetwork copy(net.num_nodes());
  for (const NodePair& p : net.edges_sorted())
    if (!(p == e)) copy.add_edge(p);
  return !connected(copy);
}

}  // namespace

PartialNetwork sbm_graph(const SbmSpec& spec) {
  uint32_t n = 0;
  for (uint32_t b : spec.block_sizes) n += b;
  if (n < 2) throw ContractViolation("sbm needs at least two nodes");

  std::vector<uint32_t> block_of(n);
  {
    uint32_t at = 0;
    for (uint32_t b = 0; b < spec.block_sizes.size(); ++b)
      for (uint32_t k = 0; k < spec.block_sizes[b]; ++k) block_of[at++] = b;
  }

  Rng rng(mix_seed(spec.seed, 0x73626dULL));
  std::vector<double> weight(n, 1.0);
  if (spec.weight_skew > 0) {
    for (uint32_t i = 0; i < n; ++i) {
      const double u = rng.uniform01();
      weight[i] = std::pow(1.0 - 0.999 * u, -spec.weight_skew);
    }
    double mean = 0.0;
    for (double w : weight) mean += w;
    mean /= n;
    for (double& w : weight) w /= mean;
  }

  PartialNetwork net(n);
  for (uint32_t i = 0; i < n; ++i) {
    for (uint32_t j = i + 1; j < n; ++j) {
      const double base =
          block_of[i] == block_of[j] ? spec.p_in : spec.p_out;
      const double p = std::min(1.0, base * weight[i] * weight[j]);
      if (rng.uniform01() < p) net.add_edge(NodePair{i, j});
    }
  }

  // Patch to a single component using lexicographically first bridges.
  {
    Components comp(n);
    for (const NodePair& e : net.edges_sorted()) comp.unite(e.a, e.b);
    for (uint32_t v = 1; v < n; ++v)
      if (comp.find(v) != comp.find(0)) {
        net.add_edge(NodePair{0, v});
        comp.unite(0, v);
      }
  }

  if (spec.target_edges > 0) {
    const auto target = static_cast<size_t>(spec.target_edges);
    // Drop random non-bridge edges while above target.
    while (net.num_edges() > target) {
      const auto edges = net.edges_sorted();
      bool removed = false;
      for (int attempt = 0; attempt < 256 && !removed; ++attempt) {
        const NodePair e = edges[rng.uniform_below(edges.size())];
        if (is_bridge(net, e)) continue;
        PartialNetwork next(n);
        for (const NodePair& p : edges)
          if (!(p == e)) next.add_edge(p);
        next.set_labels(net.labels());
        net = std::move(next);
        removed = true;
      }
      if (!removed) break;  // only bridges left
    }
    // Add random missing intra-block edges while below target.
    while (net.num_edges() < target) {
      const auto i = static_cast<uint32_t>(rng.uniform_below(n));
      const auto j = static_cast<uint32_t>(rng.uniform_below(n));
      if (i == j) continue;
      const NodePair p = NodePair::of(i, j);
      if (net.is_edge(p)) continue;
      if (block_of[i] != block_of[j] && rng.uniform01() < 0.9) continue;
      net.add_edge(p);
    }
  }
  return net;
}

PartialNetwork latent_community_graph(const LatentSpec& spec) {
  uint32_t n = 0;
  for (uint32_t c : spec.community_sizes) n += c;
  if (n < 2 || spec.target_edges <= 0)
    throw ContractViolation("latent graph needs nodes and a target edge count");

  Rng rng(mix_seed(spec.seed, 0x6c6174ULL));
  const size_t k = spec.community_sizes.size();
  std::vector<std::vector<double>> coords(n,
                                          std::vector<double>(spec.latent_dim));
  std::vector<uint32_t> community_first;
  {
    uint32_t at = 0;
    for (size_t c = 0; c < k; ++c) {
      community_first.push_back(at);
      const double angle = 2.0 * M_PI * static_cast<double>(c) / k;
      std::vector<double> center(spec.latent_dim, 0.0);
      center[0] = spec.center_radius * std::cos(angle);
      if (spec.latent_dim > 1) center[1] = spec.center_radius * std::sin(angle);
      for (uint32_t m = 0; m < spec.community_sizes[c]; ++m, ++at)
        for (int dd = 0; dd < spec.latent_dim; ++dd)
          coords[at][dd] = center[dd] + spec.scatter * rng.normal();
    }
  }

  // Hubs sit exactly on their community centers, round-robin.
  std::vector<uint32_t> hubs;
  for (uint32_t h = 0; h < spec.hub_count; ++h) {
    const uint32_t node = community_first[h % k] + h / k;
    if (node >= n) break;
    hubs.push_back(node);
    const double angle = 2.0 * M_PI * static_cast<double>(h % k) / k;
    coords[node][0] = spec.center_radius * std::cos(angle);
    if (spec.latent_dim > 1)
      coords[node][1] = spec.center_radius * std::sin(angle);
    for (int dd = 2; dd < spec.latent_dim; ++dd) coords[node][dd] = 0.0;
  }

  std::vector<double> log_activity(n, 0.0);
  if (spec.degree_skew > 0)
    for (uint32_t i = 0; i < n; ++i)
      log_activity[i] = spec.degree_skew * rng.normal();

  auto sqdist = [&](uint32_t i, uint32_t j) {
    double s = 0.0;
    for (int dd = 0; dd < spec.latent_dim; ++dd) {
      const double diff = coords[i][dd] - coords[j][dd];
      s += diff * diff;
    }
    return s;
  };
  std::vector<bool> in_club(n, false);
  if (spec.rich_club_logit > 0 && spec.rich_club_fraction > 0) {
    std::vector<uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
      return log_activity[a] > log_activity[b];
    });
    const auto club = static_cast<size_t>(spec.rich_club_fraction * n);
    for (size_t r = 0; r < club && r < n; ++r) in_club[order[r]] = true;
  }

  auto link_logit = [&](uint32_t i, uint32_t j, double beta) {
    const double club_bonus =
        in_club[i] && in_club[j] ? spec.rich_club_logit : 0.0;
    return beta + log_activity[i] + log_activity[j] + club_bonus -
           0.5 * sqdist(i, j);
  };
  PartialNetwork net(n);

  if (!hubs.empty() && spec.hub_degree > 0) {
    const auto partners = static_cast<uint32_t>(
        std::llround(spec.hub_degree * static_cast<double>(n - 1)));
    const double two_reach2 = 2.0 * spec.hub_reach * spec.hub_reach;
    for (uint32_t h : hubs) {
      uint32_t wired = 0;
      int attempts = 0;
      while (wired < partners && attempts < 200000) {
        ++attempts;
        const auto x = static_cast<uint32_t>(rng.uniform_below(n));
        if (x == h || net.is_edge(NodePair::of(h, x))) continue;
        if (rng.uniform01() > std::exp(-sqdist(h, x) / two_reach2)) continue;
        net.add_edge(NodePair::of(h, x));
        ++wired;
      }
    }
  }

  const long latent_target =
      spec.target_edges - static_cast<long>(net.num_edges());
  auto expected_edges = [&](double beta) {
    double e = 0.0;
    for (uint32_t i = 0; i < n; ++i)
      for (uint32_t j = i + 1; j < n; ++j) {
        if (net.is_edge(NodePair{i, j})) continue;
        e += 1.0 / (1.0 + std::exp(-link_logit(i, j, beta)));
      }
    return e;
  };

  double lo = -60.0, hi = 60.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (expected_edges(mid) < latent_target ? lo : hi) = mid;
  }
  const double beta = 0.5 * (lo + hi);

  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = i + 1; j < n; ++j) {
      if (net.is_edge(NodePair{i, j})) continue;
      const double p = 1.0 / (1.0 + std::exp(-link_logit(i, j, beta)));
      if (rng.uniform01() < p) net.add_edge(NodePair{i, j});
    }

  if (spec.rewire_fraction > 0) {
    const auto edges = net.edges_sorted();
    const auto rewires = static_cast<size_t>(
        std::llround(spec.rewire_fraction * static_cast<double>(edges.size())));
    for (size_t r = 0; r < rewires; ++r) {
      const NodePair victim = edges[rng.uniform_below(edges.size())];
      if (!net.is_edge(victim)) continue;  // already rewired away
      for (int attempt = 0; attempt < 64; ++attempt) {
        const auto i = static_cast<uint32_t>(rng.uniform_below(n));
        const auto j = static_cast<uint32_t>(rng.uniform_below(n));
        if (i == j || net.is_edge(NodePair::of(i, j))) continue;
        PartialNetwork next(n);
        for (const NodePair& p : net.edges_sorted())
          if (!(p == victim)) next.add_edge(p);
        next.add_edge(NodePair::of(i, j));
        net = std::move(next);
        break;
      }
    }
  }

  {
    Components comp(n);
    for (const NodePair& e : net.edges_sorted()) comp.unite(e.a, e.b);
    for (uint32_t v = 1; v < n; ++v)
      if (comp.find(v) != comp.find(0)) {
        net.add_edge(NodePair{0, v});
        comp.unite(0, v);
      }
  }

  // Exact edge count: drop random non-bridge extras, add the closest
  // missing pairs.
  const auto target = static_cast<size_t>(spec.target_edges);
  while (net.num_edges() > target) {
    const auto edges = net.edges_sorted();
    bool removed = false;
    for (int attempt = 0; attempt < 256 && !removed; ++attempt) {
      const NodePair e = edges[rng.uniform_below(edges.size())];
      if (is_bridge(net, e)) continue;
      PartialNetwork next(n);
      for (const NodePair& p : edges)
        if (!(p == e)) next.add_edge(p);
      net = std::move(next);
      removed = true;
    }
    if (!removed) break;
  }
  if (net.num_edges() < target) {
    std::vector<NodePair> missing;
    for (uint32_t i = 0; i < n; ++i)
      for (uint32_t j = i + 1; j < n; ++j)
        if (!net.is_edge(NodePair{i, j})) missing.push_back(NodePair{i, j});
    std::sort(missing.begin(), missing.end(), [&](NodePair a, NodePair b) {
      return sqdist(a.a, a.b) < sqdist(b.a, b.b);
    });
    for (const NodePair& p : missing) {
      if (net.num_edges() >= target) break;
      net.add_edge(p);
    }
  }
  return net;
}

bool TwoHubGraph::hub_adjacent(uint32_t v) const {
  if (v == hub_a || v == hub_b) return true;
  return net.is_edge(NodePair::of(v, hub_a)) ||
         net.is_edge(NodePair::of(v, hub_b));
}

TwoHubGraph two_hub_graph(uint32_t leaves_per_hub) {
  if (leaves_per_hub < 3)
    throw ContractViolation("two-hub graph needs at least 3 leaves per hub");
  TwoHubGraph g;
  const uint32_t L = leaves_per_hub;
  const uint32_t n = 2 + 4 * L;
  g.net = PartialNetwork(n);
  g.hub_a = 0;
  g.hub_b = 1;
  for (uint32_t k = 0; k < L; ++k) {
    g.inner_a.push_back(2 + k);
    g.inner_b.push_back(2 + L + k);
    g.outer_a.push_back(2 + 2 * L + k);
    g.outer_b.push_back(2 + 3 * L + k);
  }
  g.net.add_edge(NodePair{g.hub_a, g.hub_b});
  for (uint32_t k = 0; k < L; ++k) {
    g.net.add_edge(NodePair::of(g.hub_a, g.inner_a[k]));
    g.net.add_edge(NodePair::of(g.hub_b, g.inner_b[k]));
    g.net.add_edge(NodePair::of(g.inner_a[k], g.outer_a[k]));
    g.net.add_edge(NodePair::of(g.inner_b[k], g.outer_b[k]));
    g.net.add_edge(NodePair::of(g.inner_a[k], g.inner_a[(k + 1) % L]));
    g.net.add_edge(NodePair::of(g.inner_b[k], g.inner_b[(k + 1) % L]));
  }
  return g;
}

NewNodeInstance two_hub_new_node_instance(uint32_t leaves_per_hub,
                                          uint32_t community_links) {
  NewNodeInstance inst;
  inst.base = two_hub_graph(leaves_per_hub);
  const uint32_t n = inst.base.net.num_nodes();
  inst.new_node = n;
  inst.full = PartialNetwork(n + 1);
  for (const NodePair& e : inst.base.net.edges_sorted())
    inst.full.add_edge(e);
  inst.full.add_edge(NodePair::of(inst.new_node, inst.base.hub_a));
  const uint32_t links =
      std::min<uint32_t>(community_links, leaves_per_hub);
  for (uint32_t k = 0; k < links; ++k)
    inst.full.add_edge(NodePair::of(inst.new_node, inst.base.inner_a[k]));
  return inst;
}

PartialNetwork ring_graph(uint32_t n) {
  if (n < 3) throw ContractViolation("ring needs n >= 3");
  PartialNetwork net(n);
  for (uint32_t i = 0; i < n; ++i)
    net.add_edge(NodePair::of(i, (i + 1) % n));
  return net;
}

PartialNetwork path_graph(uint32_t n) {
  if (n < 2) throw ContractViolation("path needs n >= 2");
  PartialNetwork net(n);
  for (uint32_t i = 0; i + 1 < n; ++i) net.add_edge(NodePair{i, i + 1});
  return net;
}

PartialNetwork star_graph(uint32_t n) {
  if (n < 2) throw ContractViolation("star needs n >= 2");
  PartialNetwork net(n);
  for (uint32_t i = 1; i < n; ++i) net.add_edge(NodePair{0, i});
  return net;
}

PartialNetwork random_connected_graph(uint32_t n, long edges, uint64_t seed) {
  if (edges < n - 1) throw ContractViolation("too few edges to connect");
  if (total_pairs(n) < static_cast<uint64_t>(edges))
    throw ContractViolation("edge count exceeds the pair count");
  Rng rng(mix_seed(seed, 0x657267ULL));
  PartialNetwork net(n);
  // Random spanning tree first, then uniform extra edges.
  std::vector<uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  for (uint32_t i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.uniform_below(i + 1)]);
  for (uint32_t i = 1; i < n; ++i) {
    const uint32_t j = perm[rng.uniform_below(i)];
    net.add_edge(NodePair::of(perm[i], j));
  }
  while (net.num_edges() < static_cast<size_t>(edges)) {
    const auto idx = rng.uniform_below(total_pairs(n));
    const NodePair p = pair_from_index(idx, n);
    if (!net.is_edge(p)) net.add_edge(p);
  }
  return net;
}

void write_edge_list(const std::string& path, const PartialNetwork& net,
                     const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write edge list: " + path);
  if (!comment.empty()) out << "# " << comment << '\n';
  for (const NodePair& e : net.edges_sorted()) out << e.a << ' ' << e.b << '\n';
}

}  // namespace alpine
