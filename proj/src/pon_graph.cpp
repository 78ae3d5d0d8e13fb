#include "alpine/pon_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "alpine/mathutil.hpp"
#include "alpine/rng.hpp"

namespace alpine {

void PartialNetwork::add_edge(NodePair p) {
  check_pair(p);
  if (is_unknown(p))
    throw ContractViolation("add_edge on a pair with unknown status");
  if (edges_.insert(p.key()).second) {
    ++observed_degree_[p.a];
    ++observed_degree_[p.b];
  }
}

void PartialNetwork::set_unknown(NodePair p) {
  check_pair(p);
  if (edges_.erase(p.key()) > 0) {
    --observed_degree_[p.a];
    --observed_degree_[p.b];
  }
  unknown_.insert(p.key());
}

std::vector<NodePair> PartialNetwork::sorted(
    const std::unordered_set<uint64_t>& keys) const {
  std::vector<NodePair> out;
  out.reserve(keys.size());
  for (uint64_t k : keys) out.push_back(NodePair::from_key(k));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<uint32_t>> PartialNetwork::edge_adjacency() const {
  std::vector<std::vector<uint32_t>> adj(n_);
  for (uint64_t k : edges_) {
    const NodePair p = NodePair::from_key(k);
    adj[p.a].push_back(p.b);
    adj[p.b].push_back(p.a);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

std::vector<std::vector<uint32_t>> PartialNetwork::unknown_adjacency() const {
  std::vector<std::vector<uint32_t>> adj(n_);
  for (uint64_t k : unknown_) {
    const NodePair p = NodePair::from_key(k);
    adj[p.a].push_back(p.b);
    adj[p.b].push_back(p.a);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

int64_t PartialNetwork::find_label(const std::string& name) const {
  for (size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == name) return static_cast<int64_t>(i);
  return -1;
}

uint64_t PartialNetwork::content_hash() const {
  Fnv1a h;
  h.update_u64(n_);
  for (const NodePair& p : edges_sorted()) h.update_u64(p.key());
  h.update_u64(0xffffffffffffffffULL);
  for (const NodePair& p : unknown_sorted()) h.update_u64(p.key());
  return h.digest();
}

Oracle::Oracle(PartialNetwork ground_truth) : truth_(std::move(ground_truth)) {
  if (!truth_.fully_observed())
    throw ContractViolation("oracle ground truth must be fully observed");
}

PairStatus Oracle::query(NodePair p) const {
  truth_.check_pair(p);
  return truth_.is_edge(p) ? PairStatus::Connected : PairStatus::Disconnected;
}

PartialNetwork load_edge_list(const std::string& path, LoadStats* stats) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open edge list: " + path);

  PartialNetwork net;
  std::vector<std::string> labels;
  std::unordered_map<std::string, uint32_t> ids;
  struct RawEdge {
    uint32_t a, b;
  };
  std::vector<RawEdge> raw;
  LoadStats local;

  auto intern = [&](const std::string& tok) -> uint32_t {
    auto it = ids.find(tok);
    if (it != ids.end()) return it->second;
    const auto id = static_cast<uint32_t>(labels.size());
    ids.emplace(tok, id);
    labels.push_back(tok);
    return id;
  };

  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    ++local.lines_read;
    if (line.empty()) continue;
    const size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#' || line[first] == '%') continue;

    std::istringstream ls(line);
    std::string u, v, extra;
    if (!(ls >> u >> v) || (ls >> extra)) {
      throw DataError("edge list line " + std::to_string(lineno) +
                      ": expected exactly two node tokens");
    }
    raw.push_back({intern(u), intern(v)});
  }

  net = PartialNetwork(static_cast<uint32_t>(labels.size()));
  net.set_labels(std::move(labels));
  for (const RawEdge& e : raw) {
    if (e.a == e.b) {
      ++local.self_loops;
      continue;
    }
    const NodePair p = NodePair::of(e.a, e.b);
    if (net.is_edge(p)) {
      ++local.duplicate_edges;
      continue;
    }
    net.add_edge(p);
  }
  if (stats) *stats = local;
  return net;
}

std::pair<PartialNetwork, Oracle> apply_mask(const PartialNetwork& net,
                                             const MaskSpec& spec) {
  if (!net.fully_observed())
    throw ContractViolation("apply_mask requires a fully observed network");

  std::vector<NodePair> hidden;
  const uint32_t n = net.num_nodes();

  if (spec.mode == MaskSpec::Mode::UniformPairs) {
    if (!(spec.hide_fraction > 0.0 && spec.hide_fraction < 1.0))
      throw DataError("hide_fraction must lie in (0,1)");
    const uint64_t total = total_pairs(n);
    const auto count = static_cast<uint64_t>(
        std::llround(spec.hide_fraction * static_cast<double>(total)));
    if (count == 0) throw DataError("mask selects an empty pair set");

    // Floyd's algorithm: `count` distinct indices from [0, total).
    Rng rng(mix_seed(spec.seed, 0x6d61736bULL));
    std::unordered_set<uint64_t> chosen;
    chosen.reserve(count * 2);
    for (uint64_t j = total - count; j < total; ++j) {
      const uint64_t r = rng.uniform_below(j + 1);
      if (!chosen.insert(r).second) chosen.insert(j);
    }
    hidden.reserve(chosen.size());
    for (uint64_t idx : chosen) hidden.push_back(pair_from_index(idx, n));
    std::sort(hidden.begin(), hidden.end());
  } else {
    net.check_node(spec.node);
    net.check_node(spec.anchor);
    if (spec.node == spec.anchor)
      throw DataError("new-node mask: node and anchor must differ");
    for (uint32_t j = 0; j < n; ++j) {
      if (j == spec.node || j == spec.anchor) continue;
      hidden.push_back(NodePair::of(spec.node, j));
    }
    if (hidden.empty()) throw DataError("mask selects an empty pair set");
  }

  return apply_mask_pairs(net, hidden);
}

std::pair<PartialNetwork, Oracle> apply_mask_pairs(
    const PartialNetwork& net, const std::vector<NodePair>& pairs) {
  if (!net.fully_observed())
    throw ContractViolation("apply_mask requires a fully observed network");
  if (pairs.empty()) throw DataError("mask selects an empty pair set");
  PartialNetwork masked = net;
  for (const NodePair& p : pairs) {
    masked.check_pair(p);
    masked.set_unknown(p);
  }
  return {std::move(masked), Oracle(net)};
}

void reveal_in_place(PartialNetwork& net, NodePair p, PairStatus s) {
  if (s == PairStatus::Unknown)
    throw ContractViolation("reveal status must be Connected or Disconnected");
  if (net.unknown_.erase(p.key()) == 0)
    throw ContractViolation("reveal on a pair not in U");
  if (s == PairStatus::Connected) net.add_edge(p);
}

PartialNetwork reveal(const PartialNetwork& net, NodePair p, PairStatus s) {
  PartialNetwork out = net;
  reveal_in_place(out, p, s);
  return out;
}

std::vector<std::pair<uint32_t, int>> observed_neighbors(
    const PartialNetwork& net, uint32_t i) {
  std::vector<std::pair<uint32_t, int>> out;
  for_each_observed_neighbor(
      net, i, [&](uint32_t j, int a) { out.emplace_back(j, a); });
  return out;
}

void write_mask_file(const std::string& path, const PartialNetwork& net) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write mask file: " + path);
  for (const NodePair& p : net.unknown_sorted())
    out << p.a << ' ' << p.b << '\n';
}

std::vector<NodePair> read_mask_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open mask file: " + path);
  std::vector<NodePair> pairs;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line[0] == '%') continue;
    std::istringstream ls(line);
    long long a = -1, b = -1;
    std::string extra;
    if (!(ls >> a >> b) || (ls >> extra) || a < 0 || b < 0 || a == b)
      throw DataError("mask file line " + std::to_string(lineno) +
                      ": expected two distinct node indices");
    pairs.push_back(
        NodePair::of(static_cast<uint32_t>(a), static_cast<uint32_t>(b)));
  }
  return pairs;
}

}  // namespace alpine
