#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "alpine/pairs.hpp"

namespace alpine {

enum class PairStatus { Connected, Disconnected, Unknown };

// Partially observed undirected network. Connected (E) and Unknown (U)
// pairs are stored sparsely; Disconnected is the implicit complement, so
// D is never materialized.
class PartialNetwork {
 public:
  PartialNetwork() = default;
  explicit PartialNetwork(uint32_t n) : n_(n), observed_degree_(n, 0) {}

  uint32_t num_nodes() const { return n_; }
  uint64_t num_pairs() const { return total_pairs(n_); }
  size_t num_edges() const { return edges_.size(); }
  size_t num_unknown() const { return unknown_.size(); }
  uint64_t num_disconnected() const {
    return num_pairs() - edges_.size() - unknown_.size();
  }

  bool is_edge(NodePair p) const { return edges_.count(p.key()) != 0; }
  bool is_unknown(NodePair p) const { return unknown_.count(p.key()) != 0; }

  PairStatus status(NodePair p) const {
    check_pair(p);
    if (is_edge(p)) return PairStatus::Connected;
    if (is_unknown(p)) return PairStatus::Unknown;
    return PairStatus::Disconnected;
  }

  bool fully_observed() const { return unknown_.empty(); }

  // Graph construction. add_edge on a pair in U is a contract violation;
  // set_unknown removes the pair from E if present.
  void add_edge(NodePair p);
  void set_unknown(NodePair p);

  // Number of pairs in E incident to i.
  uint32_t observed_degree(uint32_t i) const {
    check_node(i);
    return observed_degree_[i];
  }

  const std::unordered_set<uint64_t>& edge_keys() const { return edges_; }
  const std::unordered_set<uint64_t>& unknown_keys() const { return unknown_; }

  std::vector<NodePair> edges_sorted() const { return sorted(edges_); }
  std::vector<NodePair> unknown_sorted() const { return sorted(unknown_); }

  // Neighbor lists over E only (PageRank, degree heuristics).
  std::vector<std::vector<uint32_t>> edge_adjacency() const;
  // Partner lists over U (V-optimality sums).
  std::vector<std::vector<uint32_t>> unknown_adjacency() const;

  const std::vector<std::string>& labels() const { return labels_; }
  void set_labels(std::vector<std::string> labels) {
    labels_ = std::move(labels);
  }
  // Index of a node label, or -1.
  int64_t find_label(const std::string& name) const;

  // Hash over (n, sorted E, sorted U); identifies the instance in
  // checkpoints.
  uint64_t content_hash() const;

  void check_node(uint32_t i) const {
    if (i >= n_) throw ContractViolation("node index out of range");
  }
  void check_pair(NodePair p) const {
    check_node(p.a);
    check_node(p.b);
  }

 private:
  std::vector<NodePair> sorted(const std::unordered_set<uint64_t>& keys) const;

  uint32_t n_ = 0;
  std::unordered_set<uint64_t> edges_;
  std::unordered_set<uint64_t> unknown_;
  std::vector<uint32_t> observed_degree_;
  std::vector<std::string> labels_;

  friend void reveal_in_place(PartialNetwork& net, NodePair p, PairStatus s);
};

// Answers queries from held-out ground truth; deterministic and repeatable.
class Oracle {
 public:
  explicit Oracle(PartialNetwork ground_truth);
  PairStatus query(NodePair p) const;
  const PartialNetwork& ground_truth() const { return truth_; }

 private:
  PartialNetwork truth_;
};

struct MaskSpec {
  enum class Mode { UniformPairs, NewNode };
  double hide_fraction = 0.2;
  uint64_t seed = 0;
  Mode mode = Mode::UniformPairs;
  // NewNode: every pair incident to `node` becomes Unknown except
  // {node, anchor}.
  uint32_t node = 0;
  uint32_t anchor = 0;
};

struct LoadStats {
  size_t duplicate_edges = 0;
  size_t self_loops = 0;
  size_t lines_read = 0;
};

// Edge list: one pair of whitespace-separated node tokens per line; lines
// starting with '#' or '%' are comments. Tokens map to dense 0-based ids in
// first-appearance order. Returns a fully observed network.
PartialNetwork load_edge_list(const std::string& path,
                              LoadStats* stats = nullptr);

std::pair<PartialNetwork, Oracle> apply_mask(const PartialNetwork& net,
                                             const MaskSpec& spec);

// Masks an explicit pair list (mask-file replay).
std::pair<PartialNetwork, Oracle> apply_mask_pairs(
    const PartialNetwork& net, const std::vector<NodePair>& pairs);

// Resolves pair p in U to the revealed status. Contract violation if p is
// not in U or status is Unknown.
void reveal_in_place(PartialNetwork& net, NodePair p, PairStatus s);
PartialNetwork reveal(const PartialNetwork& net, NodePair p, PairStatus s);

// Calls fn(j, a_ij) for every j != i with {i,j} not in U, ascending j.
template <typename F>
void for_each_observed_neighbor(const PartialNetwork& net, uint32_t i, F&& fn) {
  net.check_node(i);
  for (uint32_t j = 0; j < net.num_nodes(); ++j) {
    if (j == i) continue;
    const NodePair p = NodePair::of(i, j);
    if (net.is_unknown(p)) continue;
    fn(j, net.is_edge(p) ? 1 : 0);
  }
}

std::vector<std::pair<uint32_t, int>> observed_neighbors(
    const PartialNetwork& net, uint32_t i);

// Mask file: one "i j" pair per line, the U set, for exact replay.
void write_mask_file(const std::string& path, const PartialNetwork& net);
std::vector<NodePair> read_mask_file(const std::string& path);

}  // namespace alpine
