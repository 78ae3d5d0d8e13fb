#pragma once

#include <cstdint>
#include <vector>

#include "alpine/pon_graph.hpp"

namespace alpine {

// Stochastic block model with optional within-node degree heterogeneity
// (edge weight ~ w_i * w_j, w_i drawn from a power-ish law). When
// target_edges > 0 the edge count is adjusted to it exactly and the graph
// is patched to a single connected component. Deterministic per seed.
struct SbmSpec {
  std::vector<uint32_t> block_sizes;
  double p_in = 0.2;
  double p_out = 0.02;
  // Degree-weight skew; 0 disables (homogeneous degrees).
  double weight_skew = 0.0;
  long target_edges = -1;
  uint64_t seed = 0;
};

PartialNetwork sbm_graph(const SbmSpec& spec);

// Latent-space community graph: community centers on a circle, Gaussian
// node scatter, links sampled with probability
// sigmoid(beta - |x_i - x_j|^2 / 2). beta is calibrated by bisection so
// the expected edge count matches target_edges, then the realized count
// is adjusted to it exactly and the graph patched to one component.
struct LatentSpec {
  std::vector<uint32_t> community_sizes;
  int latent_dim = 2;
  double center_radius = 4.0;
  double scatter = 1.0;
  // Per-node activity offsets a_i (lognormal, sigma = degree_skew) enter
  // the link logit as ln a_i + ln a_j, producing hubs the pure distance
  // model cannot represent exactly.
  double degree_skew = 0.0;
  // Rich-club: pairs whose endpoints are both in the top activity
  // fraction get this logit bonus, so hubs interconnect across
  // communities.
  double rich_club_logit = 0.0;
  double rich_club_fraction = 0.15;
  // Regional hubs: hub_count nodes pinned at their community centers,
  // each wired to round(hub_degree * (n-1)) partners drawn without
  // replacement with weight exp(-d^2 / (2 hub_reach^2)). High-degree
  // integrator nodes whose link sets the pure distance model cannot
  // fully express.
  uint32_t hub_count = 0;
  double hub_degree = 0.35;
  double hub_reach = 4.0;
  // Fraction of sampled edges replaced by uniform random non-edges.
  double rewire_fraction = 0.0;
  long target_edges = 0;
  uint64_t seed = 0;
};

PartialNetwork latent_community_graph(const LatentSpec& spec);

// Two hub nodes, each with `leaves_per_hub` inner leaves (hub-adjacent) and
// one outer leaf hanging off every inner leaf. Inner leaves of a hub form a
// ring. The hubs are connected to each other.
struct TwoHubGraph {
  PartialNetwork net;  // without the extra node
  uint32_t hub_a = 0;
  uint32_t hub_b = 0;
  std::vector<uint32_t> inner_a, inner_b;
  std::vector<uint32_t> outer_a, outer_b;

  bool hub_adjacent(uint32_t v) const;
};

TwoHubGraph two_hub_graph(uint32_t leaves_per_hub = 10);

// The two-hub graph plus one extra node whose ground-truth links go to hub
// A and its first `community_links` inner leaves. Returns the full network
// and the new node's index.
struct NewNodeInstance {
  PartialNetwork full;
  TwoHubGraph base;
  uint32_t new_node = 0;
};

NewNodeInstance two_hub_new_node_instance(uint32_t leaves_per_hub = 10,
                                          uint32_t community_links = 5);

PartialNetwork ring_graph(uint32_t n);
PartialNetwork path_graph(uint32_t n);
// Star K_{1,n-1} with the hub at node 0.
PartialNetwork star_graph(uint32_t n);

// Sparse uniform random graph (Erdos-Renyi by edge count), connected.
PartialNetwork random_connected_graph(uint32_t n, long edges, uint64_t seed);

void write_edge_list(const std::string& path, const PartialNetwork& net,
                     const std::string& comment = "");

}  // namespace alpine
