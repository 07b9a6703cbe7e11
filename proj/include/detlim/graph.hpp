#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "detlim/common.hpp"
#include "detlim/rng.hpp"

namespace detlim {

// Undirected simple graph: adjacency lists plus the cached degree sequence.
class Graph {
 public:
  using Edge = std::pair<std::uint32_t, std::uint32_t>;

  Graph(std::uint32_t node_count, std::vector<Edge> edges)
      : node_count_(node_count), edges_(std::move(edges)) {
    if (node_count_ < 1) throw BadArgument("graph needs at least one node");
    std::vector<Edge> normalized;
    normalized.reserve(edges_.size());
    for (auto& [u, v] : edges_) {
      if (u >= node_count_ || v >= node_count_)
        throw BadArgument("edge endpoint outside [0, node_count)");
      if (u == v) throw BadArgument("self-loop at node " + std::to_string(u));
      if (u > v) std::swap(u, v);
      normalized.push_back({u, v});
    }
    std::sort(normalized.begin(), normalized.end());
    if (std::adjacent_find(normalized.begin(), normalized.end()) != normalized.end())
      throw BadArgument("duplicate edge");

    adjacency_.resize(node_count_);
    for (const auto& [u, v] : normalized) {
      adjacency_[u].push_back(v);
      adjacency_[v].push_back(u);
    }
    degrees_.resize(node_count_);
    for (std::uint32_t i = 0; i < node_count_; ++i)
      degrees_[i] = static_cast<std::uint32_t>(adjacency_[i].size());
    edges_ = std::move(normalized);
  }

  std::uint32_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<std::uint32_t>& neighbors(std::uint32_t u) const {
    return adjacency_[u];
  }
  const std::vector<std::uint32_t>& degrees() const noexcept { return degrees_; }

  double mean_degree() const noexcept {
    double s = 0.0;
    for (const auto d : degrees_) s += d;
    return s / node_count_;
  }
  double mean_degree_squared() const noexcept {
    double s = 0.0;
    for (const auto d : degrees_) s += static_cast<double>(d) * d;
    return s / node_count_;
  }

 private:
  std::uint32_t node_count_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::uint32_t>> adjacency_;
  std::vector<std::uint32_t> degrees_;
};

// Erdos-Renyi G(n, p): one coin per unordered pair, in (i, j) order.
inline Graph gen_er(std::uint32_t nodes, double edge_prob, std::uint64_t seed) {
  if (nodes < 2) throw BadArgument("need at least two nodes");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0))
    throw BadArgument("edge probability must be in [0,1]");
  SplitMix64 rng(seed);
  std::vector<Graph::Edge> edges;
  for (std::uint32_t i = 0; i < nodes; ++i)
    for (std::uint32_t j = i + 1; j < nodes; ++j)
      if (rng.bernoulli(edge_prob)) edges.push_back({i, j});
  return Graph(nodes, std::move(edges));
}

// Barabasi-Albert preferential attachment: start from a clique on
// attach_m + 1 nodes, then each new node links to attach_m distinct existing
// nodes picked proportionally to degree (uniform draws from the running
// edge-endpoint list).
inline Graph gen_ba(std::uint32_t nodes, std::uint32_t attach_m, std::uint64_t seed) {
  if (attach_m < 1) throw BadArgument("attach_m must be >= 1");
  if (nodes < attach_m + 2)
    throw BadArgument("need at least attach_m + 2 nodes");
  SplitMix64 rng(seed);
  std::vector<Graph::Edge> edges;
  std::vector<std::uint32_t> endpoints;
  const std::uint32_t core = attach_m + 1;
  for (std::uint32_t i = 0; i < core; ++i)
    for (std::uint32_t j = i + 1; j < core; ++j) {
      edges.push_back({i, j});
      endpoints.push_back(i);
      endpoints.push_back(j);
    }
  std::vector<std::uint32_t> chosen;
  for (std::uint32_t v = core; v < nodes; ++v) {
    chosen.clear();
    while (chosen.size() < attach_m) {
      const std::uint32_t target =
          endpoints[rng.next_below(endpoints.size())];
      if (std::find(chosen.begin(), chosen.end(), target) == chosen.end())
        chosen.push_back(target);
    }
    for (const std::uint32_t target : chosen) {
      edges.push_back({target, v});
      endpoints.push_back(target);
      endpoints.push_back(v);
    }
  }
  return Graph(nodes, std::move(edges));
}

// Edge-list format: one "u v" pair per line, 0-indexed.
inline void write_edge_list(std::ostream& os, const Graph& g) {
  for (const auto& [u, v] : g.edges()) os << u << ' ' << v << '\n';
}

inline Graph read_edge_list(std::istream& is, std::uint32_t node_count = 0) {
  std::vector<Graph::Edge> edges;
  std::uint32_t max_node = 0;
  std::uint64_t u = 0, v = 0;
  while (is >> u >> v) {
    edges.push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v)});
    max_node = std::max({max_node, static_cast<std::uint32_t>(u),
                         static_cast<std::uint32_t>(v)});
  }
  if (edges.empty() && node_count == 0) throw BadArgument("empty edge list");
  const std::uint32_t n = node_count > 0 ? node_count : max_node + 1;
  return Graph(n, std::move(edges));
}

}  // namespace detlim
