#include "stabfs/topology.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace stabfs {

std::vector<int> bfs_distances(const std::vector<std::vector<NodeId>>& adjacency, NodeId source) {
  std::vector<int> dist(adjacency.size(), -1);
  std::deque<NodeId> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : adjacency[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

Topology Topology::build(std::span<const Edge> edges, NodeId root,
                         std::optional<std::size_t> node_count) {
  using Kind = TopologyError::Kind;
  if (edges.empty()) throw TopologyError(Kind::Empty, "edge list is empty");

  std::set<Edge> seen;
  NodeId max_id = 0;
  for (auto [a, b] : edges) {
    if (a == b) {
      throw TopologyError(Kind::SelfLoop, "self-loop on node " + std::to_string(a));
    }
    Edge key{std::min(a, b), std::max(a, b)};
    if (!seen.insert(key).second) {
      throw TopologyError(Kind::DuplicateEdge, "duplicate edge (" + std::to_string(key.first) +
                                                   "," + std::to_string(key.second) + ")");
    }
    max_id = std::max({max_id, a, b});
  }

  const std::size_t n = node_count.value_or(std::size_t{max_id} + 1);
  if (max_id >= n) {
    throw TopologyError(Kind::NonContiguous, "edge references node " + std::to_string(max_id) +
                                                 " but the graph has " + std::to_string(n) +
                                                 " nodes");
  }
  if (root >= n) {
    throw TopologyError(Kind::RootNotANode, "root " + std::to_string(root) + " is not a node");
  }

  Topology t;
  t.root_ = root;
  t.adjacency_.assign(n, {});
  for (auto [a, b] : seen) {
    t.adjacency_[a].push_back(b);
    t.adjacency_[b].push_back(a);
  }
  for (NodeId u = 0; u < n; ++u) {
    if (t.adjacency_[u].empty()) {
      throw TopologyError(Kind::NonContiguous,
                          "node " + std::to_string(u) + " has no incident edge");
    }
    std::sort(t.adjacency_[u].begin(), t.adjacency_[u].end());
  }
  t.edges_.assign(seen.begin(), seen.end());

  t.dist_ = bfs_distances(t.adjacency_, root);
  for (NodeId u = 0; u < n; ++u) {
    if (t.dist_[u] < 0) {
      throw TopologyError(Kind::Disconnected,
                          "graph is disconnected: node " + std::to_string(u) +
                              " is unreachable from the root");
    }
  }
  t.root_eccentricity_ = *std::max_element(t.dist_.begin(), t.dist_.end());
  t.diameter_ = t.root_eccentricity_;
  for (NodeId u = 0; u < n; ++u) {
    if (u == root) continue;
    auto d = bfs_distances(t.adjacency_, u);
    t.diameter_ = std::max(t.diameter_, *std::max_element(d.begin(), d.end()));
  }
  return t;
}

std::size_t Topology::max_degree() const {
  std::size_t best = 0;
  for (const auto& adj : adjacency_) best = std::max(best, adj.size());
  return best;
}

bool Topology::adjacent(NodeId u, NodeId v) const { return port_of(u, v).has_value(); }

std::optional<std::size_t> Topology::port_of(NodeId u, NodeId v) const {
  const auto& adj = adjacency_[u];
  auto it = std::lower_bound(adj.begin(), adj.end(), v);
  if (it == adj.end() || *it != v) return std::nullopt;
  return static_cast<std::size_t>(it - adj.begin());
}

}  // namespace stabfs
