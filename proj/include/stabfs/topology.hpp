#ifndef STABFS_TOPOLOGY_HPP_
#define STABFS_TOPOLOGY_HPP_

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stabfs/types.hpp"

namespace stabfs {

using Edge = std::pair<NodeId, NodeId>;

class TopologyError : public std::runtime_error {
 public:
  enum class Kind { Empty, NonContiguous, SelfLoop, DuplicateEdge, RootNotANode, Disconnected };

  TopologyError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Rooted, connected, undirected graph with hop distances to the root.
///
/// Nodes are 0..n-1. Neighbor lists are sorted ascending; the position of a
/// neighbor in that list is its port number, used by the packed encoding.
/// `diameter()` is the graph diameter; `root_eccentricity()` is max dist(u)
/// and can be smaller.
class Topology {
 public:
  /// Validates and builds. When `node_count` is given, the edge set must use
  /// exactly the nodes 0..node_count-1.
  static Topology build(std::span<const Edge> edges, NodeId root,
                        std::optional<std::size_t> node_count = std::nullopt);

  std::size_t size() const { return adjacency_.size(); }
  NodeId root() const { return root_; }
  bool is_root(NodeId u) const { return u == root_; }
  std::span<const NodeId> neighbors(NodeId u) const { return adjacency_[u]; }
  std::size_t degree(NodeId u) const { return adjacency_[u].size(); }
  std::size_t max_degree() const;
  int dist(NodeId u) const { return dist_[u]; }
  int diameter() const { return diameter_; }
  int root_eccentricity() const { return root_eccentricity_; }
  const std::vector<Edge>& edges() const { return edges_; }

  bool adjacent(NodeId u, NodeId v) const;
  /// Port of neighbor v in u's sorted adjacency, or nullopt if not adjacent.
  std::optional<std::size_t> port_of(NodeId u, NodeId v) const;

 private:
  Topology() = default;

  NodeId root_ = 0;
  std::vector<std::vector<NodeId>> adjacency_;
  std::vector<int> dist_;
  std::vector<Edge> edges_;  // normalized (min, max), sorted
  int diameter_ = 0;
  int root_eccentricity_ = 0;
};

/// BFS hop distances from `source`; -1 for unreachable nodes.
std::vector<int> bfs_distances(const std::vector<std::vector<NodeId>>& adjacency, NodeId source);

}  // namespace stabfs

#endif  // STABFS_TOPOLOGY_HPP_
