#include "stabfs/generators.hpp"

#include <algorithm>
#include <charconv>
#include <random>

namespace stabfs {

namespace {

Topology build(std::size_t n, const std::vector<Edge>& edges) {
  return Topology::build(edges, 0, n);
}

std::size_t parse_count(std::string_view text, std::string_view spec) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("bad topology '" + std::string(spec) + "'");
  }
  return value;
}

}  // namespace

Topology make_path(std::size_t n) {
  if (n < 2) throw std::invalid_argument("path needs at least 2 nodes");
  std::vector<Edge> edges;
  for (NodeId u = 0; u + 1 < n; ++u) edges.emplace_back(u, u + 1);
  return build(n, edges);
}

Topology make_cycle(std::size_t n) {
  if (n < 3) throw std::invalid_argument("cycle needs at least 3 nodes");
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) edges.emplace_back(u, static_cast<NodeId>((u + 1) % n));
  return build(n, edges);
}

Topology make_star(std::size_t n) {
  if (n < 2) throw std::invalid_argument("star needs at least 2 nodes");
  std::vector<Edge> edges;
  for (NodeId u = 1; u < n; ++u) edges.emplace_back(0, u);
  return build(n, edges);
}

Topology make_grid(std::size_t width, std::size_t height) {
  if (width * height < 2) throw std::invalid_argument("grid needs at least 2 nodes");
  std::vector<Edge> edges;
  auto id = [width](std::size_t x, std::size_t y) { return static_cast<NodeId>(y * width + x); };
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      if (x + 1 < width) edges.emplace_back(id(x, y), id(x + 1, y));
      if (y + 1 < height) edges.emplace_back(id(x, y), id(x, y + 1));
    }
  }
  return build(width * height, edges);
}

Topology make_complete(std::size_t n) {
  if (n < 2) throw std::invalid_argument("complete graph needs at least 2 nodes");
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  }
  return build(n, edges);
}

Topology make_random_connected(std::size_t n, double edge_probability, std::uint64_t seed,
                               int max_attempts) {
  if (n < 2) throw std::invalid_argument("random graph needs at least 2 nodes");
  if (!(edge_probability > 0.0 && edge_probability <= 1.0)) {
    throw std::invalid_argument("edge probability must be in (0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(edge_probability);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<Edge> edges;
    std::vector<std::vector<NodeId>> adj(n);
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = u + 1; v < n; ++v) {
        if (!coin(rng)) continue;
        edges.emplace_back(u, v);
        adj[u].push_back(v);
        adj[v].push_back(u);
      }
    }
    auto dist = bfs_distances(adj, 0);
    if (std::find(dist.begin(), dist.end(), -1) == dist.end()) return build(n, edges);
  }
  throw std::runtime_error("no connected sample after " + std::to_string(max_attempts) +
                           " attempts");
}

Topology make_topology(std::string_view spec, std::uint64_t seed) {
  if (spec == "p2") return make_path(2);
  if (spec == "p3") return make_path(3);
  if (spec == "triangle") return make_cycle(3);
  if (spec == "star4") return make_star(4);
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("bad topology '" + std::string(spec) + "'");
  }
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view arg = spec.substr(colon + 1);
  if (kind == "path") return make_path(parse_count(arg, spec));
  if (kind == "cycle") return make_cycle(parse_count(arg, spec));
  if (kind == "star") return make_star(parse_count(arg, spec));
  if (kind == "complete") return make_complete(parse_count(arg, spec));
  if (kind == "grid") {
    const auto x = arg.find('x');
    if (x == std::string_view::npos) throw std::invalid_argument("grid expects WxH");
    return make_grid(parse_count(arg.substr(0, x), spec), parse_count(arg.substr(x + 1), spec));
  }
  if (kind == "random") {
    const auto comma = arg.find(',');
    if (comma == std::string_view::npos) throw std::invalid_argument("random expects N,P");
    const std::string p(arg.substr(comma + 1));
    std::size_t used = 0;
    double prob = 0;
    try {
      prob = std::stod(p, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != p.size() || p.empty()) throw std::invalid_argument("bad edge probability");
    return make_random_connected(parse_count(arg.substr(0, comma), spec), prob, seed);
  }
  throw std::invalid_argument("unknown topology kind '" + std::string(kind) + "'");
}

std::string topology_kind(std::string_view spec) {
  if (spec == "p2" || spec == "p3") return "path";
  if (spec == "triangle") return "cycle";
  if (spec == "star4") return "star";
  return std::string(spec.substr(0, spec.find(':')));
}

}  // namespace stabfs
