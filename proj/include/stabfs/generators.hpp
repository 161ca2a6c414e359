#ifndef STABFS_GENERATORS_HPP_
#define STABFS_GENERATORS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "stabfs/topology.hpp"

namespace stabfs {

// Node 0 is the root in every generated topology.

Topology make_path(std::size_t n);
Topology make_cycle(std::size_t n);
/// Star with the root at the center and n-1 leaves.
Topology make_star(std::size_t n);
Topology make_grid(std::size_t width, std::size_t height);
Topology make_complete(std::size_t n);
/// Erdos-Renyi G(n, p) resampled until connected; throws after
/// `max_attempts` disconnected draws.
Topology make_random_connected(std::size_t n, double edge_probability, std::uint64_t seed,
                               int max_attempts = 1000);

/// Parses path:N, cycle:N, star:N, grid:WxH, random:N,P, complete:N and the
/// short names p2, p3, triangle, star4.
Topology make_topology(std::string_view spec, std::uint64_t seed = 0);

/// "path", "cycle", ... for the CSV topology column.
std::string topology_kind(std::string_view spec);

}  // namespace stabfs

#endif  // STABFS_GENERATORS_HPP_
