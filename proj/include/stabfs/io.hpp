#ifndef STABFS_IO_HPP_
#define STABFS_IO_HPP_

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stabfs/daemon.hpp"
#include "stabfs/topology.hpp"
#include "stabfs/types.hpp"

namespace stabfs {

/// Malformed input file. `line()` is 1-based when the position is known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::optional<std::size_t> line = std::nullopt);
  std::optional<std::size_t> line() const { return line_; }

 private:
  std::optional<std::size_t> line_;
};

// Topology file: {"nodes": N, "root": r, "edges": [[u, v], ...]}
Topology parse_topology(std::string_view text);
std::string format_topology(const Topology& topology);

// Configuration file: {"<id>": {"P": id|null, "TS": id|null, "C": 0|1,
//                                "S": "Idle"|..., "ph": "a"|"b"}, ...}
// Root entries may omit P and TS.
Configuration parse_configuration(std::string_view text, const Topology& topology);
std::string format_configuration(const Configuration& config);

// Adversary script: [[node, ...], ...], one activation set per step, cycled.
std::vector<std::vector<NodeId>> parse_script(std::string_view text);

/// One structured trace record:
///   {"step":N,"activated":[{"node":u,"rule":"R1"}],"round":R}
std::string format_step_record(std::size_t step, std::span<const Move> moves, std::size_t round);

std::string read_file(const std::filesystem::path& path);

}  // namespace stabfs

#endif  // STABFS_IO_HPP_
