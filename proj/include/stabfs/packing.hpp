#ifndef STABFS_PACKING_HPP_
#define STABFS_PACKING_HPP_

#include <cstdint>
#include <stdexcept>

#include "stabfs/topology.hpp"
#include "stabfs/types.hpp"

namespace stabfs {

// Packed layout, most significant bit first:
//   P port (w bits) | TS port (w bits) | C (1) | S (3) | ph (1)
// with w = ceil(log2(degree + 1)). A port is the neighbor's position in the
// sorted adjacency list; the value `degree` encodes an absent pointer.

class PackingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A process state with pointers expressed as ports instead of node ids.
struct PortState {
  std::optional<std::uint32_t> parent_port;
  std::optional<std::uint32_t> tree_parent_port;
  std::uint8_t color = 0;
  Status status = Status::Idle;
  Phase phase = Phase::A;

  friend bool operator==(const PortState&, const PortState&) = default;
};

struct PackedState {
  std::uint64_t bits = 0;
  int width = 0;

  friend bool operator==(const PackedState&, const PackedState&) = default;
};

/// ceil(log2(degree + 1)), the width of one pointer field.
int pointer_width(std::uint32_t degree);
/// 2 * pointer_width(degree) + 5.
int packed_width(std::uint32_t degree);

PackedState pack(const PortState& state, std::uint32_t degree);
PortState unpack(const PackedState& packed, std::uint32_t degree);

PortState to_ports(const Topology& topology, NodeId u, const ProcessState& state);
ProcessState from_ports(const Topology& topology, NodeId u, const PortState& state);

}  // namespace stabfs

#endif  // STABFS_PACKING_HPP_
