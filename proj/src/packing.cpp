#include "stabfs/packing.hpp"

#include <bit>
#include <string>

namespace stabfs {

int pointer_width(std::uint32_t degree) {
  if (degree == 0) throw PackingError("degree must be positive");
  // bit_width(degree) == ceil(log2(degree + 1))
  return static_cast<int>(std::bit_width(degree));
}

int packed_width(std::uint32_t degree) { return 2 * pointer_width(degree) + 5; }

PackedState pack(const PortState& state, std::uint32_t degree) {
  const int w = pointer_width(degree);
  auto port = [degree](const std::optional<std::uint32_t>& p) -> std::uint64_t {
    if (!p) return degree;
    if (*p >= degree) {
      throw PackingError("port " + std::to_string(*p) + " out of range for degree " +
                         std::to_string(degree));
    }
    return *p;
  };
  if (state.color > 1) throw PackingError("color must be 0 or 1");

  std::uint64_t bits = port(state.parent_port);
  bits = (bits << w) | port(state.tree_parent_port);
  bits = (bits << 1) | state.color;
  bits = (bits << 3) | static_cast<std::uint64_t>(state.status);
  bits = (bits << 1) | static_cast<std::uint64_t>(state.phase);
  return {bits, 2 * w + 5};
}

PortState unpack(const PackedState& packed, std::uint32_t degree) {
  const int w = pointer_width(degree);
  if (packed.width != 2 * w + 5) {
    throw PackingError("packed width " + std::to_string(packed.width) +
                       " does not match degree " + std::to_string(degree));
  }
  std::uint64_t bits = packed.bits;
  if (packed.width < 64 && (bits >> packed.width) != 0) {
    throw PackingError("bits set beyond the packed width");
  }
  PortState s;
  s.phase = static_cast<Phase>(bits & 1u);
  bits >>= 1;
  const auto status = static_cast<std::uint32_t>(bits & 7u);
  if (status >= static_cast<std::uint32_t>(kStatusCount)) {
    throw PackingError("invalid status code " + std::to_string(status));
  }
  s.status = static_cast<Status>(status);
  bits >>= 3;
  s.color = static_cast<std::uint8_t>(bits & 1u);
  bits >>= 1;
  const std::uint64_t mask = (std::uint64_t{1} << w) - 1;
  auto read_port = [degree](std::uint64_t v) -> std::optional<std::uint32_t> {
    if (v == degree) return std::nullopt;
    if (v > degree) throw PackingError("port code " + std::to_string(v) + " out of range");
    return static_cast<std::uint32_t>(v);
  };
  s.tree_parent_port = read_port(bits & mask);
  bits >>= w;
  s.parent_port = read_port(bits & mask);
  return s;
}

PortState to_ports(const Topology& topology, NodeId u, const ProcessState& state) {
  auto port = [&](const std::optional<NodeId>& v) -> std::optional<std::uint32_t> {
    if (!v) return std::nullopt;
    auto p = topology.port_of(u, *v);
    if (!p) {
      throw PackingError("node " + std::to_string(*v) + " is not a neighbor of " +
                         std::to_string(u));
    }
    return static_cast<std::uint32_t>(*p);
  };
  return {port(state.parent), port(state.tree_parent), state.color, state.status, state.phase};
}

ProcessState from_ports(const Topology& topology, NodeId u, const PortState& state) {
  auto nbrs = topology.neighbors(u);
  auto node = [&](const std::optional<std::uint32_t>& p) -> std::optional<NodeId> {
    if (!p) return std::nullopt;
    if (*p >= nbrs.size()) throw PackingError("port out of range");
    return nbrs[*p];
  };
  return {node(state.parent_port), node(state.tree_parent_port), state.color, state.status,
          state.phase};
}

}  // namespace stabfs
