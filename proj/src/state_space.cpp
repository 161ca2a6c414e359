#include "stabfs/state_space.hpp"

#include <limits>
#include <random>
#include <string>

namespace stabfs {

StateSpaceTooLarge::StateSpaceTooLarge(std::uint64_t size, std::uint64_t cap)
    : std::runtime_error("state space has " + std::to_string(size) +
                         " configurations, above the cap of " + std::to_string(cap)),
      size_(size) {}

std::vector<ProcessState> local_states(const Topology& topology, NodeId u) {
  std::vector<ProcessState> out;
  if (topology.is_root(u)) {
    for (std::uint8_t c = 0; c < 2; ++c)
      for (Status s : kRootStatuses)
        for (Phase ph : {Phase::A, Phase::B}) out.push_back({std::nullopt, std::nullopt, c, s, ph});
    return out;
  }
  std::vector<std::optional<NodeId>> pointers{std::nullopt};
  for (NodeId v : topology.neighbors(u)) pointers.emplace_back(v);
  for (auto p : pointers)
    for (auto ts : pointers)
      for (std::uint8_t c = 0; c < 2; ++c)
        for (Status s : kAllStatuses)
          for (Phase ph : {Phase::A, Phase::B}) out.push_back({p, ts, c, s, ph});
  return out;
}

namespace {

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

}  // namespace

std::uint64_t configuration_count(const Topology& topology) {
  std::uint64_t total = 1;
  for (NodeId u = 0; u < topology.size(); ++u) {
    std::uint64_t local = 12;
    if (!topology.is_root(u)) {
      std::uint64_t d = topology.degree(u) + 1;
      local = 20 * d * d;
    }
    total = saturating_mul(total, local);
  }
  return total;
}

ConfigurationSpace::ConfigurationSpace(const Topology& topology, std::uint64_t cap)
    : size_(configuration_count(topology)) {
  if (size_ > cap) throw StateSpaceTooLarge(size_, cap);
  for (NodeId u = 0; u < topology.size(); ++u) locals_.push_back(local_states(topology, u));
}

Configuration ConfigurationSpace::at(std::uint64_t index) const {
  if (index >= size_) throw std::out_of_range("configuration index out of range");
  Configuration c(locals_.size());
  for (std::size_t u = 0; u < locals_.size(); ++u) {
    c[static_cast<NodeId>(u)] = locals_[u][index % locals_[u].size()];
    index /= locals_[u].size();
  }
  return c;
}

void ConfigurationSpace::for_each(
    const std::function<void(std::uint64_t, const Configuration&)>& visit, std::uint64_t first,
    std::uint64_t last) const {
  if (last > size_) last = size_;
  if (first >= last) return;

  std::vector<std::size_t> digit(locals_.size());
  std::uint64_t rest = first;
  for (std::size_t u = 0; u < locals_.size(); ++u) {
    digit[u] = rest % locals_[u].size();
    rest /= locals_[u].size();
  }
  Configuration c = at(first);
  for (std::uint64_t index = first; index < last; ++index) {
    visit(index, c);
    // Odometer increment; only touched nodes are rewritten.
    for (std::size_t u = 0; u < locals_.size(); ++u) {
      if (++digit[u] < locals_[u].size()) {
        c[static_cast<NodeId>(u)] = locals_[u][digit[u]];
        break;
      }
      digit[u] = 0;
      c[static_cast<NodeId>(u)] = locals_[u][0];
    }
  }
}

Configuration random_configuration(const Topology& topology, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Configuration c(topology.size());
  for (NodeId u = 0; u < topology.size(); ++u) {
    ProcessState& s = c[u];
    s.color = static_cast<std::uint8_t>(std::uniform_int_distribution<int>(0, 1)(rng));
    s.phase = std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? Phase::A : Phase::B;
    if (topology.is_root(u)) {
      s.status = kRootStatuses[std::uniform_int_distribution<int>(0, 2)(rng)];
      continue;
    }
    s.status = kAllStatuses[std::uniform_int_distribution<int>(0, kStatusCount - 1)(rng)];
    auto nbrs = topology.neighbors(u);
    std::uniform_int_distribution<std::size_t> pick(0, nbrs.size());  // nbrs.size() means none
    auto draw_pointer = [&]() -> std::optional<NodeId> {
      std::size_t k = pick(rng);
      if (k == nbrs.size()) return std::nullopt;
      return nbrs[k];
    };
    s.parent = draw_pointer();
    s.tree_parent = draw_pointer();
  }
  return c;
}

void validate(const Topology& topology, const Configuration& config) {
  if (config.size() != topology.size()) {
    throw ContractError("configuration has " + std::to_string(config.size()) +
                        " states for a topology of " + std::to_string(topology.size()) +
                        " nodes");
  }
  for (NodeId u = 0; u < config.size(); ++u) {
    const ProcessState& s = config[u];
    const std::string who = "node " + std::to_string(u);
    if (s.color > 1) throw ContractError(who + ": color must be 0 or 1");
    if (topology.is_root(u)) {
      if (s.parent || s.tree_parent) throw ContractError(who + ": the root has no parent pointers");
      if (!is_root_status(s.status)) {
        throw ContractError(who + ": root status must be Power, Working or StrongE");
      }
      continue;
    }
    if (s.parent && !topology.adjacent(u, *s.parent)) {
      throw ContractError(who + ": P points to a non-neighbor");
    }
    if (s.tree_parent && !topology.adjacent(u, *s.tree_parent)) {
      throw ContractError(who + ": TS points to a non-neighbor");
    }
  }
}

}  // namespace stabfs
