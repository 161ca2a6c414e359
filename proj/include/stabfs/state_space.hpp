#ifndef STABFS_STATE_SPACE_HPP_
#define STABFS_STATE_SPACE_HPP_

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "stabfs/topology.hpp"
#include "stabfs/types.hpp"

namespace stabfs {

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

class StateSpaceTooLarge : public std::runtime_error {
 public:
  StateSpaceTooLarge(std::uint64_t size, std::uint64_t cap);
  std::uint64_t size() const { return size_; }

 private:
  std::uint64_t size_;
};

/// Every local state of `u` over the full variable domains. Non-roots range
/// over (deg+1)^2 * 2 * 5 * 2 states, the root over 2 * 3 * 2.
std::vector<ProcessState> local_states(const Topology& topology, NodeId u);

/// Number of global configurations; saturates at UINT64_MAX.
std::uint64_t configuration_count(const Topology& topology);

/// Mixed-radix view of all configurations of a topology. Node 0 is the
/// fastest-moving digit, so enumeration order is deterministic.
class ConfigurationSpace {
 public:
  explicit ConfigurationSpace(const Topology& topology,
                              std::uint64_t cap = kDefaultEnumerationCap);

  std::uint64_t size() const { return size_; }
  Configuration at(std::uint64_t index) const;

  /// Visits configurations with index in [first, last).
  void for_each(const std::function<void(std::uint64_t, const Configuration&)>& visit,
                std::uint64_t first = 0, std::uint64_t last = UINT64_MAX) const;

 private:
  std::vector<std::vector<ProcessState>> locals_;
  std::uint64_t size_ = 0;
};

/// Uniform draw of every variable from its domain; deterministic in `seed`.
Configuration random_configuration(const Topology& topology, std::uint64_t seed);

/// Throws ContractError if a state violates its role's domain (root with a
/// parent, parent that is not a neighbor, root status outside
/// {Power, Working, StrongE}, color outside {0,1}).
void validate(const Topology& topology, const Configuration& config);

}  // namespace stabfs

#endif  // STABFS_STATE_SPACE_HPP_
