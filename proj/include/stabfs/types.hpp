#ifndef STABFS_TYPES_HPP_
#define STABFS_TYPES_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stabfs {

using NodeId = std::uint32_t;

enum class Status : std::uint8_t { Idle = 0, Working = 1, Power = 2, WeakE = 3, StrongE = 4 };
enum class Phase : std::uint8_t { A = 0, B = 1 };

inline constexpr int kStatusCount = 5;
inline constexpr Status kAllStatuses[] = {Status::Idle, Status::Working, Status::Power,
                                          Status::WeakE, Status::StrongE};
// The root can only hold these.
inline constexpr Status kRootStatuses[] = {Status::Working, Status::Power, Status::StrongE};

inline constexpr bool is_erroneous(Status s) {
  return s == Status::WeakE || s == Status::StrongE;
}
inline constexpr bool is_root_status(Status s) {
  return s == Status::Working || s == Status::Power || s == Status::StrongE;
}
inline constexpr Phase flip(Phase p) { return p == Phase::A ? Phase::B : Phase::A; }

std::string_view to_string(Status s);
std::string_view to_string(Phase p);
Status parse_status(std::string_view name);
Phase parse_phase(std::string_view name);

/// Local variables of one process. For the root, `parent` and
/// `tree_parent` are permanently empty.
struct ProcessState {
  std::optional<NodeId> parent;       // P
  std::optional<NodeId> tree_parent;  // TS
  std::uint8_t color = 0;             // C, 0 or 1
  Status status = Status::Idle;       // S
  Phase phase = Phase::A;             // ph

  friend bool operator==(const ProcessState&, const ProcessState&) = default;
};

/// Global state: one ProcessState per node, indexed by NodeId.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::size_t n) : states_(n) {}
  explicit Configuration(std::vector<ProcessState> states) : states_(std::move(states)) {}

  std::size_t size() const { return states_.size(); }
  const ProcessState& operator[](NodeId u) const { return states_[u]; }
  ProcessState& operator[](NodeId u) { return states_[u]; }
  const std::vector<ProcessState>& states() const { return states_; }

  auto begin() const { return states_.begin(); }
  auto end() const { return states_.end(); }

  friend bool operator==(const Configuration&, const Configuration&) = default;

  struct Hash {
    std::size_t operator()(const Configuration& c) const;
  };

 private:
  std::vector<ProcessState> states_;
};

std::string to_string(const ProcessState& s);

class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace stabfs

#endif  // STABFS_TYPES_HPP_
