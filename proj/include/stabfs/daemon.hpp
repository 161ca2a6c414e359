#ifndef STABFS_DAEMON_HPP_
#define STABFS_DAEMON_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stabfs/rules.hpp"
#include "stabfs/topology.hpp"
#include "stabfs/types.hpp"

namespace stabfs {

enum class DaemonKind {
  Synchronous,
  CentralRandom,
  CentralMinId,
  DistributedRandom,
  RoundRobin,
  AdversaryScript,
  WeaklyFairQueue,
};

struct DaemonPolicy {
  DaemonKind kind = DaemonKind::Synchronous;
  double probability = 0.5;                   // DistributedRandom
  std::vector<std::vector<NodeId>> script;    // AdversaryScript, cycled
  std::uint64_t seed = 0;
};

std::string to_string(const DaemonPolicy& policy);
/// Parses the CLI spelling: sync, central-random, central-min, dist-random:P,
/// round-robin, weakly-fair. Adversary scripts are loaded separately.
DaemonPolicy parse_policy(std::string_view text, std::uint64_t seed = 0);

/// Stateful scheduler for one execution.
class Scheduler {
 public:
  explicit Scheduler(DaemonPolicy policy);

  /// Nonempty subset of `enabled` (which must be nonempty and ascending).
  /// `step` is the index of the step about to run.
  std::vector<NodeId> select(std::span<const NodeId> enabled, std::size_t step);

  std::mt19937_64& rng() { return rng_; }

 private:
  DaemonPolicy policy_;
  std::mt19937_64 rng_;
  std::size_t script_pos_ = 0;
  NodeId next_turn_ = 0;                       // RoundRobin
  std::vector<std::size_t> enabled_since_;      // WeaklyFairQueue
  std::vector<char> was_enabled_;
};

/// Enabled rule of every node in one configuration.
struct EnabledSet {
  std::vector<std::optional<Rule>> rule;  // by node
  std::vector<NodeId> nodes;              // ascending

  bool contains(NodeId u) const { return rule[u].has_value(); }
};

EnabledSet compute_enabled(const Configuration& config, const Topology& topology,
                           GuardMode mode = GuardMode::Strict);

/// Round accounting. A round ends at the first step after which every node
/// enabled at the round's start has either moved or been disabled in some
/// reached configuration.
class RoundTracker {
 public:
  explicit RoundTracker(const EnabledSet& initial);

  /// Feeds one step; returns true if it closes the current round.
  bool advance(std::span<const Move> moves, const EnabledSet& after);

  std::size_t completed() const { return completed_; }
  bool at_boundary() const { return fresh_; }

 private:
  void restart(const EnabledSet& enabled);

  std::vector<char> pending_;
  std::size_t pending_count_ = 0;
  std::size_t completed_ = 0;
  bool fresh_ = true;
};

/// What a stop condition and an observer see after each step.
struct StepEvent {
  std::size_t index;  // 0-based step index
  const Configuration& before;
  const Configuration& after;
  std::span<const Move> moves;
  const EnabledSet& enabled_before;
  const EnabledSet& enabled_after;
  std::size_t round;  // 1-based round containing this step
  bool closes_round;
};

using StepObserver = std::function<void(const StepEvent&)>;

/// Progress visible to stop conditions.
struct ExecutionState {
  const Configuration& config;
  std::size_t steps = 0;
  std::size_t completed_rounds = 0;
  bool at_round_boundary = true;
  std::size_t root_r1_count = 0;
  const StepEvent* last = nullptr;  // null before the first step
};

using StopCondition = std::function<bool(const ExecutionState&)>;

StopCondition stop_after_rounds(std::size_t rounds);
StopCondition stop_never();

enum class StopReason { TargetReached, StepLimit, NoEnabledProcess };
std::string_view to_string(StopReason r);

struct TraceStep {
  std::vector<Move> moves;
};

struct Trace {
  Configuration initial;
  std::vector<TraceStep> steps;
  /// Configuration indices at which rounds end: boundary b means the round
  /// ends with step b-1.
  std::vector<std::size_t> round_boundaries;
  StopReason stop_reason = StopReason::TargetReached;
  Configuration final;

  /// Round count at the end of the trace, counting a partial last round.
  std::size_t rounds_ceiling() const;
};

enum class TargetSelection { MinId, Random };

struct ExecutionOptions {
  GuardMode guard_mode = GuardMode::Strict;
  TargetSelection r3_target = TargetSelection::MinId;
  bool record_trace = true;
};

/// Runs until `stop` holds (checked at the start and after every step), no
/// process is enabled, or `max_steps` steps were taken.
Trace execute(const Topology& topology, const Configuration& initial, const DaemonPolicy& policy,
              const StopCondition& stop, std::size_t max_steps,
              const ExecutionOptions& options = {}, const StepObserver& observer = {});

/// Replays a recorded trace, recomputing enabled sets and rounds.
void replay(const Trace& trace, const Topology& topology, const StepObserver& observer,
            GuardMode mode = GuardMode::Permissive);

/// Recomputes round boundaries from the raw step sequence.
std::vector<std::size_t> round_boundaries(const Trace& trace, const Topology& topology);

}  // namespace stabfs

#endif  // STABFS_DAEMON_HPP_
