#ifndef STABFS_EXPERIMENT_HPP_
#define STABFS_EXPERIMENT_HPP_

#include <cstdint>
#include <string>
#include <string_view>

#include "stabfs/analysis.hpp"
#include "stabfs/daemon.hpp"

namespace stabfs {

/// --stop values: A1 | A2 | A3 | A4 | Al | rounds:N | constructions:N
struct StopSpec {
  enum class Kind { Level, Rounds, Constructions };
  Kind kind = Kind::Level;
  Level level = Level::Al;
  std::size_t count = 0;
};

StopSpec parse_stop(std::string_view text);
std::string to_string(const StopSpec& stop);

/// Round bound implied by the stop condition.
std::size_t round_budget(const Topology& topology, const StopSpec& stop);
/// 64 * n * round_budget.
std::size_t default_step_budget(const Topology& topology, const StopSpec& stop);

struct TrialOutcome {
  Trace trace;
  TrialSummary summary;
  bool stopped_on_target = false;
};

/// Runs one execution with a TrialMonitor attached. `extra` sees every step
/// after the monitor.
TrialOutcome run_trial(const Topology& topology, const Configuration& initial,
                       const DaemonPolicy& policy, const StopSpec& stop, std::size_t max_steps,
                       const ExecutionOptions& options = {}, const StepObserver& extra = {});

}  // namespace stabfs

#endif  // STABFS_EXPERIMENT_HPP_
