#include "stabfs/experiment.hpp"

#include <charconv>
#include <stdexcept>

namespace stabfs {

namespace {

std::size_t parse_size(std::string_view text, std::string_view whole) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("bad stop condition '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

StopSpec parse_stop(std::string_view text) {
  StopSpec s;
  if (auto level = parse_level(text)) {
    s.level = *level;
    return s;
  }
  if (text.starts_with("rounds:")) {
    s.kind = StopSpec::Kind::Rounds;
    s.count = parse_size(text.substr(7), text);
    return s;
  }
  if (text.starts_with("constructions:")) {
    s.kind = StopSpec::Kind::Constructions;
    s.count = parse_size(text.substr(14), text);
    return s;
  }
  throw std::invalid_argument("bad stop condition '" + std::string(text) + "'");
}

std::string to_string(const StopSpec& stop) {
  switch (stop.kind) {
    case StopSpec::Kind::Level: return std::string(to_string(stop.level));
    case StopSpec::Kind::Rounds: return "rounds:" + std::to_string(stop.count);
    case StopSpec::Kind::Constructions: return "constructions:" + std::to_string(stop.count);
  }
  return "?";
}

std::size_t round_budget(const Topology& topology, const StopSpec& stop) {
  const Bounds b = round_bounds(topology.size(), topology.diameter());
  switch (stop.kind) {
    case StopSpec::Kind::Rounds: return stop.count;
    case StopSpec::Kind::Constructions: return b.al + (stop.count + 1) * b.construction;
    case StopSpec::Kind::Level:
      switch (stop.level) {
        case Level::None: return 0;
        case Level::A1: return b.a1;
        case Level::A2: return b.a2;
        case Level::A3: return b.a3;
        case Level::A4: return b.a4;
        case Level::Al: return b.al;
      }
  }
  return b.al;
}

std::size_t default_step_budget(const Topology& topology, const StopSpec& stop) {
  return std::max<std::size_t>(1, 64 * topology.size() * round_budget(topology, stop));
}

TrialOutcome run_trial(const Topology& topology, const Configuration& initial,
                       const DaemonPolicy& policy, const StopSpec& stop, std::size_t max_steps,
                       const ExecutionOptions& options, const StepObserver& extra) {
  TrialMonitor monitor(topology, initial, options.guard_mode);
  StopCondition condition;
  switch (stop.kind) {
    case StopSpec::Kind::Rounds:
      condition = stop_after_rounds(stop.count);
      break;
    case StopSpec::Kind::Constructions:
      condition = stop_constructions_after_al(monitor, stop.count);
      break;
    case StopSpec::Kind::Level:
      condition = [&monitor, target = stop.level](const ExecutionState&) {
        return static_cast<int>(monitor.level()) >= static_cast<int>(target);
      };
      break;
  }
  StepObserver observer = [&](const StepEvent& e) {
    monitor.observe(e);
    if (extra) extra(e);
  };
  TrialOutcome out;
  out.trace = execute(topology, initial, policy, condition, max_steps, options, observer);
  out.summary = monitor.finish();
  out.stopped_on_target = out.trace.stop_reason == StopReason::TargetReached;
  return out;
}

}  // namespace stabfs
