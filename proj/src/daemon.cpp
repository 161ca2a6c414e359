#include "stabfs/daemon.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace stabfs {

std::string to_string(const DaemonPolicy& policy) {
  switch (policy.kind) {
    case DaemonKind::Synchronous: return "sync";
    case DaemonKind::CentralRandom: return "central-random";
    case DaemonKind::CentralMinId: return "central-min";
    case DaemonKind::DistributedRandom: {
      std::ostringstream out;
      out << "dist-random:" << policy.probability;
      return out.str();
    }
    case DaemonKind::RoundRobin: return "round-robin";
    case DaemonKind::AdversaryScript: return "adversary";
    case DaemonKind::WeaklyFairQueue: return "weakly-fair";
  }
  return "?";
}

DaemonPolicy parse_policy(std::string_view text, std::uint64_t seed) {
  DaemonPolicy p;
  p.seed = seed;
  if (text == "sync") {
    p.kind = DaemonKind::Synchronous;
  } else if (text == "central-random") {
    p.kind = DaemonKind::CentralRandom;
  } else if (text == "central-min") {
    p.kind = DaemonKind::CentralMinId;
  } else if (text == "round-robin") {
    p.kind = DaemonKind::RoundRobin;
  } else if (text == "weakly-fair") {
    p.kind = DaemonKind::WeaklyFairQueue;
  } else if (text.starts_with("dist-random")) {
    p.kind = DaemonKind::DistributedRandom;
    if (text.size() > 11) {
      if (text[11] != ':') throw std::invalid_argument("expected dist-random:P");
      p.probability = std::stod(std::string(text.substr(12)));
    }
    if (!(p.probability > 0.0 && p.probability <= 1.0)) {
      throw std::invalid_argument("dist-random probability must be in (0, 1]");
    }
  } else {
    throw std::invalid_argument("unknown daemon '" + std::string(text) + "'");
  }
  return p;
}

Scheduler::Scheduler(DaemonPolicy policy) : policy_(std::move(policy)), rng_(policy_.seed) {}

std::vector<NodeId> Scheduler::select(std::span<const NodeId> enabled, std::size_t step) {
  if (enabled.empty()) throw ContractError("no enabled process to select from");
  switch (policy_.kind) {
    case DaemonKind::Synchronous:
      return {enabled.begin(), enabled.end()};
    case DaemonKind::CentralMinId:
      return {enabled.front()};
    case DaemonKind::CentralRandom: {
      std::uniform_int_distribution<std::size_t> pick(0, enabled.size() - 1);
      return {enabled[pick(rng_)]};
    }
    case DaemonKind::DistributedRandom: {
      std::bernoulli_distribution coin(policy_.probability);
      for (;;) {
        std::vector<NodeId> out;
        for (NodeId u : enabled) {
          if (coin(rng_)) out.push_back(u);
        }
        if (!out.empty()) return out;
      }
    }
    case DaemonKind::RoundRobin: {
      auto it = std::lower_bound(enabled.begin(), enabled.end(), next_turn_);
      if (it == enabled.end()) it = enabled.begin();
      next_turn_ = *it + 1;
      return {*it};
    }
    case DaemonKind::AdversaryScript: {
      std::vector<NodeId> out;
      if (!policy_.script.empty()) {
        const auto& wanted = policy_.script[script_pos_ % policy_.script.size()];
        ++script_pos_;
        for (NodeId u : enabled) {
          if (std::find(wanted.begin(), wanted.end(), u) != wanted.end()) out.push_back(u);
        }
      }
      if (out.empty()) out.push_back(enabled.front());
      return out;
    }
    case DaemonKind::WeaklyFairQueue: {
      // Oldest continuously-enabled process first.
      NodeId max_node = enabled.back();
      if (enabled_since_.size() <= max_node) {
        enabled_since_.resize(max_node + 1, 0);
        was_enabled_.resize(max_node + 1, 0);
      }
      std::vector<char> now(was_enabled_.size(), 0);
      for (NodeId u : enabled) {
        now[u] = 1;
        if (!was_enabled_[u]) enabled_since_[u] = step;
      }
      NodeId best = enabled.front();
      for (NodeId u : enabled) {
        if (enabled_since_[u] < enabled_since_[best]) best = u;
      }
      was_enabled_ = std::move(now);
      was_enabled_[best] = 0;  // it moves now; its wait restarts
      return {best};
    }
  }
  return {enabled.front()};
}

EnabledSet compute_enabled(const Configuration& config, const Topology& topology,
                           GuardMode mode) {
  PredicateEvaluator eval(topology, config);
  EnabledSet out;
  out.rule.resize(config.size());
  for (NodeId u = 0; u < config.size(); ++u) {
    out.rule[u] = enabled_rule(eval, u, mode);
    if (out.rule[u]) out.nodes.push_back(u);
  }
  return out;
}

namespace {

/// Recomputes only the nodes whose guards can have changed: movers and their
/// neighbors (every guard reads the closed neighborhood only).
void refresh_enabled(EnabledSet& set, const Configuration& config, const Topology& topology,
                     std::span<const Move> moves, GuardMode mode) {
  PredicateEvaluator eval(topology, config);
  std::vector<NodeId> dirty;
  for (const auto& m : moves) {
    dirty.push_back(m.node);
    for (NodeId v : topology.neighbors(m.node)) dirty.push_back(v);
  }
  std::sort(dirty.begin(), dirty.end());
  dirty.erase(std::unique(dirty.begin(), dirty.end()), dirty.end());
  for (NodeId u : dirty) set.rule[u] = enabled_rule(eval, u, mode);
  set.nodes.clear();
  for (NodeId u = 0; u < set.rule.size(); ++u) {
    if (set.rule[u]) set.nodes.push_back(u);
  }
}

}  // namespace

RoundTracker::RoundTracker(const EnabledSet& initial) { restart(initial); }

void RoundTracker::restart(const EnabledSet& enabled) {
  pending_.assign(enabled.rule.size(), 0);
  for (NodeId u : enabled.nodes) pending_[u] = 1;
  pending_count_ = enabled.nodes.size();
  fresh_ = true;
}

bool RoundTracker::advance(std::span<const Move> moves, const EnabledSet& after) {
  fresh_ = false;
  for (const auto& m : moves) {
    if (pending_[m.node]) {
      pending_[m.node] = 0;
      --pending_count_;
    }
  }
  for (NodeId u = 0; u < pending_.size(); ++u) {
    if (pending_[u] && !after.contains(u)) {  // neutralized
      pending_[u] = 0;
      --pending_count_;
    }
  }
  if (pending_count_ > 0) return false;
  ++completed_;
  restart(after);
  return true;
}

StopCondition stop_after_rounds(std::size_t rounds) {
  return [rounds](const ExecutionState& s) {
    return s.completed_rounds >= rounds && s.at_round_boundary;
  };
}

StopCondition stop_never() {
  return [](const ExecutionState&) { return false; };
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::TargetReached: return "target-attractor-reached";
    case StopReason::StepLimit: return "step-limit";
    case StopReason::NoEnabledProcess: return "fixpoint-impossible";
  }
  return "?";
}

std::size_t Trace::rounds_ceiling() const {
  std::size_t full = round_boundaries.size();
  std::size_t last = full ? round_boundaries.back() : 0;
  return steps.size() > last ? full + 1 : full;
}

Trace execute(const Topology& topology, const Configuration& initial, const DaemonPolicy& policy,
              const StopCondition& stop, std::size_t max_steps, const ExecutionOptions& options,
              const StepObserver& observer) {
  Trace trace;
  trace.initial = initial;
  Scheduler scheduler(policy);
  std::mt19937_64 target_rng(policy.seed ^ 0x9e3779b97f4a7c15ull);

  Configuration current = initial;
  EnabledSet enabled = compute_enabled(current, topology, options.guard_mode);
  RoundTracker rounds(enabled);
  std::size_t r1_count = 0;
  std::size_t steps = 0;

  auto state = [&](const StepEvent* last) {
    return ExecutionState{current, steps, rounds.completed(), rounds.at_boundary(), r1_count, last};
  };

  if (stop(state(nullptr))) {
    trace.stop_reason = StopReason::TargetReached;
    trace.final = current;
    return trace;
  }

  for (;;) {
    if (enabled.nodes.empty()) {
      trace.stop_reason = StopReason::NoEnabledProcess;
      break;
    }
    if (steps >= max_steps) {
      trace.stop_reason = StopReason::StepLimit;
      break;
    }
    auto chosen = scheduler.select(enabled.nodes, steps);
    std::vector<Move> moves;
    moves.reserve(chosen.size());
    PredicateEvaluator eval(topology, current);
    for (NodeId u : chosen) {
      if (!enabled.contains(u)) throw ContractError("scheduler chose a disabled process");
      Rule rule = *enabled.rule[u];
      if (rule.name == RuleName::R3 && options.r3_target == TargetSelection::Random) {
        auto targets = connection_candidates(eval, u);
        std::uniform_int_distribution<std::size_t> pick(0, targets.size() - 1);
        rule.connection_target = targets[pick(target_rng)];
      }
      if (rule.name == RuleName::R1) ++r1_count;
      moves.push_back({u, rule});
    }
    std::sort(moves.begin(), moves.end(),
              [](const Move& a, const Move& b) { return a.node < b.node; });

    Configuration next = apply_moves(current, topology, moves);
    EnabledSet next_enabled = enabled;
    refresh_enabled(next_enabled, next, topology, moves, options.guard_mode);
    const std::size_t round_index = rounds.completed() + 1;
    const bool closes = rounds.advance(moves, next_enabled);
    ++steps;
    if (closes) trace.round_boundaries.push_back(steps);

    StepEvent event{steps - 1, current, next, moves, enabled, next_enabled, round_index, closes};
    if (observer) observer(event);
    if (options.record_trace) trace.steps.push_back({moves});

    const bool done =
        stop(ExecutionState{next, steps, rounds.completed(), rounds.at_boundary(), r1_count, &event});
    current = std::move(next);
    enabled = std::move(next_enabled);
    if (done) {
      trace.stop_reason = StopReason::TargetReached;
      break;
    }
  }
  trace.final = current;
  return trace;
}

void replay(const Trace& trace, const Topology& topology, const StepObserver& observer,
            GuardMode mode) {
  Configuration current = trace.initial;
  EnabledSet enabled = compute_enabled(current, topology, mode);
  RoundTracker rounds(enabled);
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& moves = trace.steps[i].moves;
    Configuration next = apply_moves(current, topology, moves);
    EnabledSet next_enabled = enabled;
    refresh_enabled(next_enabled, next, topology, moves, mode);
    const std::size_t round_index = rounds.completed() + 1;
    const bool closes = rounds.advance(moves, next_enabled);
    if (observer) {
      observer(StepEvent{i, current, next, moves, enabled, next_enabled, round_index, closes});
    }
    current = std::move(next);
    enabled = std::move(next_enabled);
  }
}

std::vector<std::size_t> round_boundaries(const Trace& trace, const Topology& topology) {
  std::vector<std::size_t> out;
  replay(trace, topology, [&out](const StepEvent& e) {
    if (e.closes_round) out.push_back(e.index + 1);
  });
  return out;
}

}  // namespace stabfs
