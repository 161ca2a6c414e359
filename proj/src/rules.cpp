#include "stabfs/rules.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace stabfs {

namespace {

constexpr std::array<std::string_view, kRuleCount> kRuleNames = {
    "RC1", "RC2", "RC3", "RC4", "RC5", "RC6", "R1", "R2", "R3", "R4", "R5", "R6", "R7"};

std::string describe(const std::vector<Rule>& rules) {
  std::string out;
  for (const auto& r : rules) {
    if (!out.empty()) out += ", ";
    out += to_string(r);
  }
  return out;
}

}  // namespace

std::string_view to_string(RuleName r) { return kRuleNames[static_cast<int>(r)]; }

std::optional<RuleName> parse_rule(std::string_view name) {
  for (int i = 0; i < kRuleCount; ++i) {
    if (kRuleNames[i] == name) return static_cast<RuleName>(i);
  }
  return std::nullopt;
}

bool is_root_rule(RuleName r) {
  return r == RuleName::RC1 || r == RuleName::RC2 || r == RuleName::RC3 || r == RuleName::R1 ||
         r == RuleName::R2;
}

bool is_recovery_rule(RuleName r) { return static_cast<int>(r) <= static_cast<int>(RuleName::RC6); }

std::string to_string(const Rule& r) {
  std::string out(to_string(r.name));
  if (r.connection_target) out += "->" + std::to_string(*r.connection_target);
  return out;
}

GuardExclusivityError::GuardExclusivityError(NodeId node, std::vector<Rule> rules)
    : std::runtime_error("guard exclusivity violated at node " + std::to_string(node) + ": " +
                         describe(rules)),
      node_(node),
      rules_(std::move(rules)) {}

std::vector<NodeId> connection_candidates(const PredicateEvaluator& eval, NodeId u) {
  std::vector<NodeId> out;
  if (eval.topology().is_root(u)) return out;
  for (NodeId v : eval.topology().neighbors(u)) {
    if (eval.connection(u, v)) out.push_back(v);
  }
  return out;
}

std::vector<Rule> enabled_guards(const PredicateEvaluator& eval, NodeId u) {
  std::vector<Rule> out;
  auto add = [&out](RuleName r) { out.push_back({r, std::nullopt}); };

  if (eval.topology().is_root(u)) {
    const bool conflict = eval.conflict(u);
    if (!conflict && eval.power_faulty(u) && eval.quiet_subtree(u)) add(RuleName::RC1);
    if (eval.detached(u) && eval.strong_e_ready(u)) add(RuleName::RC2);
    if (conflict) add(RuleName::RC3);
    if (eval.ok(u)) {
      if (eval.end_last_phase(u) && eval.no_strong_e_neighbor(u)) add(RuleName::R1);
      if (eval.end_intermediate_phase(u)) add(RuleName::R2);
    }
    return out;
  }

  const bool strong_conflict = eval.strong_conflict(u);
  if (strong_conflict) add(RuleName::RC4);
  if (!strong_conflict && (eval.conflict(u) || eval.faulty(u) || eval.power_faulty(u) ||
                           eval.illegal_live_root(u) || eval.illegal_child(u))) {
    add(RuleName::RC5);
  }
  if (eval.detached(u) && eval.isolated(u)) {
    bool calm = true;
    const ProcessState& su = eval.config()[u];
    for (NodeId v : eval.topology().neighbors(u)) {
      const ProcessState& sv = eval.config()[v];
      if (sv.color != su.color && sv.status == Status::Power) calm = false;
    }
    if (calm) add(RuleName::RC6);
  }
  if (eval.ok(u)) {
    auto targets = connection_candidates(eval, u);
    if (!targets.empty()) out.push_back({RuleName::R3, targets.front()});
    if (eval.new_phase(u)) {
      if (eval.has_child(u)) {
        add(RuleName::R4);
      } else if (eval.no_strong_e_neighbor(u)) {
        add(RuleName::R5);
      }
    }
    if (eval.end_intermediate_phase(u)) add(RuleName::R6);
    if (eval.config()[u].parent && eval.end_last_phase(u)) add(RuleName::R7);
  }
  return out;
}

std::optional<Rule> enabled_rule(const PredicateEvaluator& eval, NodeId u, GuardMode mode) {
  auto rules = enabled_guards(eval, u);
  if (rules.empty()) return std::nullopt;
  if (rules.size() == 1) return rules.front();
  if (mode == GuardMode::Strict) throw GuardExclusivityError(u, std::move(rules));
  for (RuleName name : kRulePriority) {
    for (const auto& r : rules) {
      if (r.name == name) return r;
    }
  }
  return rules.front();
}

std::optional<Rule> enabled_rule(const Configuration& config, const Topology& topology, NodeId u,
                                 GuardMode mode) {
  return enabled_rule(PredicateEvaluator(topology, config), u, mode);
}

ProcessState apply_action(const Configuration& config, const Topology& topology, NodeId u,
                          const Rule& rule) {
  ProcessState s = config[u];
  auto parent_phase = [&]() {
    if (!s.parent) throw ContractError("rule needs a parent");
    return config[*s.parent].phase;
  };
  switch (rule.name) {
    case RuleName::RC1:
    case RuleName::RC2:
      s.status = Status::Working;
      break;
    case RuleName::RC3:
      s.status = Status::StrongE;
      break;
    case RuleName::RC4:
      s.status = Status::StrongE;
      s.parent.reset();
      break;
    case RuleName::RC5:
      s.status = Status::WeakE;
      s.parent.reset();
      break;
    case RuleName::RC6:
      s.status = Status::Idle;
      break;
    case RuleName::R1:
      s.color = static_cast<std::uint8_t>((s.color + 1) % 2);
      s.status = Status::Power;
      break;
    case RuleName::R2:
      s.phase = flip(s.phase);
      s.status = Status::Working;
      break;
    case RuleName::R3: {
      if (!rule.connection_target || !topology.adjacent(u, *rule.connection_target)) {
        throw ContractError("R3 needs a neighbor as connection target");
      }
      const ProcessState& sv = config[*rule.connection_target];
      s.color = sv.color;
      s.phase = sv.phase;
      s.status = Status::Idle;
      s.parent = rule.connection_target;
      s.tree_parent = rule.connection_target;
      break;
    }
    case RuleName::R4:
      s.phase = parent_phase();
      s.status = Status::Working;
      break;
    case RuleName::R5:
      s.phase = parent_phase();
      s.status = Status::Power;
      break;
    case RuleName::R6:
      s.status = Status::Idle;
      break;
    case RuleName::R7:
      s.status = Status::Idle;
      s.parent.reset();
      break;
  }
  return s;
}

ProcessState apply_rule(const Configuration& config, const Topology& topology, NodeId u,
                        const Rule& rule) {
  PredicateEvaluator eval(topology, config);
  auto rules = enabled_guards(eval, u);
  bool found = false;
  for (const auto& r : rules) {
    if (r.name != rule.name) continue;
    if (r.name == RuleName::R3) {
      auto targets = connection_candidates(eval, u);
      found = rule.connection_target &&
              std::find(targets.begin(), targets.end(), *rule.connection_target) != targets.end();
    } else {
      found = true;
    }
  }
  if (!found) {
    throw ContractError(to_string(rule) + " is not enabled at node " + std::to_string(u));
  }
  return apply_action(config, topology, u, rule);
}

Configuration apply_moves(const Configuration& before, const Topology& topology,
                          std::span<const Move> moves) {
  Configuration after = before;
  for (const auto& m : moves) after[m.node] = apply_action(before, topology, m.node, m.rule);
  return after;
}

StepRecord step(const Configuration& before, const Topology& topology,
                std::span<const NodeId> activation, GuardMode mode) {
  if (activation.empty()) throw ContractError("activation set is empty");
  PredicateEvaluator eval(topology, before);
  std::set<NodeId> seen;
  StepRecord record;
  for (NodeId u : activation) {
    if (u >= topology.size()) throw ContractError("activation names an unknown node");
    if (!seen.insert(u).second) continue;
    auto rule = enabled_rule(eval, u, mode);
    if (!rule) throw ContractError("node " + std::to_string(u) + " is not enabled");
    record.activated.push_back({u, *rule});
  }
  std::sort(record.activated.begin(), record.activated.end(),
            [](const Move& a, const Move& b) { return a.node < b.node; });
  record.after = apply_moves(before, topology, record.activated);
  record.before = before;
  return record;
}

}  // namespace stabfs
