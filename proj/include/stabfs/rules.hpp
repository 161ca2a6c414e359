#ifndef STABFS_RULES_HPP_
#define STABFS_RULES_HPP_

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stabfs/predicates.hpp"
#include "stabfs/topology.hpp"
#include "stabfs/types.hpp"

namespace stabfs {

enum class RuleName { RC1, RC2, RC3, RC4, RC5, RC6, R1, R2, R3, R4, R5, R6, R7 };

inline constexpr int kRuleCount = 13;

std::string_view to_string(RuleName r);
std::optional<RuleName> parse_rule(std::string_view name);
/// RC1-RC3, R1, R2 run on the root; the rest on non-roots.
bool is_root_rule(RuleName r);
bool is_recovery_rule(RuleName r);

struct Rule {
  RuleName name;
  std::optional<NodeId> connection_target;  // R3 only

  friend bool operator==(const Rule&, const Rule&) = default;
};

std::string to_string(const Rule& r);

/// Order applied when more than one guard holds and the mode is permissive.
inline constexpr RuleName kRulePriority[] = {
    RuleName::RC4, RuleName::RC5, RuleName::RC3, RuleName::RC1, RuleName::RC2,
    RuleName::RC6, RuleName::R1,  RuleName::R2,  RuleName::R3,  RuleName::R4,
    RuleName::R5,  RuleName::R6,  RuleName::R7};

enum class GuardMode { Strict, Permissive };

class GuardExclusivityError : public std::runtime_error {
 public:
  GuardExclusivityError(NodeId node, std::vector<Rule> rules);
  NodeId node() const { return node_; }
  const std::vector<Rule>& rules() const { return rules_; }

 private:
  NodeId node_;
  std::vector<Rule> rules_;
};

/// Neighbors v with Connection(u, v), ascending.
std::vector<NodeId> connection_candidates(const PredicateEvaluator& eval, NodeId u);

/// Every rule whose guard holds at u (R3 reported once, targeting the
/// smallest candidate).
std::vector<Rule> enabled_guards(const PredicateEvaluator& eval, NodeId u);

/// The unique enabled rule, or nullopt. More than one satisfied guard throws
/// GuardExclusivityError in strict mode and resolves by kRulePriority in
/// permissive mode.
std::optional<Rule> enabled_rule(const PredicateEvaluator& eval, NodeId u,
                                 GuardMode mode = GuardMode::Strict);
std::optional<Rule> enabled_rule(const Configuration& config, const Topology& topology, NodeId u,
                                 GuardMode mode = GuardMode::Strict);

/// Applies the action of `rule` at u, reading the pre-step configuration.
/// Does not re-check the guard.
ProcessState apply_action(const Configuration& config, const Topology& topology, NodeId u,
                          const Rule& rule);

/// Checked version: throws ContractError unless `rule` is the rule enabled at u.
ProcessState apply_rule(const Configuration& config, const Topology& topology, NodeId u,
                        const Rule& rule);

struct Move {
  NodeId node;
  Rule rule;

  friend bool operator==(const Move&, const Move&) = default;
};

struct StepRecord {
  std::vector<Move> activated;
  Configuration before;
  Configuration after;
};

/// One computation step: guards and actions all read `before`, writes land
/// together. Throws ContractError on an empty activation or a disabled node.
StepRecord step(const Configuration& before, const Topology& topology,
                std::span<const NodeId> activation, GuardMode mode = GuardMode::Strict);

/// Applies already-resolved moves simultaneously (no guard checks).
Configuration apply_moves(const Configuration& before, const Topology& topology,
                          std::span<const Move> moves);

}  // namespace stabfs

#endif  // STABFS_RULES_HPP_
