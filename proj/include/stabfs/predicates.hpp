#ifndef STABFS_PREDICATES_HPP_
#define STABFS_PREDICATES_HPP_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "stabfs/topology.hpp"
#include "stabfs/types.hpp"

namespace stabfs {

enum class Predicate {
  // Guard predicates.
  Child,  // Child.u is nonempty
  StrongConflict,
  Conflict,
  Detached,
  StrongEReady,
  PowerFaulty,
  Faulty,
  IllegalRoot,
  IllegalLiveRoot,
  IllegalChild,
  Isolated,
  Ok,
  QuietSubTree,
  EndFirstPhase,
  EndPhase,
  EndLastPhase,
  EndIntermediatePhase,
  Connection,  // takes a candidate parent
  NewPhase,
  // Analysis predicates.
  InLegalTree,
  UnRegular,
  InsideLegalTree,
  UnSafe,
  PowerParent,
  Influential,
  PIC,
  PIR,
  PIC_PowerParent,
  PIR_PowerParent,
  Correct,
};

inline constexpr int kPredicateCount = static_cast<int>(Predicate::Correct) + 1;

std::string_view to_string(Predicate p);
std::optional<Predicate> parse_predicate(std::string_view name);
bool is_analysis_predicate(Predicate p);

/// How the two Power witnesses of StrongConflict are compared.
///   Pairwise: two distinct closed neighbors, both Power, with different
///             colors (the default, matches the rule's described intent).
///   Literal:  some closed neighbor v with C.v != C.u and S.v = Power (the
///             displayed formula lets w = v).
enum class StrongConflictReading { Pairwise, Literal };

/// Evaluates predicates over one configuration. Holds references; the
/// topology and configuration must outlive it. inLegalTree and PowerParent are
/// least fixed points (parent chains that never reach the root are false) and
/// are memoized per instance.
class PredicateEvaluator {
 public:
  PredicateEvaluator(const Topology& topology, const Configuration& config,
                     StrongConflictReading reading = StrongConflictReading::Pairwise);

  const Topology& topology() const { return topology_; }
  const Configuration& config() const { return config_; }

  std::vector<NodeId> children(NodeId u) const;
  bool has_child(NodeId u) const;

  bool strong_conflict(NodeId u) const;
  bool conflict(NodeId u) const;
  bool detached(NodeId u) const;
  bool strong_e_ready(NodeId u) const;
  bool power_faulty(NodeId u) const;
  bool faulty(NodeId u) const;
  bool illegal_root(NodeId u) const;
  bool illegal_live_root(NodeId u) const;
  bool illegal_child(NodeId u) const;
  bool isolated(NodeId u) const;
  bool ok(NodeId u) const;
  bool quiet_subtree(NodeId u) const;
  bool end_first_phase(NodeId u) const;
  bool end_phase(NodeId u) const;
  bool end_last_phase(NodeId u) const;
  bool end_intermediate_phase(NodeId u) const;
  bool connection(NodeId u, NodeId v) const;
  bool new_phase(NodeId u) const;
  bool no_strong_e_neighbor(NodeId u) const;

  bool in_legal_tree(NodeId u) const;
  bool un_regular(NodeId u) const;
  bool inside_legal_tree(NodeId u) const;
  bool un_safe(NodeId u) const;
  bool power_parent(NodeId u) const;
  bool influential(NodeId u) const;
  bool pic(NodeId u) const;
  bool pir(NodeId u) const;
  bool pic_power_parent(NodeId u) const;
  bool pir_power_parent(NodeId u) const;
  bool correct(NodeId u) const;

  /// Dispatch by name. `v` must be given exactly when `which` is Connection.
  bool eval(NodeId u, Predicate which, std::optional<NodeId> v = std::nullopt) const;

 private:
  const ProcessState& st(NodeId u) const { return config_[u]; }
  bool chain_value(NodeId u, std::vector<std::int8_t>& memo, bool in_legal) const;

  const Topology& topology_;
  const Configuration& config_;
  StrongConflictReading reading_;
  mutable std::vector<std::int8_t> legal_memo_;
  mutable std::vector<std::int8_t> power_parent_memo_;
};

/// Guard-level predicate; rejects analysis predicates.
bool eval_guard_predicate(const Topology& topology, const Configuration& config, NodeId u,
                          Predicate which, std::optional<NodeId> v = std::nullopt);
/// Analysis-level predicate (inLegalTree ... correct); rejects guard predicates.
bool eval_analysis_predicate(const Topology& topology, const Configuration& config, NodeId u,
                             Predicate which);

std::vector<NodeId> child_set(const Topology& topology, const Configuration& config, NodeId u);

enum class Potential { PIC, PIR, PIC_PowerParent, PIR_PowerParent, RColorCount };

std::size_t count_potential(const Topology& topology, const Configuration& config,
                            Potential which);

}  // namespace stabfs

#endif  // STABFS_PREDICATES_HPP_
