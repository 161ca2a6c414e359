#include "stabfs/predicates.hpp"

#include <array>
#include <string>

namespace stabfs {

namespace {

constexpr std::array<std::string_view, kPredicateCount> kNames = {
    "Child",          "StrongConflict",  "Conflict",        "Detached",
    "StrongEReady",   "PowerFaulty",     "Faulty",          "IllegalRoot",
    "IllegalLiveRoot", "IllegalChild",   "Isolated",        "Ok",
    "QuietSubTree",   "EndFirstPhase",   "EndPhase",        "EndLastPhase",
    "EndIntermediatePhase", "Connection", "NewPhase",       "inLegalTree",
    "unRegular",      "insideLegalTree", "unSafe",          "PowerParent",
    "influential",    "PIC",             "PIR",             "PIC_PowerParent",
    "PIR_PowerParent", "correct",
};

constexpr std::int8_t kUnknown = -1;
constexpr std::int8_t kOnPath = 2;

}  // namespace

std::string_view to_string(Predicate p) { return kNames[static_cast<int>(p)]; }

std::optional<Predicate> parse_predicate(std::string_view name) {
  for (int i = 0; i < kPredicateCount; ++i) {
    if (kNames[i] == name) return static_cast<Predicate>(i);
  }
  return std::nullopt;
}

bool is_analysis_predicate(Predicate p) {
  return static_cast<int>(p) >= static_cast<int>(Predicate::InLegalTree);
}

PredicateEvaluator::PredicateEvaluator(const Topology& topology, const Configuration& config,
                                       StrongConflictReading reading)
    : topology_(topology),
      config_(config),
      reading_(reading),
      legal_memo_(config.size(), kUnknown),
      power_parent_memo_(config.size(), kUnknown) {}

std::vector<NodeId> PredicateEvaluator::children(NodeId u) const {
  std::vector<NodeId> out;
  for (NodeId v : topology_.neighbors(u)) {
    if (st(v).parent == u) out.push_back(v);
  }
  return out;
}

bool PredicateEvaluator::has_child(NodeId u) const {
  for (NodeId v : topology_.neighbors(u)) {
    if (st(v).parent == u) return true;
  }
  return false;
}

bool PredicateEvaluator::strong_conflict(NodeId u) const {
  const ProcessState& su = st(u);
  if (su.status == Status::StrongE) return false;
  // Closed neighborhood N[u] = N(u) + u.
  bool power_color[2] = {false, false};
  auto note = [&](NodeId v) {
    if (st(v).status == Status::Power) power_color[st(v).color] = true;
  };
  note(u);
  for (NodeId v : topology_.neighbors(u)) note(v);
  if (reading_ == StrongConflictReading::Pairwise) return power_color[0] && power_color[1];
  return power_color[1 - su.color];
}

bool PredicateEvaluator::conflict(NodeId u) const {
  const ProcessState& su = st(u);
  if (!topology_.is_root(u)) {
    if (!su.parent) return false;
    for (NodeId v : topology_.neighbors(u)) {
      if (st(v).status == Status::Power && st(v).color != su.color) return true;
    }
    return false;
  }
  if (su.status == Status::StrongE) return false;
  const bool childless = !has_child(u);
  for (NodeId v : topology_.neighbors(u)) {
    if (st(v).status == Status::Power && (st(v).color != su.color || childless)) return true;
  }
  return false;
}

bool PredicateEvaluator::detached(NodeId u) const {
  const ProcessState& su = st(u);
  return (!su.parent || topology_.is_root(u)) && su.status != Status::Power && !has_child(u);
}

bool PredicateEvaluator::strong_e_ready(NodeId u) const {
  if (st(u).status != Status::StrongE) return false;
  for (NodeId v : topology_.neighbors(u)) {
    if (st(v).status == Status::Power) return false;
  }
  return true;
}

bool PredicateEvaluator::power_faulty(NodeId u) const {
  if (st(u).status != Status::Power) return false;
  return !no_strong_e_neighbor(u);
}

bool PredicateEvaluator::no_strong_e_neighbor(NodeId u) const {
  for (NodeId v : topology_.neighbors(u)) {
    if (st(v).status == Status::StrongE) return false;
  }
  return true;
}

bool PredicateEvaluator::faulty(NodeId u) const {
  const ProcessState& su = st(u);
  if (topology_.is_root(u) || !su.parent) return false;
  const ProcessState& sp = st(*su.parent);
  if (is_erroneous(sp.status)) return false;
  if (is_erroneous(su.status)) return true;
  if (su.color != sp.color) return true;
  if (sp.status != Status::Working && su.status != Status::Idle) return true;
  const bool phase_differs = su.phase != sp.phase;
  if (sp.status == su.status && phase_differs) return true;
  if (su.status == Status::Power && phase_differs) return true;
  if (sp.status == Status::Power && (has_child(u) || phase_differs)) return true;
  return false;
}

bool PredicateEvaluator::illegal_root(NodeId u) const {
  return !topology_.is_root(u) && !st(u).parent && !detached(u);
}

bool PredicateEvaluator::illegal_live_root(NodeId u) const {
  return illegal_root(u) && !is_erroneous(st(u).status);
}

bool PredicateEvaluator::illegal_child(NodeId u) const {
  const ProcessState& su = st(u);
  return !topology_.is_root(u) && su.parent && is_erroneous(st(*su.parent).status);
}

bool PredicateEvaluator::isolated(NodeId u) const {
  Status s = st(u).status;
  return s == Status::WeakE || s == Status::Working || strong_e_ready(u);
}

bool PredicateEvaluator::ok(NodeId u) const {
  return !strong_conflict(u) && !conflict(u) && !power_faulty(u) && !faulty(u) &&
         !illegal_root(u) && !illegal_child(u);
}

bool PredicateEvaluator::quiet_subtree(NodeId u) const {
  const ProcessState& su = st(u);
  for (NodeId v : topology_.neighbors(u)) {
    const ProcessState& sv = st(v);
    if (sv.parent == u && (sv.status != Status::Idle || sv.phase != su.phase)) return false;
  }
  return true;
}

bool PredicateEvaluator::end_first_phase(NodeId u) const {
  const ProcessState& su = st(u);
  if (su.status != Status::Power || !quiet_subtree(u)) return false;
  for (NodeId v : topology_.neighbors(u)) {
    if (st(v).color != su.color) return false;
  }
  return true;
}

bool PredicateEvaluator::end_phase(NodeId u) const {
  return st(u).status == Status::Working && quiet_subtree(u);
}

bool PredicateEvaluator::end_last_phase(NodeId u) const {
  return !has_child(u) && (end_first_phase(u) || end_phase(u));
}

bool PredicateEvaluator::end_intermediate_phase(NodeId u) const {
  return has_child(u) && (end_first_phase(u) || end_phase(u));
}

bool PredicateEvaluator::connection(NodeId u, NodeId v) const {
  if (!topology_.adjacent(u, v)) return false;
  const ProcessState& su = st(u);
  const ProcessState& sv = st(v);
  return detached(u) && (isolated(u) || su.status == Status::Idle) && sv.color != su.color &&
         sv.status == Status::Power;
}

bool PredicateEvaluator::new_phase(NodeId u) const {
  const ProcessState& su = st(u);
  if (!su.parent || topology_.is_root(u)) return false;
  return su.status == Status::Idle && su.phase != st(*su.parent).phase && quiet_subtree(u);
}

bool PredicateEvaluator::chain_value(NodeId u, std::vector<std::int8_t>& memo,
                                     bool in_legal) const {
  if (memo[u] == 0 || memo[u] == 1) return memo[u] == 1;
  std::vector<NodeId> path;
  bool result = false;
  NodeId x = u;
  for (;;) {
    if (memo[x] == 0 || memo[x] == 1) {
      result = memo[x] == 1;
      break;
    }
    if (memo[x] == kOnPath) {  // cycle: least fixed point is false
      result = false;
      break;
    }
    const ProcessState& sx = st(x);
    if (in_legal) {
      if (topology_.is_root(x)) {
        result = sx.status != Status::StrongE;
        memo[x] = result ? 1 : 0;
        break;
      }
      if (!sx.parent || faulty(x)) {
        memo[x] = 0;
        result = false;
        break;
      }
    } else {
      if (topology_.is_root(x) || !sx.parent || sx.status != Status::Idle) {
        memo[x] = 0;
        result = false;
        break;
      }
      const ProcessState& sp = st(*sx.parent);
      if (sx.phase != sp.phase) {
        result = sp.status == Status::Working;
        memo[x] = result ? 1 : 0;
        break;
      }
    }
    memo[x] = kOnPath;
    path.push_back(x);
    x = *sx.parent;
  }
  for (NodeId y : path) memo[y] = result ? 1 : 0;
  return memo[u] == 1;
}

bool PredicateEvaluator::in_legal_tree(NodeId u) const {
  return chain_value(u, legal_memo_, true);
}

bool PredicateEvaluator::power_parent(NodeId u) const {
  return chain_value(u, power_parent_memo_, false);
}

bool PredicateEvaluator::un_regular(NodeId u) const {
  return !detached(u) && !in_legal_tree(u);
}

bool PredicateEvaluator::inside_legal_tree(NodeId u) const {
  return in_legal_tree(u) && st(u).status != Status::Power && has_child(u);
}

bool PredicateEvaluator::influential(NodeId u) const {
  return st(u).status == Status::Power || power_parent(u);
}

bool PredicateEvaluator::un_safe(NodeId u) const {
  if (!inside_legal_tree(u)) return false;
  for (NodeId v : topology_.neighbors(u)) {
    if (st(v).color != st(u).color && influential(v)) return true;
  }
  return false;
}

bool PredicateEvaluator::pic(NodeId u) const {
  return influential(u) && st(u).color != st(topology_.root()).color;
}

bool PredicateEvaluator::pir(NodeId u) const { return influential(u) && un_regular(u); }

bool PredicateEvaluator::pic_power_parent(NodeId u) const { return pic(u) && power_parent(u); }

bool PredicateEvaluator::pir_power_parent(NodeId u) const { return pir(u) && power_parent(u); }

bool PredicateEvaluator::correct(NodeId u) const {
  if (un_regular(u)) return false;
  if (!in_legal_tree(u) && st(u).status != Status::Idle) return false;
  if (topology_.is_root(u)) return true;
  const auto& ts = st(u).tree_parent;
  return ts && topology_.dist(*ts) < topology_.dist(u);
}

bool PredicateEvaluator::eval(NodeId u, Predicate which, std::optional<NodeId> v) const {
  if ((which == Predicate::Connection) != v.has_value()) {
    throw ContractError(which == Predicate::Connection
                            ? "Connection needs a candidate parent"
                            : std::string(to_string(which)) + " takes no second argument");
  }
  switch (which) {
    case Predicate::Child: return has_child(u);
    case Predicate::StrongConflict: return strong_conflict(u);
    case Predicate::Conflict: return conflict(u);
    case Predicate::Detached: return detached(u);
    case Predicate::StrongEReady: return strong_e_ready(u);
    case Predicate::PowerFaulty: return power_faulty(u);
    case Predicate::Faulty: return faulty(u);
    case Predicate::IllegalRoot: return illegal_root(u);
    case Predicate::IllegalLiveRoot: return illegal_live_root(u);
    case Predicate::IllegalChild: return illegal_child(u);
    case Predicate::Isolated: return isolated(u);
    case Predicate::Ok: return ok(u);
    case Predicate::QuietSubTree: return quiet_subtree(u);
    case Predicate::EndFirstPhase: return end_first_phase(u);
    case Predicate::EndPhase: return end_phase(u);
    case Predicate::EndLastPhase: return end_last_phase(u);
    case Predicate::EndIntermediatePhase: return end_intermediate_phase(u);
    case Predicate::Connection: return connection(u, *v);
    case Predicate::NewPhase: return new_phase(u);
    case Predicate::InLegalTree: return in_legal_tree(u);
    case Predicate::UnRegular: return un_regular(u);
    case Predicate::InsideLegalTree: return inside_legal_tree(u);
    case Predicate::UnSafe: return un_safe(u);
    case Predicate::PowerParent: return power_parent(u);
    case Predicate::Influential: return influential(u);
    case Predicate::PIC: return pic(u);
    case Predicate::PIR: return pir(u);
    case Predicate::PIC_PowerParent: return pic_power_parent(u);
    case Predicate::PIR_PowerParent: return pir_power_parent(u);
    case Predicate::Correct: return correct(u);
  }
  throw ContractError("unknown predicate");
}

bool eval_guard_predicate(const Topology& topology, const Configuration& config, NodeId u,
                          Predicate which, std::optional<NodeId> v) {
  if (is_analysis_predicate(which)) {
    throw ContractError(std::string(to_string(which)) + " is not a guard predicate");
  }
  return PredicateEvaluator(topology, config).eval(u, which, v);
}

bool eval_analysis_predicate(const Topology& topology, const Configuration& config, NodeId u,
                             Predicate which) {
  if (!is_analysis_predicate(which)) {
    throw ContractError(std::string(to_string(which)) + " is not an analysis predicate");
  }
  return PredicateEvaluator(topology, config).eval(u, which);
}

std::vector<NodeId> child_set(const Topology& topology, const Configuration& config, NodeId u) {
  return PredicateEvaluator(topology, config).children(u);
}

std::size_t count_potential(const Topology& topology, const Configuration& config,
                            Potential which) {
  PredicateEvaluator eval(topology, config);
  std::size_t count = 0;
  for (NodeId u = 0; u < config.size(); ++u) {
    bool hit = false;
    switch (which) {
      case Potential::PIC: hit = eval.pic(u); break;
      case Potential::PIR: hit = eval.pir(u); break;
      case Potential::PIC_PowerParent: hit = eval.pic_power_parent(u); break;
      case Potential::PIR_PowerParent: hit = eval.pir_power_parent(u); break;
      case Potential::RColorCount: hit = config[u].color == config[topology.root()].color; break;
    }
    count += hit ? 1 : 0;
  }
  return count;
}

}  // namespace stabfs
