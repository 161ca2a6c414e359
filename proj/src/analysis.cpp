#include "stabfs/analysis.hpp"

#include <algorithm>
#include <array>
#include <random>

namespace stabfs {

std::string_view to_string(Level level) {
  switch (level) {
    case Level::None: return "A0";
    case Level::A1: return "A1";
    case Level::A2: return "A2";
    case Level::A3: return "A3";
    case Level::A4: return "A4";
    case Level::Al: return "Al";
  }
  return "?";
}

std::optional<Level> parse_level(std::string_view name) {
  for (Level l : {Level::A1, Level::A2, Level::A3, Level::A4, Level::Al}) {
    if (to_string(l) == name) return l;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

AttractorEvaluator::AttractorEvaluator(const Topology& topology, const Configuration& config)
    : topology_(topology), config_(config), eval_(topology, config) {
  const NodeId n = static_cast<NodeId>(config.size());
  a1_ = true;
  for (NodeId u = 0; u < n && a1_; ++u) {
    if (eval_.faulty(u) || eval_.illegal_live_root(u)) a1_ = false;
  }
  a2_ = a1_;
  for (NodeId u = 0; u < n && a2_; ++u) {
    if (eval_.un_safe(u)) a2_ = false;
  }
  a3_ = a2_;
  for (NodeId u = 0; u < n && a3_; ++u) {
    if (eval_.influential(u) && !eval_.in_legal_tree(u)) a3_ = false;
  }
  a4_ = a3_;
  for (NodeId u = 0; u < n && a4_; ++u) {
    if (config[u].status == Status::StrongE) a4_ = false;
  }
  if (!a4_) return;

  const std::uint8_t rc = config[topology.root()].color;
  facts_.resize(n);
  for (NodeId u = 0; u < n; ++u) {
    const ProcessState& s = config[u];
    Facts& f = facts_[u];
    f.dist = topology.dist(u);
    f.root_color = s.color == rc;
    f.correct = eval_.correct(u);
    f.influential = eval_.influential(u);
    f.in_legal_tree = eval_.in_legal_tree(u);
    f.childless = !eval_.has_child(u);
    f.power = s.status == Status::Power;
    f.idle = s.status == Status::Idle;
    f.calm_status =
        s.status == Status::Idle || s.status == Status::Working || s.status == Status::WeakE;
    f.nbrs_root_color = true;
    for (NodeId v : topology.neighbors(u)) {
      if (config[v].color != rc) f.nbrs_root_color = false;
    }
  }
}

bool AttractorEvaluator::a5(int l) const {
  if (!a4_) return false;
  for (const Facts& f : facts_) {
    if (!(f.dist > l || f.root_color)) return false;
    if (!(f.dist > l - 1 || f.correct)) return false;
  }
  return true;
}

bool AttractorEvaluator::a4kl(int k, int l) const {
  if (!a4_ || k < 1 || k > l) return false;
  for (const Facts& f : facts_) {
    const int d = f.dist;
    if (d < l && !f.correct) return false;
    if (d <= k - 1 && !f.root_color) return false;
    if (k < d && d <= l && f.root_color) return false;
    if (d == k - 1 && !f.nbrs_root_color && !(f.influential && (f.childless || f.power))) {
      return false;
    }
    if (d == k && f.root_color &&
        !(f.in_legal_tree && !f.influential && f.idle && f.childless && f.correct)) {
      return false;
    }
    if (k <= d && !f.calm_status) return false;
  }
  return true;
}

bool AttractorEvaluator::a4_next(int l) const {
  if (!a4_ || l < 0) return false;
  for (const Facts& f : facts_) {
    if (f.dist <= l && !(f.correct && f.root_color)) return false;
    if (f.dist == l && !f.nbrs_root_color && !(f.influential && (f.childless || f.power))) {
      return false;
    }
  }
  return true;
}

bool AttractorEvaluator::al() const {
  if (!a4_) return false;
  const int top = topology_.diameter() + 1;
  if (a5(top) || a4_next(top)) return true;
  for (int k = 1; k <= top; ++k) {
    if (a4kl(k, top)) return true;
  }
  return false;
}

Level AttractorEvaluator::level() const {
  if (!a1_) return Level::None;
  if (!a2_) return Level::A1;
  if (!a3_) return Level::A2;
  if (!a4_) return Level::A3;
  return al() ? Level::Al : Level::A4;
}

AttractorReport attractor_report(const Configuration& config, const Topology& topology) {
  AttractorEvaluator ev(topology, config);
  AttractorReport rep;
  rep.a1 = ev.a1();
  rep.a2 = ev.a2();
  rep.a3 = ev.a3();
  rep.a4 = ev.a4();
  const int top = topology.diameter() + 1;
  for (int l = 0; l <= top; ++l) {
    if (ev.a5(l)) rep.a5_levels.push_back(l);
  }
  for (int l = 0; l <= top; ++l) {
    for (int k = 1; k <= l; ++k) {
      if (ev.a4kl(k, l)) rep.a4kl_members.emplace_back(k, l);
    }
    if (ev.a4_next(l)) rep.a4kl_members.emplace_back(l + 1, l);
  }
  rep.al = ev.al();
  rep.legitimate_bfs = bfs_tree_check(config, topology).ok;
  return rep;
}

// ---------------------------------------------------------------------------

BfsCheck bfs_tree_check(const Configuration& config, const Topology& topology) {
  BfsCheck out;
  for (NodeId u = 0; u < config.size(); ++u) {
    if (topology.is_root(u)) continue;
    const auto& ts = config[u].tree_parent;
    if (!ts || !topology.adjacent(u, *ts) || topology.dist(*ts) != topology.dist(u) - 1) {
      out.violations.push_back(u);
    }
  }
  out.ok = out.violations.empty();
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Forwarding: return "forwarding";
    case Stage::Expansion: return "expansion";
    case Stage::Backwarding: return "backwarding";
    case Stage::NotInPhase: return "not-in-phase";
  }
  return "?";
}

StageLabel stage_label(const Configuration& config, const Topology& topology) {
  AttractorEvaluator ev(topology, config);
  StageLabel out;
  if (!ev.a4()) return out;
  const PredicateEvaluator& p = ev.predicates();
  const NodeId n = static_cast<NodeId>(config.size());

  bool any_influential = false;
  bool all_power = true;
  for (NodeId u = 0; u < n; ++u) {
    if (!p.influential(u)) continue;
    any_influential = true;
    if (config[u].status != Status::Power) all_power = false;
  }
  out.stage = !any_influential ? Stage::Backwarding
              : all_power      ? Stage::Expansion
                               : Stage::Forwarding;

  // Heights in the legal tree, children before parents (decreasing dist along
  // parent pointers is not guaranteed, so iterate to a fixed point).
  std::vector<int> height(n, 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (NodeId u = 0; u < n; ++u) {
      if (!p.in_legal_tree(u) || topology.is_root(u)) continue;
      NodeId parent = *config[u].parent;
      if (height[parent] < height[u] + 1) {
        height[parent] = height[u] + 1;
        changed = true;
      }
    }
  }
  for (NodeId u = 0; u < n; ++u) {
    if (p.in_legal_tree(u) && config[u].status == Status::Working) {
      out.working_height = std::max(out.working_height, height[u]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Non-root automaton: 0 expects R3, 1 expects R5, 2 expects R6|R7, 3 expects R4.
// Root automaton: 0 expects R1, 1 expects R1|R2.
std::uint8_t language_step(bool root, std::uint8_t states, RuleName r) {
  std::uint8_t next = 0;
  auto has = [states](int s) { return (states >> s) & 1u; };
  if (root) {
    if (r == RuleName::R1 && (has(0) || has(1))) next |= 1u << 1;
    if (r == RuleName::R2 && has(1)) next |= 1u << 1;
    return next;
  }
  switch (r) {
    case RuleName::R3:
      if (has(0)) next |= 1u << 1;
      break;
    case RuleName::R5:
      if (has(1)) next |= 1u << 2;
      break;
    case RuleName::R6:
      if (has(2)) next |= 1u << 3;
      break;
    case RuleName::R7:
      if (has(2)) next |= 1u << 0;
      break;
    case RuleName::R4:
      if (has(3)) next |= 1u << 2;
      break;
    default:
      break;
  }
  return next;
}

std::uint8_t language_start(bool root) { return root ? 0b11 : 0b1111; }

}  // namespace

LanguageMonitor::LanguageMonitor(const Topology& topology)
    : topology_(topology),
      states_(topology.size()),
      rejected_at_(topology.size()),
      sequences_(topology.size()) {
  for (NodeId u = 0; u < topology.size(); ++u) states_[u] = language_start(topology.is_root(u));
}

void LanguageMonitor::feed(std::span<const Move> moves) {
  for (const Move& m : moves) {
    auto& seq = sequences_[m.node];
    seq.push_back(m.rule.name);
    if (rejected_at_[m.node]) continue;
    states_[m.node] = language_step(topology_.is_root(m.node), states_[m.node], m.rule.name);
    if (states_[m.node] == 0) rejected_at_[m.node] = seq.size() - 1;
  }
}

std::size_t LanguageMonitor::rejections() const {
  return static_cast<std::size_t>(
      std::count_if(rejected_at_.begin(), rejected_at_.end(), [](const auto& r) { return r; }));
}

bool accepts_language(bool root, std::span<const RuleName> moves) {
  std::uint8_t states = language_start(root);
  for (RuleName r : moves) {
    states = language_step(root, states, r);
    if (!states) return false;
  }
  return true;
}

std::vector<LanguageVerdict> move_language_check(const Trace& trace, const Topology& topology,
                                                 std::size_t from_step) {
  LanguageMonitor monitor(topology);
  for (std::size_t i = from_step; i < trace.steps.size(); ++i) monitor.feed(trace.steps[i].moves);
  std::vector<LanguageVerdict> out;
  for (NodeId u = 0; u < topology.size(); ++u) {
    out.push_back({u, monitor.accepted(u), monitor.rejected_at(u), monitor.sequence(u)});
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array<std::string_view, 12> kClosureNames = {
    "not-faulty", "not-illegal-live-root", "not-unsafe", "not-unsafe-in-A1", "not-unregular-in-A4",
    "legal-or-idle-in-A4", "r-color-monotone-in-A4", "A1-closed", "A2-closed",
    "A3-closed", "A4-closed", "Al-closed"};

bool per_process(ClosureProperty p) {
  switch (p) {
    case ClosureProperty::NotFaulty:
    case ClosureProperty::NotIllegalLiveRoot:
    case ClosureProperty::NotUnSafe:
    case ClosureProperty::NotUnSafeInA1:
    case ClosureProperty::NotUnRegularInA4:
    case ClosureProperty::LegalOrIdleInA4:
      return true;
    default:
      return false;
  }
}

bool needs_a4(ClosureProperty p) {
  return p == ClosureProperty::NotUnRegularInA4 || p == ClosureProperty::LegalOrIdleInA4 ||
         p == ClosureProperty::RColorMonotoneInA4;
}

bool node_holds(ClosureProperty p, const PredicateEvaluator& e, NodeId u) {
  switch (p) {
    case ClosureProperty::NotFaulty: return !e.faulty(u);
    case ClosureProperty::NotIllegalLiveRoot: return !e.illegal_live_root(u);
    case ClosureProperty::NotUnSafe:
    case ClosureProperty::NotUnSafeInA1: return !e.un_safe(u);
    case ClosureProperty::NotUnRegularInA4: return !e.un_regular(u);
    case ClosureProperty::LegalOrIdleInA4:
      return !e.un_regular(u) &&
             (e.in_legal_tree(u) || e.config()[u].status == Status::Idle);
    default: return true;
  }
}

int level_of(ClosureProperty p) {
  switch (p) {
    case ClosureProperty::A1Closed: return 1;
    case ClosureProperty::A2Closed: return 2;
    case ClosureProperty::A3Closed: return 3;
    case ClosureProperty::A4Closed: return 4;
    case ClosureProperty::AlClosed: return 5;
    default: return 0;
  }
}

std::size_t r_color_count(const Configuration& c, const Topology& t) {
  const std::uint8_t rc = c[t.root()].color;
  return static_cast<std::size_t>(
      std::count_if(c.begin(), c.end(), [rc](const ProcessState& s) { return s.color == rc; }));
}

/// Checks all properties on one step, given the evaluated pre-step state.
class StepChecker {
 public:
  StepChecker(const Topology& topology, std::span<const ClosureProperty> props,
              const ClosureMode& mode, ClosureResult& result)
      : topology_(topology), props_(props), mode_(mode), result_(result) {
    result_.violation_counts.assign(props.size(), 0);
    reported_.assign(props.size(), 0);
  }

  void set_before(const Configuration& before) {
    before_ = &before;
    before_eval_.emplace(topology_, before);
    before_level_ = static_cast<int>(before_eval_->level());
    before_rcolor_ = r_color_count(before, topology_);
    const NodeId n = static_cast<NodeId>(before.size());
    holds_before_.assign(props_.size(), std::vector<char>(n, 0));
    for (std::size_t i = 0; i < props_.size(); ++i) {
      if (!per_process(props_[i])) continue;
      for (NodeId u = 0; u < n; ++u) {
        holds_before_[i][u] = node_holds(props_[i], before_eval_->predicates(), u);
      }
    }
  }

  const AttractorEvaluator& before_eval() const { return *before_eval_; }

  void check(const Configuration& after, std::span<const Move> moves) {
    ++result_.steps_checked;
    AttractorEvaluator after_eval(topology_, after);
    const NodeId n = static_cast<NodeId>(after.size());
    const bool before_a4 = before_level_ >= 4;
    int after_level = -1;
    for (std::size_t i = 0; i < props_.size(); ++i) {
      const ClosureProperty p = props_[i];
      if (needs_a4(p) && !before_a4) continue;
      if (p == ClosureProperty::NotUnSafeInA1 && before_level_ < 1) continue;
      if (per_process(p)) {
        for (NodeId u = 0; u < n; ++u) {
          if (holds_before_[i][u] && !node_holds(p, after_eval.predicates(), u)) {
            record(i, u, after, moves);
          }
        }
      } else if (p == ClosureProperty::RColorMonotoneInA4) {
        const bool r1 = std::any_of(moves.begin(), moves.end(),
                                    [](const Move& m) { return m.rule.name == RuleName::R1; });
        if (!r1 && r_color_count(after, topology_) < before_rcolor_) {
          record(i, std::nullopt, after, moves);
        }
      } else {
        const int need = level_of(p);
        if (before_level_ >= need) {
          if (after_level < 0) after_level = static_cast<int>(after_eval.level());
          if (after_level < need) record(i, std::nullopt, after, moves);
        }
      }
    }
  }

 private:
  void record(std::size_t i, std::optional<NodeId> u, const Configuration& after,
              std::span<const Move> moves) {
    ++result_.violation_counts[i];
    if (reported_[i] < mode_.max_reported) {
      ++reported_[i];
      result_.examples.push_back(
          {props_[i], u, *before_, after, std::vector<Move>(moves.begin(), moves.end())});
    }
  }

  const Topology& topology_;
  std::span<const ClosureProperty> props_;
  const ClosureMode& mode_;
  ClosureResult& result_;
  std::vector<std::size_t> reported_;
  const Configuration* before_ = nullptr;
  std::optional<AttractorEvaluator> before_eval_;
  int before_level_ = 0;
  std::size_t before_rcolor_ = 0;
  std::vector<std::vector<char>> holds_before_;
};

/// Alternative moves of every enabled process (one per R3 target).
std::vector<std::vector<Move>> move_options(const PredicateEvaluator& eval) {
  std::vector<std::vector<Move>> out;
  for (NodeId u = 0; u < eval.config().size(); ++u) {
    auto rule = enabled_rule(eval, u, GuardMode::Permissive);
    if (!rule) continue;
    std::vector<Move> alts;
    if (rule->name == RuleName::R3) {
      for (NodeId v : connection_candidates(eval, u)) alts.push_back({u, {RuleName::R3, v}});
    } else {
      alts.push_back({u, *rule});
    }
    out.push_back(std::move(alts));
  }
  return out;
}

}  // namespace

std::string_view to_string(ClosureProperty p) { return kClosureNames[static_cast<int>(p)]; }

std::optional<ClosureProperty> parse_closure_property(std::string_view name) {
  for (std::size_t i = 0; i < kClosureNames.size(); ++i) {
    if (kClosureNames[i] == name) return static_cast<ClosureProperty>(i);
  }
  return std::nullopt;
}

std::uint64_t ClosureResult::total_violations() const {
  std::uint64_t total = 0;
  for (auto c : violation_counts) total += c;
  return total;
}

ClosureResult closure_check(const Topology& topology, std::span<const ClosureProperty> properties,
                            const ClosureMode& mode, const StepFunction& step_fn) {
  ClosureResult result;
  StepChecker checker(topology, properties, mode, result);
  auto successor = [&](const Configuration& c, std::span<const Move> moves) {
    return step_fn ? step_fn(c, topology, moves) : apply_moves(c, topology, moves);
  };

  if (mode.exhaustive) {
    ConfigurationSpace space(topology, mode.cap);
    std::vector<Move> moves;
    space.for_each([&](std::uint64_t, const Configuration& c) {
      checker.set_before(c);
      auto options = move_options(checker.before_eval().predicates());
      const std::size_t k = options.size();
      if (k > 20) throw StateSpaceTooLarge(std::uint64_t{1} << k, std::uint64_t{1} << 20);
      for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
        // Odometer over the R3 target choices of the selected processes.
        std::vector<std::size_t> pick(k, 0);
        for (;;) {
          moves.clear();
          for (std::size_t i = 0; i < k; ++i) {
            if ((mask >> i) & 1u) moves.push_back(options[i][pick[i]]);
          }
          checker.check(successor(c, moves), moves);
          std::size_t i = 0;
          for (; i < k; ++i) {
            if (!((mask >> i) & 1u)) continue;
            if (++pick[i] < options[i].size()) break;
            pick[i] = 0;
          }
          if (i == k) break;
        }
      }
    });
    return result;
  }

  std::mt19937_64 rng(mode.seed);
  std::bernoulli_distribution coin(0.5);
  Configuration current;
  std::size_t walked = mode.walk_length;
  for (std::size_t t = 0; t < mode.trials; ++t) {
    if (walked >= mode.walk_length) {
      current = random_configuration(topology, rng());
      walked = 0;
    }
    checker.set_before(current);
    auto options = move_options(checker.before_eval().predicates());
    std::vector<Move> moves;
    while (moves.empty()) {
      for (const auto& alts : options) {
        if (!coin(rng)) continue;
        std::uniform_int_distribution<std::size_t> pick(0, alts.size() - 1);
        moves.push_back(alts[pick(rng)]);
      }
    }
    Configuration next = successor(current, moves);
    checker.check(next, moves);
    current = std::move(next);
    ++walked;
  }
  return result;
}

// ---------------------------------------------------------------------------

BasicsReport model_check_basics(const Topology& topology, std::uint64_t cap,
                                std::size_t max_examples) {
  ConfigurationSpace space(topology, cap);
  BasicsReport rep;
  const NodeId n = static_cast<NodeId>(topology.size());
  space.for_each([&](std::uint64_t, const Configuration& c) {
    ++rep.configurations;
    PredicateEvaluator eval(topology, c);
    PredicateEvaluator literal(topology, c, StrongConflictReading::Literal);
    bool any_enabled = false;
    for (NodeId u = 0; u < n; ++u) {
      auto rules = enabled_guards(eval, u);
      if (!rules.empty()) any_enabled = true;
      if (rules.size() > 1) {
        ++rep.exclusivity_violations;
        if (rep.exclusivity_examples.size() < max_examples) {
          rep.exclusivity_examples.push_back({c, u, rules});
        }
      }
      if (eval.ok(u)) {
        for (const auto& r : rules) {
          if (r.name == RuleName::RC1 || r.name == RuleName::RC3 || r.name == RuleName::RC4 ||
              r.name == RuleName::RC5) {
            ++rep.ok_recovery_overlaps;
            break;
          }
        }
      }
      if (eval.strong_conflict(u) != literal.strong_conflict(u)) {
        ++rep.strong_conflict_reading_differences;
      }
    }
    if (!any_enabled) {
      ++rep.liveness_violations;
      if (rep.liveness_examples.size() < max_examples) rep.liveness_examples.push_back(c);
    }
  });
  return rep;
}

// ---------------------------------------------------------------------------

Bounds round_bounds(std::size_t n, int diameter) {
  const std::size_t d = static_cast<std::size_t>(diameter);
  Bounds b{};
  b.a1 = 1;
  b.a2 = 8 * n - 7;
  b.a3 = 16 * n - 15;
  b.a4 = 16 * n - 13;
  b.al = b.a4 + (d + 2) * n * (2 * n + 3);
  b.root_gap = 2 * n + 3;
  b.construction = d * d + 3 * d + 1;
  b.moves = 2 * d + 1;
  return b;
}

std::string_view to_string(Check c) {
  static constexpr std::array<std::string_view, kCheckCount> names = {
      "rounds-to-A1",        "rounds-to-A2",     "rounds-to-A3",        "rounds-to-A4",
      "rounds-to-Al",        "attractor-closure", "root-gap",           "strongE-recovery",
      "weakE-recovery",      "power-resolution", "bfs-at-construction", "move-language",
      "pic-potential",       "pir-potential",    "r-color-monotone",    "step-lemma",
      "construction-rounds", "construction-moves", "strongE-recovery-from-A1",
      "weakE-recovery-from-A1"};
  return names[static_cast<int>(c)];
}

bool TrialSummary::clean() const {
  for (auto c : violation_counts) {
    if (c) return false;
  }
  return true;
}

std::string csv_header() {
  return "# " + std::string(kCsvVersion) +
         "\nn,D,topology,seed,policy,rounds_to_A1,rounds_to_A2,rounds_to_A3,rounds_to_A4,"
         "rounds_to_Al,max_root_gap,construction_rounds,max_moves_per_process\n";
}

std::string csv_row(const TrialSummary& s, std::string_view topology_kind, std::uint64_t seed,
                    std::string_view policy) {
  std::string row = std::to_string(s.n) + "," + std::to_string(s.diameter) + "," +
                    std::string(topology_kind) + "," + std::to_string(seed) + "," +
                    std::string(policy);
  for (const auto& r : s.rounds_to) row += "," + (r ? std::to_string(*r) : std::string("NA"));
  row += "," + std::to_string(s.max_root_gap) + ",";
  for (std::size_t i = 0; i < s.construction_rounds.size(); ++i) {
    if (i) row += ";";
    row += std::to_string(s.construction_rounds[i]);
  }
  if (s.construction_rounds.empty()) row += "NA";
  row += "," + std::to_string(s.max_moves_per_process) + "\n";
  return row;
}

// ---------------------------------------------------------------------------

StopCondition stop_at_level(const Topology& topology, Level target) {
  return [&topology, target](const ExecutionState& s) {
    return static_cast<int>(AttractorEvaluator(topology, s.config).level()) >=
           static_cast<int>(target);
  };
}

StopCondition stop_constructions_after_al(const Topology& topology, std::size_t count) {
  struct Progress {
    bool al = false;
    std::size_t r1 = 0;
  };
  auto progress = std::make_shared<Progress>();
  return [&topology, count, progress](const ExecutionState& s) {
    if (progress->al && s.last) {
      for (const Move& m : s.last->moves) {
        if (m.rule.name == RuleName::R1) ++progress->r1;
      }
    }
    if (!progress->al) progress->al = AttractorEvaluator(topology, s.config).al();
    return progress->al && progress->r1 >= count;
  };
}

StopCondition stop_constructions_after_al(const TrialMonitor& monitor, std::size_t count) {
  return [&monitor, count](const ExecutionState&) {
    return monitor.level() == Level::Al && monitor.constructions_after_al() >= count;
  };
}

TrialSummary bound_report(const Trace& trace, const Topology& topology, GuardMode mode) {
  TrialMonitor monitor(topology, trace.initial, mode);
  replay(trace, topology, monitor.observer(), mode);
  return monitor.finish();
}

}  // namespace stabfs
