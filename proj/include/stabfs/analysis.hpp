#ifndef STABFS_ANALYSIS_HPP_
#define STABFS_ANALYSIS_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stabfs/daemon.hpp"
#include "stabfs/predicates.hpp"
#include "stabfs/rules.hpp"
#include "stabfs/state_space.hpp"
#include "stabfs/topology.hpp"
#include "stabfs/types.hpp"

namespace stabfs {

// ---------------------------------------------------------------------------
// Attractors

/// Nested attractor levels; each one implies the previous.
enum class Level { None = 0, A1 = 1, A2 = 2, A3 = 3, A4 = 4, Al = 5 };
inline constexpr int kLevelCount = 5;  // A1..Al
std::string_view to_string(Level level);
std::optional<Level> parse_level(std::string_view name);

/// Per-configuration evaluator of the attractor definitions. Caches the
/// per-node facts the definitions need.
class AttractorEvaluator {
 public:
  AttractorEvaluator(const Topology& topology, const Configuration& config);

  bool a1() const { return a1_; }
  bool a2() const { return a2_; }
  bool a3() const { return a3_; }
  bool a4() const { return a4_; }
  /// A5(l), l in [0, D+1]. Includes the A4 clause.
  bool a5(int l) const;
  /// A4(k, l), 1 <= k <= l. Includes the A4 clause.
  bool a4kl(int k, int l) const;
  /// A4(l+1, l), l in [0, D+1]. Includes the A4 clause.
  bool a4_next(int l) const;
  /// A5(D+1) or some A4(k, D+1) with 1 <= k <= D+1 or A4(D+2, D+1).
  bool al() const;
  Level level() const;

  const PredicateEvaluator& predicates() const { return eval_; }

 private:
  struct Facts {
    int dist;
    bool root_color;     // C.u = C.r
    bool correct;
    bool influential;
    bool in_legal_tree;
    bool childless;
    bool power;
    bool idle;
    bool calm_status;    // S in {Idle, Working, WeakE}
    bool nbrs_root_color;
  };

  const Topology& topology_;
  const Configuration& config_;
  PredicateEvaluator eval_;
  std::vector<Facts> facts_;
  bool a1_ = false, a2_ = false, a3_ = false, a4_ = false;
};

struct AttractorReport {
  bool a1 = false, a2 = false, a3 = false, a4 = false;
  std::vector<int> a5_levels;                      // ascending
  std::vector<std::pair<int, int>> a4kl_members;   // (k, l), includes (l+1, l)
  bool al = false;
  bool legitimate_bfs = false;                     // bfs_tree_check passes
};

AttractorReport attractor_report(const Configuration& config, const Topology& topology);

// ---------------------------------------------------------------------------
// Legitimacy

struct BfsCheck {
  bool ok = true;
  std::vector<NodeId> violations;  // non-roots with TS absent or dist(TS) != dist - 1
};

BfsCheck bfs_tree_check(const Configuration& config, const Topology& topology);

// ---------------------------------------------------------------------------
// Phase stages

enum class Stage { Forwarding, Expansion, Backwarding, NotInPhase };
std::string_view to_string(Stage s);

struct StageLabel {
  Stage stage = Stage::NotInPhase;
  int working_height = 0;  // max legal-tree height of a Working process
};

StageLabel stage_label(const Configuration& config, const Topology& topology);

// ---------------------------------------------------------------------------
// Move languages
//   non-root: (R3 R5 (R6 R4)* R7)*
//   root:     (R1 R2*)*
// A sequence may start anywhere inside the cycle and stop anywhere.

class LanguageMonitor {
 public:
  explicit LanguageMonitor(const Topology& topology);

  void feed(std::span<const Move> moves);

  bool accepted(NodeId u) const { return !rejected_at_[u]; }
  /// Index (within u's own projected sequence) of the first rejected move.
  std::optional<std::size_t> rejected_at(NodeId u) const { return rejected_at_[u]; }
  const std::vector<RuleName>& sequence(NodeId u) const { return sequences_[u]; }
  std::size_t rejections() const;

 private:
  const Topology& topology_;
  std::vector<std::uint8_t> states_;  // bitset of live automaton states
  std::vector<std::optional<std::size_t>> rejected_at_;
  std::vector<std::vector<RuleName>> sequences_;
};

/// One-shot acceptance of a single projected sequence.
bool accepts_language(bool root, std::span<const RuleName> moves);

struct LanguageVerdict {
  NodeId node;
  bool accepted;
  std::optional<std::size_t> rejected_at;
  std::vector<RuleName> moves;
};

std::vector<LanguageVerdict> move_language_check(const Trace& trace, const Topology& topology,
                                                 std::size_t from_step);

// ---------------------------------------------------------------------------
// Closure checks

enum class ClosureProperty {
  NotFaulty,          // per process
  NotIllegalLiveRoot, // per process
  NotUnSafe,          // per process
  NotUnSafeInA1,      // per process, steps from A1
  NotUnRegularInA4,   // per process, steps from A4
  LegalOrIdleInA4,    // per process: not unRegular and (inLegalTree or Idle), steps from A4
  RColorMonotoneInA4, // #r_color non-decreasing on A4 steps without R1
  A1Closed,
  A2Closed,
  A3Closed,
  A4Closed,
  AlClosed,
};
std::string_view to_string(ClosureProperty p);
std::optional<ClosureProperty> parse_closure_property(std::string_view name);
inline constexpr ClosureProperty kAllClosureProperties[] = {
    ClosureProperty::NotFaulty,        ClosureProperty::NotIllegalLiveRoot,
    ClosureProperty::NotUnSafe,        ClosureProperty::NotUnSafeInA1,
    ClosureProperty::NotUnRegularInA4,
    ClosureProperty::LegalOrIdleInA4,  ClosureProperty::RColorMonotoneInA4,
    ClosureProperty::A1Closed,         ClosureProperty::A2Closed,
    ClosureProperty::A3Closed,         ClosureProperty::A4Closed,
    ClosureProperty::AlClosed};

struct ClosureViolation {
  ClosureProperty property;
  std::optional<NodeId> node;
  Configuration before;
  Configuration after;
  std::vector<Move> moves;
};

/// Exhaustive: every configuration and every nonempty subset of its enabled
/// processes. Randomized: `trials` steps along random walks started from
/// random configurations (restarted every `walk_length` steps), random
/// nonempty activation subsets.
struct ClosureMode {
  bool exhaustive = true;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::size_t walk_length = 64;
  std::uint64_t cap = kDefaultEnumerationCap;
  std::size_t max_reported = 16;  // counterexamples kept per property
};

/// Maps a configuration and resolved moves to the successor. The default is
/// apply_moves; tests substitute broken step functions.
using StepFunction =
    std::function<Configuration(const Configuration&, const Topology&, std::span<const Move>)>;

struct ClosureResult {
  std::uint64_t steps_checked = 0;
  std::vector<std::uint64_t> violation_counts;  // indexed like the properties argument
  std::vector<ClosureViolation> examples;

  std::uint64_t total_violations() const;
};

ClosureResult closure_check(const Topology& topology, std::span<const ClosureProperty> properties,
                            const ClosureMode& mode, const StepFunction& step_fn = {});

// ---------------------------------------------------------------------------
// Exhaustive basics

struct ExclusivityHit {
  Configuration config;
  NodeId node;
  std::vector<Rule> rules;
};

struct BasicsReport {
  std::uint64_t configurations = 0;
  std::uint64_t liveness_violations = 0;
  std::vector<Configuration> liveness_examples;
  std::uint64_t exclusivity_violations = 0;  // (configuration, process) pairs
  std::vector<ExclusivityHit> exclusivity_examples;
  /// Ok(u) holding together with RC1, RC3, RC4 or RC5 enabled at u.
  std::uint64_t ok_recovery_overlaps = 0;
  /// (configuration, process) pairs where the two StrongConflict readings differ.
  std::uint64_t strong_conflict_reading_differences = 0;
};

BasicsReport model_check_basics(const Topology& topology,
                                std::uint64_t cap = kDefaultEnumerationCap,
                                std::size_t max_examples = 16);

// ---------------------------------------------------------------------------
// Round bounds and online monitors

struct Bounds {
  std::size_t a1, a2, a3, a4, al;
  std::size_t root_gap;      // 2n+3
  std::size_t construction;  // D^2+3D+1 (synchronous, paths)
  std::size_t moves;         // 2D+1
};

Bounds round_bounds(std::size_t n, int diameter);

enum class Check {
  RoundsToA1,
  RoundsToA2,
  RoundsToA3,
  RoundsToA4,
  RoundsToAl,
  AttractorClosure,
  RootGap,
  StrongERecovery,
  WeakERecovery,
  PowerResolution,
  BfsAtConstruction,
  MoveLanguage,
  PicPotential,
  PirPotential,
  RColorMonotone,
  StepLemma,
  ConstructionRounds,
  ConstructionMoves,
  // Same obligations, counted only when opened in a configuration of A1 (and,
  // for StrongE, with P.u absent).
  StrongERecoveryFromA1,
  WeakERecoveryFromA1,
};
inline constexpr int kCheckCount = static_cast<int>(Check::WeakERecoveryFromA1) + 1;
std::string_view to_string(Check c);

struct MonitorViolation {
  Check check;
  std::size_t step;  // index of the step at which it was detected
  std::optional<NodeId> node;
  std::string detail;
};

struct TrialSummary {
  std::size_t n = 0;
  int diameter = 0;
  /// Ceiling round index at which each level first held; 0 for the initial
  /// configuration. Indexed A1..Al.
  std::array<std::optional<std::size_t>, kLevelCount> rounds_to{};
  std::size_t max_root_gap = 0;  // rounds, within A4
  std::vector<std::size_t> construction_rounds;  // complete constructions after Al
  std::size_t max_moves_per_process = 0;         // over complete constructions after Al
  std::size_t constructions_after_al = 0;        // R1 executions after Al
  std::size_t steps = 0;
  std::size_t rounds = 0;
  std::array<std::size_t, kCheckCount> violation_counts{};
  std::vector<MonitorViolation> violations;  // first few, for diagnostics

  bool clean() const;
};

/// Observes an execution step by step and checks every round-indexed
/// property online. Usable as the observer of execute() or replay().
class TrialMonitor {
 public:
  TrialMonitor(const Topology& topology, const Configuration& initial, GuardMode mode);
  ~TrialMonitor();
  TrialMonitor(const TrialMonitor&) = delete;
  TrialMonitor& operator=(const TrialMonitor&) = delete;

  void observe(const StepEvent& event);
  StepObserver observer() {
    return [this](const StepEvent& e) { observe(e); };
  }

  /// Summary so far; pending obligations that have not expired are not
  /// counted as violations.
  TrialSummary finish();

  Level level() const { return level_; }
  std::size_t constructions_after_al() const { return summary_.constructions_after_al; }

 private:
  struct Clock;
  struct Obligation;
  struct BoundarySnapshot {
    std::size_t value_pic = 0, value_pir = 0;
    bool in_a1 = false, in_a2 = false;
    std::size_t r1_count = 0;
  };

  std::shared_ptr<Clock> clock_at(std::size_t config_index, const EnabledSet& enabled);
  void violation(Check check, std::size_t step, std::optional<NodeId> node, std::string detail);
  void note_level(Level reached, std::size_t round);
  BoundarySnapshot snapshot(const AttractorEvaluator& ev) const;
  void open_status_obligations(const Configuration& c, const EnabledSet& enabled,
                               std::size_t config_index, const Configuration* prev,
                               std::span<const Move> moves);
  void advance_obligations(const StepEvent& e);
  void recovery_violation(const Obligation& o, std::size_t step, const std::string& detail);
  void check_step_lemmas(const StepEvent& e, const AttractorEvaluator& before,
                         const AttractorEvaluator& after);

  const Topology& topology_;
  GuardMode mode_;
  Bounds bounds_;
  TrialSummary summary_;
  std::size_t steps_ = 0;

  std::unique_ptr<Configuration> prev_config_;
  std::unique_ptr<AttractorEvaluator> prev_eval_;
  Level level_ = Level::None;
  Level prev_level_ = Level::None;
  Level best_level_ = Level::None;

  std::vector<std::shared_ptr<Clock>> clocks_;
  std::shared_ptr<Clock> latest_clock_;
  std::size_t latest_clock_index_ = SIZE_MAX;
  std::vector<Obligation> obligations_;
  std::shared_ptr<Clock> root_clock_;
  bool root_gap_reported_ = false;

  bool al_reached_ = false;
  std::shared_ptr<Clock> construction_clock_;
  std::vector<std::size_t> construction_moves_;
  std::unique_ptr<LanguageMonitor> language_;
  std::vector<char> language_flagged_;
  std::size_t language_reported_ = 0;

  std::vector<BoundarySnapshot> boundaries_;
  std::size_t r1_count_ = 0;
};

/// Replays `trace` through a TrialMonitor.
TrialSummary bound_report(const Trace& trace, const Topology& topology,
                          GuardMode mode = GuardMode::Permissive);

inline constexpr std::string_view kCsvVersion = "stabfs-bounds v1";
/// Header comment line and column line.
std::string csv_header();
std::string csv_row(const TrialSummary& s, std::string_view topology_kind, std::uint64_t seed,
                    std::string_view policy);

// ---------------------------------------------------------------------------
// Stop conditions

/// Stops at the first configuration whose level is at least `target`.
StopCondition stop_at_level(const Topology& topology, Level target);
/// Stops once Al holds and the root has executed R1 `count` times since.
StopCondition stop_constructions_after_al(const Topology& topology, std::size_t count);
/// Same, but reads progress from a monitor observing the same execution.
StopCondition stop_constructions_after_al(const TrialMonitor& monitor, std::size_t count);

}  // namespace stabfs

#endif  // STABFS_ANALYSIS_HPP_
