// Acceptance run: one PASS/FAIL line per criterion.
//
// Two criteria are known to fail as literally stated (closure of not-unSafe
// from arbitrary configurations, and the StrongE recovery bound). The binary
// prints FAIL for them with counterexamples and the scoped checks that do
// hold, and exits 0 only when the failing set is exactly that known set.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "stabfs/analysis.hpp"
#include "stabfs/experiment.hpp"
#include "stabfs/generators.hpp"
#include "stabfs/packing.hpp"

using namespace stabfs;

namespace {

const std::set<int> kKnownFindings = {3, 7};

std::map<int, bool> g_results;
// Checks outside the twelve criteria; any nonzero entry fails the run.
std::uint64_t g_construction_extra = 0;
std::uint64_t g_lemma_extra = 0;
std::uint64_t g_scoped_extra = 0;

void report(int criterion, bool pass, const std::string& summary) {
  g_results[criterion] = pass;
  std::printf("CRITERION %2d %s  %s%s\n", criterion, pass ? "PASS" : "FAIL", summary.c_str(),
              !pass && kKnownFindings.count(criterion) ? "  [known finding]" : "");
  std::fflush(stdout);
}

void note(const std::string& text) { std::printf("             %s\n", text.c_str()); }

std::string num(std::uint64_t v) { return std::to_string(v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

void criteria_basics() {
  const auto t0 = std::chrono::steady_clock::now();
  std::uint64_t configs = 0, live = 0, excl = 0, overlap = 0;
  for (const char* spec : {"p2", "p3", "triangle"}) {
    const BasicsReport r = model_check_basics(make_topology(spec));
    configs += r.configurations;
    live += r.liveness_violations;
    excl += r.exclusivity_violations;
    overlap += r.ok_recovery_overlaps;
  }
  const double secs = seconds_since(t0);
  report(1, live == 0 && configs == 960 + 172'800 + 388'800 && secs < 120,
         num(live) + " configurations without an enabled process / " + num(configs) + " (" +
             std::to_string(secs).substr(0, 4) + " s)");
  report(2, excl == 0 && overlap == 0,
         num(excl) + " processes with two satisfied guards; " + num(overlap) +
             " Ok/recovery overlaps");
}

void criterion_closures() {
  const ClosureProperty props[] = {ClosureProperty::NotFaulty, ClosureProperty::NotIllegalLiveRoot,
                                   ClosureProperty::NotUnSafe, ClosureProperty::NotUnSafeInA1};
  std::array<std::uint64_t, 4> counts{};
  std::uint64_t steps = 0;
  std::optional<ClosureViolation> unsafe_example;
  auto absorb = [&](const ClosureResult& r) {
    steps += r.steps_checked;
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += r.violation_counts[i];
    for (const auto& ex : r.examples) {
      if (ex.property == ClosureProperty::NotUnSafe && !unsafe_example) unsafe_example = ex;
    }
  };
  ClosureMode exhaustive;
  exhaustive.max_reported = 1;
  for (const char* spec : {"p2", "p3"}) absorb(closure_check(make_topology(spec), props, exhaustive));
  const std::uint64_t exhaustive_steps = steps;

  // 100 random graphs x 1,000 steps.
  std::mt19937_64 rng(2024);
  for (std::uint64_t g = 0; g < 100; ++g) {
    const std::size_t n = 2 + rng() % 29;
    const double p = std::min(1.0, 2.5 / static_cast<double>(n));
    Topology t = make_random_connected(n, p, rng());
    ClosureMode random;
    random.exhaustive = false;
    random.trials = 1000;
    random.seed = rng();
    random.walk_length = 250;
    random.max_reported = 1;
    absorb(closure_check(t, props, random));
  }
  const bool literal_ok = counts[0] == 0 && counts[1] == 0 && counts[2] == 0;
  report(3, literal_ok,
         "violations over " + num(steps) + " steps (" + num(exhaustive_steps) +
             " exhaustive on P2/P3): not-Faulty " + num(counts[0]) + ", not-IllegalLiveRoot " +
             num(counts[1]) + ", not-unSafe " + num(counts[2]));
  note("not-unSafe on steps taken from A1: " + num(counts[3]) + " violations");
  if (unsafe_example) {
    std::string moves;
    for (const Move& m : unsafe_example->moves) {
      moves += " " + std::to_string(m.node) + ":" + std::string(to_string(m.rule.name));
    }
    note("not-unSafe counterexample at node " +
         (unsafe_example->node ? std::to_string(*unsafe_example->node) : std::string("?")) +
         ", moves" + moves + "; a Faulty child turns PowerParent when the root flips its phase");
  }
  g_scoped_extra += counts[3];
}

// ---------------------------------------------------------------------------

struct TrialTotals {
  std::size_t trials = 0;
  std::size_t missed_target = 0;
  std::size_t missing_levels = 0;
  std::size_t constructions = 0;
  double worst_gap_ratio = 0;  // max_root_gap / (2n+3)
  std::array<std::uint64_t, kCheckCount> counts{};
  std::map<Check, std::string> first_example;
  std::string strong_e_delayed;  // a StrongE process that kept its status for 2 rounds
};

const char* kKinds[] = {"path", "cycle", "star", "random"};
const char* kPolicies[] = {"sync", "central-random", "central-min", "dist-random:0.5",
                           "round-robin", "weakly-fair"};

TrialTotals run_trial_set(std::size_t count) {
  TrialTotals tot;
  std::mt19937_64 rng(77);
  const StopSpec stop = parse_stop("constructions:2");
  for (std::size_t i = 0; i < count; ++i) {
    const std::string kind = kKinds[i % 4];
    const std::string policy = kPolicies[(i / 4) % 6];
    std::size_t n = 2 + rng() % 29;
    if (kind == "cycle" && n < 3) n = 3;
    const std::uint64_t seed = rng();
    std::string spec = kind + ":" + std::to_string(n);
    if (kind == "random") {
      spec += "," + std::to_string(std::min(1.0, 2.5 / static_cast<double>(n)));
    }
    Topology t = make_topology(spec, seed);
    const TrialOutcome out =
        run_trial(t, random_configuration(t, seed), parse_policy(policy, seed), stop,
                  default_step_budget(t, stop));
    const TrialSummary& s = out.summary;
    ++tot.trials;
    if (!out.stopped_on_target) ++tot.missed_target;
    for (const auto& r : s.rounds_to) tot.missing_levels += !r.has_value();
    tot.constructions += s.constructions_after_al;
    tot.worst_gap_ratio =
        std::max(tot.worst_gap_ratio, static_cast<double>(s.max_root_gap) / (2.0 * s.n + 3));
    for (int c = 0; c < kCheckCount; ++c) tot.counts[c] += s.violation_counts[c];
    for (const auto& v : s.violations) {
      const std::string where = spec + " seed " + std::to_string(seed) + " " + policy +
                                (v.node ? " node " + std::to_string(*v.node) : "") + ": " +
                                v.detail;
      if (!tot.first_example.count(v.check)) tot.first_example[v.check] = where;
      if (v.check == Check::StrongERecovery && tot.strong_e_delayed.empty() &&
          v.detail.find("unchanged") != std::string::npos) {
        tot.strong_e_delayed = where;
      }
    }
  }
  return tot;
}

std::uint64_t sum(const TrialTotals& t, std::initializer_list<Check> checks) {
  std::uint64_t s = 0;
  for (Check c : checks) s += t.counts[static_cast<int>(c)];
  return s;
}

void example(const TrialTotals& t, Check c) {
  auto it = t.first_example.find(c);
  if (it != t.first_example.end()) note(std::string(to_string(c)) + " e.g. " + it->second);
}

void criterion_construction_shape();

void criteria_trials() {
  const auto t0 = std::chrono::steady_clock::now();
  const TrialTotals t = run_trial_set(10'000);
  note(num(t.trials) + " trials over path, cycle, star, random (n 2..30), six daemon policies, " +
       "stop after 2 constructions past Al; " + std::to_string(seconds_since(t0)).substr(0, 5) + " s");

  report(4, sum(t, {Check::RoundsToA1}) == 0 && t.missing_levels == 0,
         num(sum(t, {Check::RoundsToA1})) + " trials over 1 round to A1");
  example(t, Check::RoundsToA1);

  const auto bounds = sum(t, {Check::RoundsToA2, Check::RoundsToA3, Check::RoundsToA4,
                              Check::RoundsToAl, Check::AttractorClosure});
  report(5, bounds == 0 && t.missed_target == 0 && t.missing_levels == 0,
         num(bounds) + " bound exceedances or attractor exits; " + num(t.missed_target) +
             " trials missed the stop condition");
  for (Check c : {Check::RoundsToA2, Check::RoundsToA3, Check::RoundsToA4, Check::RoundsToAl,
                  Check::AttractorClosure}) {
    example(t, c);
  }

  report(6, sum(t, {Check::RootGap}) == 0,
         num(sum(t, {Check::RootGap})) + " root gaps over 2n+3; worst gap / (2n+3) = " +
             std::to_string(t.worst_gap_ratio).substr(0, 4));
  example(t, Check::RootGap);

  const auto literal =
      sum(t, {Check::StrongERecovery, Check::WeakERecovery, Check::PowerResolution});
  const auto scoped =
      sum(t, {Check::StrongERecoveryFromA1, Check::WeakERecoveryFromA1, Check::PowerResolution});
  report(7, literal == 0,
         "StrongE " + num(sum(t, {Check::StrongERecovery})) + ", WeakE " +
             num(sum(t, {Check::WeakERecovery})) + ", Power " +
             num(sum(t, {Check::PowerResolution})) + " late recoveries");
  note("from A1 (StrongE with P absent): StrongE " + num(sum(t, {Check::StrongERecoveryFromA1})) +
       ", WeakE " + num(sum(t, {Check::WeakERecoveryFromA1})) + ", Power " +
       num(sum(t, {Check::PowerResolution})));
  example(t, Check::StrongERecovery);
  if (!t.strong_e_delayed.empty()) note("strongE-recovery e.g. " + t.strong_e_delayed);
  example(t, Check::WeakERecovery);
  example(t, Check::PowerResolution);
  g_scoped_extra += scoped;

  g_construction_extra = sum(t, {Check::ConstructionRounds, Check::ConstructionMoves});
  example(t, Check::ConstructionRounds);
  example(t, Check::ConstructionMoves);
  criterion_construction_shape();

  report(9, sum(t, {Check::BfsAtConstruction}) == 0 && t.constructions > 0,
         num(sum(t, {Check::BfsAtConstruction})) + " failed BFS checks over " +
             num(t.constructions) + " construction boundaries");
  example(t, Check::BfsAtConstruction);

  report(10, sum(t, {Check::MoveLanguage}) == 0,
         num(sum(t, {Check::MoveLanguage})) + " processes left the move language");
  example(t, Check::MoveLanguage);

  report(11, sum(t, {Check::PicPotential, Check::PirPotential}) == 0,
         "PIC " + num(sum(t, {Check::PicPotential})) + ", PIR " +
             num(sum(t, {Check::PirPotential})) + " windows without strict decrease");
  example(t, Check::PicPotential);
  example(t, Check::PirPotential);

  const auto lemmas = sum(t, {Check::StepLemma, Check::RColorMonotone});
  note("step lemmas and r_color monotonicity in the legitimate regime: " + num(lemmas) +
       " violations");
  example(t, Check::StepLemma);
  example(t, Check::RColorMonotone);
  g_lemma_extra = lemmas;
}

// ---------------------------------------------------------------------------

void criterion_construction_shape() {
  std::size_t trials = 0, wrong_rounds = 0, too_many_moves = 0, short_runs = 0;
  std::string first;
  for (int d = 1; d <= 4; ++d) {
    Topology t = make_path(static_cast<std::size_t>(d) + 1);
    const std::size_t expected = static_cast<std::size_t>(d * d + 3 * d + 1);
    const StopSpec stop = parse_stop("constructions:4");
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const TrialOutcome out = run_trial(t, random_configuration(t, seed), parse_policy("sync"),
                                         stop, default_step_budget(t, stop));
      ++trials;
      const TrialSummary& s = out.summary;
      if (s.construction_rounds.size() < 3) ++short_runs;
      for (std::size_t r : s.construction_rounds) {
        if (r != expected) {
          ++wrong_rounds;
          if (first.empty()) {
            first = "path D=" + std::to_string(d) + " seed " + std::to_string(seed) + ": " +
                    std::to_string(r) + " rounds, expected " + std::to_string(expected);
          }
        }
      }
      if (s.max_moves_per_process > static_cast<std::size_t>(2 * d + 1)) ++too_many_moves;
    }
  }
  report(8, wrong_rounds == 0 && too_many_moves == 0 && short_runs == 0 && g_construction_extra == 0,
         num(wrong_rounds) + " synchronous constructions off D^2+3D+1 and " + num(too_many_moves) +
             " runs over 2D+1 moves (paths D=1..4, " + num(trials) + " runs); " +
             num(g_construction_extra) + " bound exceedances in the mixed trial set");
  if (!first.empty()) note(first);
}

void criterion_packing() {
  std::size_t states = 0, bad = 0;
  for (std::uint32_t d = 1; d <= 8; ++d) {
    int bits = 0;
    while ((1u << bits) < d + 1) ++bits;
    if (packed_width(d) != 2 * bits + 5) ++bad;
    std::set<std::uint64_t> codes;
    std::size_t local = 0;
    for (std::uint32_t p = 0; p <= d; ++p) {
      for (std::uint32_t ts = 0; ts <= d; ++ts) {
        for (std::uint8_t col = 0; col < 2; ++col) {
          for (Status s : kAllStatuses) {
            for (Phase ph : {Phase::A, Phase::B}) {
              PortState st;
              if (p < d) st.parent_port = p;
              if (ts < d) st.tree_parent_port = ts;
              st.color = col;
              st.status = s;
              st.phase = ph;
              const PackedState packed = pack(st, d);
              if (packed.width != packed_width(d) || !(unpack(packed, d) == st)) ++bad;
              codes.insert(packed.bits);
              ++local;
            }
          }
        }
      }
    }
    if (codes.size() != local) ++bad;
    states += local;
  }
  report(12, bad == 0, num(bad) + " width or round-trip failures over " + num(states) +
                           " local states, degree 1..8");
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criteria_basics();
  criterion_closures();
  criteria_trials();
  criterion_packing();

  std::set<int> failing;
  for (const auto& [c, pass] : g_results) {
    if (!pass) failing.insert(c);
  }
  bool ok = failing == kKnownFindings && g_results.size() == 12;
  if (g_lemma_extra || g_scoped_extra) ok = false;
  std::printf("scoped checks (not-unSafe from A1, recovery from A1): %llu violations\n",
              static_cast<unsigned long long>(g_scoped_extra));
  std::printf("failing criteria:");
  for (int c : failing) std::printf(" %d", c);
  std::printf("  (known findings: 3 7)\n");
  std::printf("%s in %.1f s\n", ok ? "RESULT as expected" : "RESULT unexpected", seconds_since(t0));
  return ok ? 0 : 1;
}
