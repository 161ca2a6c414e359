#include <atomic>
#include <condition_variable>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "stabfs/analysis.hpp"
#include "stabfs/experiment.hpp"
#include "stabfs/generators.hpp"
#include "stabfs/io.hpp"
#include "stabfs/packing.hpp"
#include "stabfs/state_space.hpp"

using namespace stabfs;

namespace {

constexpr int kExitBudget = 2;
constexpr int kExitViolation = 3;

Topology load_topology(const std::string& spec, std::uint64_t seed) {
  if (spec.starts_with("file:")) return parse_topology(read_file(spec.substr(5)));
  return make_topology(spec, seed);
}

Configuration load_initial(const std::string& spec, const Topology& topology, std::uint64_t seed) {
  if (spec == "random") return random_configuration(topology, seed);
  if (spec.starts_with("file:")) return parse_configuration(read_file(spec.substr(5)), topology);
  throw std::invalid_argument("--init expects random or file:PATH");
}

DaemonPolicy load_policy(const std::string& spec, std::uint64_t seed) {
  if (spec.starts_with("adversary:")) {
    DaemonPolicy p;
    p.kind = DaemonKind::AdversaryScript;
    p.script = parse_script(read_file(spec.substr(10)));
    p.seed = seed;
    return p;
  }
  return parse_policy(spec, seed);
}

GuardMode parse_guard_mode(const std::string& s) {
  if (s == "on") return GuardMode::Strict;
  if (s == "off") return GuardMode::Permissive;
  throw std::invalid_argument("--strict-guards expects on or off");
}

std::string summary_json(std::size_t trial, std::uint64_t seed, const std::string& policy,
                         const TrialOutcome& out) {
  const TrialSummary& s = out.summary;
  nlohmann::ordered_json j;
  j["trial"] = trial;
  j["seed"] = seed;
  j["n"] = s.n;
  j["D"] = s.diameter;
  j["policy"] = policy;
  j["stop_reason"] = std::string(to_string(out.trace.stop_reason));
  j["steps"] = s.steps;
  j["rounds"] = s.rounds;
  auto& rounds_to = j["rounds_to"] = nlohmann::ordered_json::object();
  for (int l = 0; l < kLevelCount; ++l) {
    const std::string key(to_string(static_cast<Level>(l + 1)));
    if (s.rounds_to[l]) rounds_to[key] = *s.rounds_to[l];
    else rounds_to[key] = nullptr;
  }
  j["max_root_gap"] = s.max_root_gap;
  j["construction_rounds"] = s.construction_rounds;
  auto& counts = j["violation_counts"] = nlohmann::ordered_json::object();
  for (int c = 0; c < kCheckCount; ++c) {
    if (s.violation_counts[c]) counts[std::string(to_string(static_cast<Check>(c)))] = s.violation_counts[c];
  }
  auto& list = j["violations"] = nlohmann::ordered_json::array();
  for (const auto& v : s.violations) {
    nlohmann::ordered_json item;
    item["check"] = std::string(to_string(v.check));
    item["step"] = v.step;
    if (v.node) item["node"] = *v.node;
    item["detail"] = v.detail;
    list.push_back(std::move(item));
  }
  return j.dump();
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string topology = "path:3";
  std::string init = "random";
  std::uint64_t seed = 1;
  std::string daemon = "sync";
  std::string stop = "Al";
  std::size_t max_steps = 0;
  std::size_t trials = 1;
  std::string out;
  std::string format = "csv";
  std::string trace;
  std::string strict_guards = "on";
  std::string r3_target = "min";
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
};

int cmd_simulate(const SimulateArgs& a) {
  if (a.trials == 0) {
    std::cerr << "error: --trials must be positive\n";
    return 1;
  }
  const StopSpec stop = parse_stop(a.stop);
  ExecutionOptions options;
  options.guard_mode = parse_guard_mode(a.strict_guards);
  options.record_trace = false;
  if (a.r3_target == "random") options.r3_target = TargetSelection::Random;
  else if (a.r3_target != "min") throw std::invalid_argument("--r3-target expects min or random");

  if (a.format != "csv" && a.format != "structured") {
    throw std::invalid_argument("--format expects csv or structured");
  }
  // Load errors surface before any output is written.
  {
    const Topology t0 = load_topology(a.topology, a.seed);
    load_initial(a.init, t0, a.seed);
    load_policy(a.daemon, a.seed);
  }

  std::ofstream out_file;
  if (!a.out.empty()) {
    out_file.open(a.out);
    if (!out_file) throw std::runtime_error("cannot write " + a.out);
  }
  std::ostream& out = a.out.empty() ? std::cout : out_file;
  std::unique_ptr<std::ofstream> trace;
  if (!a.trace.empty()) {
    trace = std::make_unique<std::ofstream>(a.trace);
    if (!*trace) throw std::runtime_error("cannot write " + a.trace);
  }
  if (a.format == "csv") out << csv_header();

  struct Finished {
    std::string row;
    std::string trace;
    bool on_target = false;
    bool clean = true;
    std::string error;
  };
  auto run_one = [&](std::size_t i) {
    Finished f;
    try {
      const std::uint64_t seed = a.seed + i;
      const Topology topology = load_topology(a.topology, seed);
      const Configuration initial = load_initial(a.init, topology, seed);
      const DaemonPolicy policy = load_policy(a.daemon, seed);
      const std::size_t budget = a.max_steps ? a.max_steps : default_step_budget(topology, stop);
      std::ostringstream trace_text;
      StepObserver record;
      if (trace) {
        trace_text << "{\"trial\":" << i << ",\"seed\":" << seed << "}\n";
        record = [&trace_text](const StepEvent& e) {
          trace_text << format_step_record(e.index + 1, e.moves, e.round) << "\n";
        };
      }
      const TrialOutcome result =
          run_trial(topology, initial, policy, stop, budget, options, record);
      f.row = a.format == "csv"
                  ? csv_row(result.summary, topology_kind(a.topology), seed, to_string(policy))
                  : summary_json(i, seed, to_string(policy), result) + "\n";
      f.trace = trace_text.str();
      f.on_target = result.stopped_on_target;
      f.clean = result.summary.clean();
    } catch (const std::exception& e) {
      f.error = e.what();
    }
    return f;
  };

  // Trials run on a worker pool; results are written in trial order.
  std::vector<std::optional<Finished>> done(a.trials);
  std::mutex mu;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};
  const std::size_t jobs = std::max<std::size_t>(1, std::min<std::size_t>(a.jobs, a.trials));
  std::vector<std::jthread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < a.trials; i = next++) {
        Finished f = run_one(i);
        std::lock_guard lock(mu);
        done[i] = std::move(f);
        ready.notify_all();
      }
    });
  }

  int status = 0;
  std::size_t dirty = 0;
  std::string error;
  for (std::size_t i = 0; i < a.trials; ++i) {
    Finished f;
    {
      std::unique_lock lock(mu);
      ready.wait(lock, [&] { return done[i].has_value(); });
      f = std::move(*done[i]);
      done[i].reset();
    }
    if (!f.error.empty()) {
      if (error.empty()) error = "trial " + std::to_string(i) + ": " + f.error;
      continue;
    }
    out << f.row;
    out.flush();
    if (trace) *trace << f.trace;
    if (!f.on_target) status = kExitBudget;
    if (!f.clean) ++dirty;
  }
  workers.clear();
  if (!error.empty()) throw std::runtime_error(error);
  if (dirty) std::cerr << "warning: " << dirty << " trial(s) reported property violations\n";
  return status;
}

// ---------------------------------------------------------------------------
// check

struct Verdict {
  std::string name;
  std::uint64_t violations = 0;
  std::uint64_t checked = 0;
  std::string note;
};

void print(const Verdict& v) {
  std::cout << std::left << std::setw(32) << v.name << (v.violations ? "FAIL" : "PASS") << "  "
            << v.violations << " violations / " << v.checked << " checked";
  if (!v.note.empty()) std::cout << "  (" << v.note << ")";
  std::cout << "\n";
}

std::vector<Verdict> suite_basics(const Topology& t) {
  const BasicsReport r = model_check_basics(t);
  std::vector<Verdict> out;
  out.push_back({"liveness", r.liveness_violations, r.configurations, ""});
  out.push_back({"guard-exclusivity", r.exclusivity_violations, r.configurations, ""});
  out.push_back({"ok-excludes-recovery", r.ok_recovery_overlaps, r.configurations, ""});
  for (const auto& hit : r.exclusivity_examples) {
    std::string rules;
    for (const auto& rule : hit.rules) rules += " " + to_string(rule);
    std::cerr << "exclusivity hit at node " << hit.node << ":" << rules << " in "
              << format_configuration(hit.config);
  }
  std::cout << "strongconflict readings differ on " << r.strong_conflict_reading_differences
            << " (configuration, process) pairs\n";
  return out;
}

std::vector<Verdict> suite_closures(const Topology& t, std::size_t trials, std::uint64_t seed) {
  ClosureMode mode;
  const bool exhaustive = configuration_count(t) <= kDefaultEnumerationCap;
  mode.exhaustive = exhaustive;
  mode.trials = trials;
  mode.seed = seed;
  const ClosureResult r = closure_check(t, kAllClosureProperties, mode);
  std::vector<Verdict> out;
  for (std::size_t i = 0; i < std::size(kAllClosureProperties); ++i) {
    out.push_back({std::string(to_string(kAllClosureProperties[i])), r.violation_counts[i],
                   r.steps_checked, exhaustive ? "exhaustive" : "randomized"});
  }
  return out;
}

std::vector<Verdict> run_monitored(const Topology& t, std::size_t trials, std::uint64_t seed,
                                   const StopSpec& stop, std::span<const Check> checks,
                                   std::size_t& steps) {
  static const char* kPolicies[] = {"sync",        "central-random", "central-min",
                                    "dist-random:0.5", "round-robin", "weakly-fair"};
  std::array<std::uint64_t, kCheckCount> totals{};
  std::size_t unfinished = 0;
  steps = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    const std::uint64_t s = seed + i;
    const DaemonPolicy policy = parse_policy(kPolicies[i % std::size(kPolicies)], s);
    ExecutionOptions options;
    options.record_trace = false;
    const Configuration init = random_configuration(t, s);
    const TrialOutcome r = run_trial(t, init, policy, stop, default_step_budget(t, stop), options);
    steps += r.summary.steps;
    if (!r.stopped_on_target) ++unfinished;
    for (int c = 0; c < kCheckCount; ++c) totals[c] += r.summary.violation_counts[c];
  }
  std::vector<Verdict> out;
  for (Check c : checks) {
    out.push_back({std::string(to_string(c)), totals[static_cast<int>(c)], trials, "trials"});
  }
  out.push_back({"stop-within-budget", unfinished, trials, "trials"});
  return out;
}

std::vector<Verdict> suite_recovery(const Topology& t, std::size_t trials, std::uint64_t seed) {
  static constexpr Check checks[] = {
      Check::RoundsToA1,      Check::RoundsToA2,    Check::RoundsToA3,      Check::RoundsToA4,
      Check::RoundsToAl,      Check::AttractorClosure, Check::RootGap,      Check::StrongERecovery,
      Check::WeakERecovery,   Check::PowerResolution, Check::PicPotential,  Check::PirPotential,
      Check::RColorMonotone,  Check::StrongERecoveryFromA1, Check::WeakERecoveryFromA1};
  std::size_t steps = 0;
  return run_monitored(t, trials, seed, parse_stop("Al"), checks, steps);
}

std::vector<Verdict> suite_languages(const Topology& t, std::size_t trials, std::uint64_t seed) {
  static constexpr Check checks[] = {Check::MoveLanguage, Check::BfsAtConstruction,
                                     Check::StepLemma, Check::ConstructionRounds,
                                     Check::ConstructionMoves};
  std::size_t steps = 0;
  return run_monitored(t, trials, seed, parse_stop("constructions:2"), checks, steps);
}

/// Stage spans inside A4: forwarding and backwarding last at most n-1 rounds,
/// expansion at most 4.
std::vector<Verdict> suite_stages(const Topology& t, std::size_t trials, std::uint64_t seed) {
  const std::size_t n = t.size();
  Verdict fwd{"stage-forwarding<=n-1", 0, 0, "spans"};
  Verdict exp{"stage-expansion<=4", 0, 0, "spans"};
  Verdict back{"stage-backwarding<=n-1", 0, 0, "spans"};
  Verdict order{"stage-order", 0, 0, "changes"};
  for (std::size_t i = 0; i < trials; ++i) {
    const std::uint64_t s = seed + i;
    const DaemonPolicy policy = parse_policy(i % 2 ? "central-random" : "sync", s);
    Stage current = stage_label(random_configuration(t, s), t).stage;
    std::unique_ptr<RoundTracker> clock;
    auto close_span = [&](Stage st, std::size_t rounds) {
      Verdict& v = st == Stage::Forwarding ? fwd : st == Stage::Expansion ? exp : back;
      const std::size_t limit = st == Stage::Expansion ? 4 : n - 1;
      ++v.checked;
      if (rounds > limit) ++v.violations;
    };
    StepObserver watch = [&](const StepEvent& e) {
      const Stage next = stage_label(e.after, t).stage;
      if (clock) clock->advance(e.moves, e.enabled_after);
      if (next == current) return;
      if (clock && current != Stage::NotInPhase) {
        // Spans cut short by the end of the trace are not counted.
        close_span(current, clock->completed() + (clock->at_boundary() ? 0 : 1));
      }
      if (current != Stage::NotInPhase && next != Stage::NotInPhase) {
        // A new phase starts with a root R2, a new construction with a root R1.
        std::optional<RuleName> root;
        for (const Move& m : e.moves) {
          if (m.node == t.root()) root = m.rule.name;
        }
        ++order.checked;
        const bool ok = (current == Stage::Forwarding && next == Stage::Expansion) ||
                        (current == Stage::Expansion && next == Stage::Backwarding) ||
                        (next == Stage::Forwarding && root == RuleName::R2) ||
                        (current == Stage::Backwarding && next == Stage::Expansion &&
                         root == RuleName::R1);
        if (!ok) ++order.violations;
      }
      current = next;
      clock = std::make_unique<RoundTracker>(e.enabled_after);
    };
    ExecutionOptions options;
    options.record_trace = false;
    const StopSpec stop = parse_stop("constructions:2");
    run_trial(t, random_configuration(t, s), policy, stop, default_step_budget(t, stop), options,
              watch);
  }
  return {fwd, exp, back, order};
}

int cmd_check(const std::string& graph, const std::string& suite, std::size_t trials,
              std::uint64_t seed) {
  const Topology t = load_topology(graph, seed);
  const bool all = suite == "all";
  if (!all && suite != "basics" && suite != "closures" && suite != "recovery" &&
      suite != "stages" && suite != "languages") {
    std::cerr << "error: unknown suite '" << suite << "'\n";
    return 1;
  }
  if ((all || suite == "basics") && configuration_count(t) > kDefaultEnumerationCap) {
    std::cerr << "error: " << configuration_count(t)
              << " configurations exceed the enumeration cap\n";
    return kExitBudget;
  }
  std::cout << "graph " << graph << ": n=" << t.size() << " D=" << t.diameter()
            << " configurations=" << configuration_count(t) << "\n";
  std::vector<Verdict> verdicts;
  auto add = [&verdicts](std::vector<Verdict> v) {
    for (auto& x : v) print(x);
    verdicts.insert(verdicts.end(), v.begin(), v.end());
  };
  if (all || suite == "basics") add(suite_basics(t));
  if (all || suite == "closures") add(suite_closures(t, trials * 100, seed));
  if (all || suite == "recovery") add(suite_recovery(t, trials, seed));
  if (all || suite == "stages") add(suite_stages(t, trials, seed));
  if (all || suite == "languages") add(suite_languages(t, trials, seed));
  for (const auto& v : verdicts) {
    if (v.violations) return kExitViolation;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// pack, predicates

int cmd_pack(const std::string& topology_spec, const std::string& init, std::uint64_t seed) {
  const Topology t = load_topology(topology_spec, seed);
  const Configuration c = load_initial(init, t, seed);
  std::size_t total = 0;
  bool round_trip = true;
  std::cout << "node  degree  bits  packed\n";
  for (NodeId u = 0; u < t.size(); ++u) {
    const auto deg = static_cast<std::uint32_t>(t.degree(u));
    const PackedState p = pack(to_ports(t, u, c[u]), deg);
    if (from_ports(t, u, unpack(p, deg)) != c[u]) round_trip = false;
    total += static_cast<std::size_t>(p.width);
    std::string bits;
    for (int b = p.width - 1; b >= 0; --b) bits += ((p.bits >> b) & 1u) ? '1' : '0';
    std::cout << std::setw(4) << u << "  " << std::setw(6) << deg << "  " << std::setw(4)
              << p.width << "  " << bits << "\n";
  }
  std::cout << "total " << total << " bits, round-trip " << (round_trip ? "ok" : "FAILED") << "\n";
  return round_trip ? 0 : kExitViolation;
}

int cmd_predicates(const std::string& topology_spec, const std::string& init, std::uint64_t seed) {
  const Topology t = load_topology(topology_spec, seed);
  const Configuration c = load_initial(init, t, seed);
  PredicateEvaluator eval(t, c);
  std::cout << "node  state";
  for (int p = 0; p < kPredicateCount; ++p) {
    if (static_cast<Predicate>(p) != Predicate::Connection) {
      std::cout << "  " << to_string(static_cast<Predicate>(p));
    }
  }
  std::cout << "  enabled\n";
  for (NodeId u = 0; u < t.size(); ++u) {
    std::cout << u << "  " << to_string(c[u]);
    for (int p = 0; p < kPredicateCount; ++p) {
      const auto which = static_cast<Predicate>(p);
      if (which == Predicate::Connection) continue;
      std::cout << "  " << (eval.eval(u, which) ? 1 : 0);
    }
    auto rules = enabled_guards(eval, u);
    std::cout << "  ";
    if (rules.empty()) std::cout << "-";
    for (std::size_t i = 0; i < rules.size(); ++i) std::cout << (i ? "," : "") << to_string(rules[i]);
    std::cout << "\n";
  }
  const AttractorReport rep = attractor_report(c, t);
  std::cout << "A1=" << rep.a1 << " A2=" << rep.a2 << " A3=" << rep.a3 << " A4=" << rep.a4
            << " Al=" << rep.al << " bfs=" << rep.legitimate_bfs << " A5={";
  for (std::size_t i = 0; i < rep.a5_levels.size(); ++i) std::cout << (i ? "," : "") << rep.a5_levels[i];
  std::cout << "} A4(k,l)={";
  for (std::size_t i = 0; i < rep.a4kl_members.size(); ++i) {
    std::cout << (i ? "," : "") << "(" << rep.a4kl_members[i].first << ","
              << rep.a4kl_members[i].second << ")";
  }
  const StageLabel stage = stage_label(c, t);
  std::cout << "} stage=" << to_string(stage.stage) << " h=" << stage.working_height << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and checker for a self-stabilizing BFS spanning tree algorithm"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run executions and report round bounds");
  simulate->add_option("--topology", sim.topology,
                       "path:N|cycle:N|star:N|grid:WxH|random:N,P|complete:N|file:PATH");
  simulate->add_option("--init", sim.init, "random|file:PATH");
  simulate->add_option("--seed", sim.seed, "Base seed; trial i uses seed+i");
  simulate->add_option("--daemon", sim.daemon,
                       "sync|central-random|central-min|dist-random:P|round-robin|"
                       "adversary:PATH|weakly-fair");
  simulate->add_option("--stop", sim.stop, "A1|A2|A3|A4|Al|rounds:N|constructions:N");
  simulate->add_option("--max-steps", sim.max_steps, "Step budget (default 64*n*round bound)");
  simulate->add_option("--trials", sim.trials, "Number of trials");
  simulate->add_option("--jobs", sim.jobs, "Worker threads (default: hardware concurrency)");
  simulate->add_option("--out", sim.out, "Output file (default stdout)");
  simulate->add_option("--format", sim.format, "csv|structured");
  simulate->add_option("--trace", sim.trace, "Write per-step trace records to PATH");
  simulate->add_option("--strict-guards", sim.strict_guards, "on|off");
  simulate->add_option("--r3-target", sim.r3_target, "min|random");

  std::string graph = "p2", suite = "all";
  std::size_t check_trials = 50;
  std::uint64_t check_seed = 1;
  auto* check = app.add_subcommand("check", "Run property suites");
  check->add_option("--graph", graph, "p2|p3|triangle|star4 or a topology spec");
  check->add_option("--suite", suite, "basics|closures|recovery|stages|languages|all");
  check->add_option("--trials", check_trials, "Randomized trials per suite");
  check->add_option("--seed", check_seed, "Seed");

  std::string pack_topology, pack_init = "random";
  std::uint64_t pack_seed = 1;
  auto* pack_cmd = app.add_subcommand("pack", "Report packed state widths");
  pack_cmd->add_option("--topology", pack_topology)->required();
  pack_cmd->add_option("--init", pack_init, "random|file:PATH");
  pack_cmd->add_option("--seed", pack_seed);

  std::string pred_topology, pred_init = "random";
  std::uint64_t pred_seed = 1;
  auto* pred = app.add_subcommand("predicates", "Print the predicate table of a configuration");
  pred->add_option("--topology", pred_topology)->required();
  pred->add_option("--init", pred_init, "random|file:PATH");
  pred->add_option("--seed", pred_seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*check) return cmd_check(graph, suite, check_trials, check_seed);
    if (*pack_cmd) return cmd_pack(pack_topology, pack_init, pack_seed);
    if (*pred) return cmd_predicates(pred_topology, pred_init, pred_seed);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
