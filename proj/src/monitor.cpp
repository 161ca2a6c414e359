#include <algorithm>
#include <sstream>

#include "stabfs/analysis.hpp"

namespace stabfs {

struct TrialMonitor::Clock {
  explicit Clock(const EnabledSet& enabled) : tracker(enabled) {}
  RoundTracker tracker;
};

struct TrialMonitor::Obligation {
  enum class Kind { StrongE, WeakE, Power };
  Kind kind;
  NodeId node;
  std::shared_ptr<Clock> clock;
  std::size_t limit;  // whole rounds
  std::size_t opened_at;
  bool from_a1;
};

namespace {

constexpr std::size_t kKeptViolations = 32;

Check check_for(int level) {
  switch (level) {
    case 1: return Check::RoundsToA1;
    case 2: return Check::RoundsToA2;
    case 3: return Check::RoundsToA3;
    case 4: return Check::RoundsToA4;
    default: return Check::RoundsToAl;
  }
}

}  // namespace

TrialMonitor::TrialMonitor(const Topology& topology, const Configuration& initial, GuardMode mode)
    : topology_(topology), mode_(mode), bounds_(round_bounds(topology.size(), topology.diameter())) {
  summary_.n = topology.size();
  summary_.diameter = topology.diameter();
  prev_config_ = std::make_unique<Configuration>(initial);
  prev_eval_ = std::make_unique<AttractorEvaluator>(topology_, *prev_config_);
  EnabledSet enabled = compute_enabled(initial, topology, mode);
  level_ = prev_eval_->level();
  best_level_ = level_;
  note_level(level_, 0);
  if (static_cast<int>(level_) >= static_cast<int>(Level::A4)) root_clock_ = clock_at(0, enabled);
  if (level_ == Level::Al) {
    al_reached_ = true;
    language_ = std::make_unique<LanguageMonitor>(topology_);
    language_flagged_.assign(topology_.size(), 0);
  }
  open_status_obligations(initial, enabled, 0, nullptr, {});
  boundaries_.push_back(snapshot(*prev_eval_));
}

TrialMonitor::~TrialMonitor() = default;

std::shared_ptr<TrialMonitor::Clock> TrialMonitor::clock_at(std::size_t config_index,
                                                            const EnabledSet& enabled) {
  if (latest_clock_ && latest_clock_index_ == config_index) return latest_clock_;
  latest_clock_ = std::make_shared<Clock>(enabled);
  latest_clock_index_ = config_index;
  clocks_.push_back(latest_clock_);
  return latest_clock_;
}

void TrialMonitor::violation(Check check, std::size_t step, std::optional<NodeId> node,
                             std::string detail) {
  ++summary_.violation_counts[static_cast<int>(check)];
  if (summary_.violations.size() < kKeptViolations) {
    summary_.violations.push_back({check, step, node, std::move(detail)});
  }
}

void TrialMonitor::note_level(Level reached, std::size_t round) {
  const std::size_t limits[] = {bounds_.a1, bounds_.a2, bounds_.a3, bounds_.a4, bounds_.al};
  for (int l = 1; l <= static_cast<int>(reached); ++l) {
    auto& slot = summary_.rounds_to[l - 1];
    if (slot) continue;
    slot = round;
    if (round > limits[l - 1]) {
      violation(check_for(l), steps_, std::nullopt,
                std::string(to_string(static_cast<Level>(l))) + " reached in round " +
                    std::to_string(round) + " > " + std::to_string(limits[l - 1]));
    }
  }
}

TrialMonitor::BoundarySnapshot TrialMonitor::snapshot(const AttractorEvaluator& ev) const {
  BoundarySnapshot s{};
  const PredicateEvaluator& p = ev.predicates();
  for (NodeId u = 0; u < topology_.size(); ++u) {
    if (!p.influential(u)) continue;
    const bool pp = p.power_parent(u);
    if (p.pic(u)) s.value_pic += 1 + (pp ? 1 : 0);
    if (p.un_regular(u)) s.value_pir += 1 + (pp ? 1 : 0);
  }
  s.in_a1 = ev.a1();
  s.in_a2 = ev.a2();
  s.r1_count = r1_count_;
  return s;
}

void TrialMonitor::open_status_obligations(const Configuration& c, const EnabledSet& enabled,
                                           std::size_t config_index, const Configuration* prev,
                                           std::span<const Move> moves) {
  const bool in_a1 = static_cast<int>(level_) >= 1;
  const bool prev_a1 = prev && static_cast<int>(prev_level_) >= 1;
  for (NodeId u = 0; u < c.size(); ++u) {
    const Status s = c[u].status;
    const bool changed = !prev || (*prev)[u].status != s;
    if (s == Status::StrongE && changed) {
      obligations_.push_back({Obligation::Kind::StrongE, u, clock_at(config_index, enabled), 2,
                              config_index, in_a1 && !c[u].parent});
    } else if (s == Status::WeakE && changed) {
      obligations_.push_back({Obligation::Kind::WeakE, u, clock_at(config_index, enabled), 2,
                              config_index, in_a1});
    } else if (s == Status::Power && in_a1) {
      const bool executed_r1 = std::any_of(moves.begin(), moves.end(), [u](const Move& m) {
        return m.node == u && m.rule.name == RuleName::R1;
      });
      if (changed || !prev_a1 || executed_r1) {
        obligations_.push_back({Obligation::Kind::Power, u, clock_at(config_index, enabled), 4,
                                config_index, true});
      }
    }
  }
}

void TrialMonitor::recovery_violation(const Obligation& o, std::size_t step,
                                      const std::string& detail) {
  switch (o.kind) {
    case Obligation::Kind::StrongE:
      violation(Check::StrongERecovery, step, o.node, detail);
      if (o.from_a1) violation(Check::StrongERecoveryFromA1, step, o.node, detail);
      break;
    case Obligation::Kind::WeakE:
      violation(Check::WeakERecovery, step, o.node, detail);
      if (o.from_a1) violation(Check::WeakERecoveryFromA1, step, o.node, detail);
      break;
    case Obligation::Kind::Power:
      violation(Check::PowerResolution, step, o.node, detail);
      break;
  }
}

void TrialMonitor::advance_obligations(const StepEvent& e) {
  // Resolution first: a step that resolves an obligation counts even if it
  // also closes the last allowed round.
  auto resolved = [&](const Obligation& o) {
    const Status before = e.before[o.node].status;
    const Status after = e.after[o.node].status;
    switch (o.kind) {
      case Obligation::Kind::StrongE:
        if (after == Status::StrongE) return false;
        if (after != (topology_.is_root(o.node) ? Status::Working : Status::Idle)) {
          recovery_violation(o, e.index, "left StrongE to " + std::string(to_string(after)));
        }
        return true;
      case Obligation::Kind::WeakE:
        if (after == Status::WeakE) return false;
        if (after != Status::Idle && after != Status::StrongE) {
          recovery_violation(o, e.index, "left WeakE to " + std::string(to_string(after)));
        }
        return true;
      case Obligation::Kind::Power:
        if (after != before) return true;
        return std::any_of(e.moves.begin(), e.moves.end(), [&](const Move& m) {
          return m.node == o.node && m.rule.name == RuleName::R1;
        });
    }
    return true;
  };
  std::erase_if(obligations_, resolved);

  // Advance every live clock once.
  std::erase_if(clocks_, [](const std::shared_ptr<Clock>& c) { return c.use_count() == 1; });
  for (auto& c : clocks_) c->tracker.advance(e.moves, e.enabled_after);

  std::erase_if(obligations_, [&](const Obligation& o) {
    if (o.clock->tracker.completed() < o.limit) return false;
    std::ostringstream detail;
    detail << "status unchanged for " << o.limit << " rounds since configuration "
           << o.opened_at;
    recovery_violation(o, e.index, detail.str());
    return true;
  });
}

void TrialMonitor::check_step_lemmas(const StepEvent& e, const AttractorEvaluator& before,
                                     const AttractorEvaluator& after) {
  const int l = topology_.diameter() + 1;
  const NodeId r = topology_.root();
  const Move* root_move = nullptr;
  for (const Move& m : e.moves) {
    if (m.node == r) root_move = &m;
  }
  auto fail = [&](const std::string& what) { violation(Check::StepLemma, e.index, std::nullopt, what); };

  // Past the root eccentricity A4(k,l) contains EndLastPhase configurations
  // where R1 is legitimate; those are held to the A5 condition instead.
  const int k_max = std::min(l - 1, topology_.root_eccentricity());
  for (int k = 1; k <= l; ++k) {
    if (!before.a4kl(k, l)) continue;
    const std::string tag = "A4(" + std::to_string(k) + "," + std::to_string(l) + ")";
    if (k > k_max) {
      if (!root_move) {
        if (!after.a4kl(k, l)) fail("no root move from " + tag + " left it");
      } else if (root_move->rule.name == RuleName::R1 && !before.a5(l)) {
        fail("R1 from " + tag + " outside A5");
      }
      continue;
    }
    if (!root_move) {
      if (!after.a4kl(k, l)) fail("no root move from " + tag + " left it");
    } else if (root_move->rule.name != RuleName::R2) {
      fail("root move from " + tag + " is " + std::string(to_string(root_move->rule.name)));
    } else if (!after.a4kl(k + 1, l)) {
      fail("R2 from " + tag + " missed the next phase set");
    }
  }
  if (before.a4_next(l)) {
    if (!root_move || root_move->rule.name != RuleName::R1) {
      if (!after.a4_next(l)) fail("step from A4(l+1,l) without R1 left it");
    } else if (!before.a5(l)) {
      fail("R1 from A4(l+1,l) outside A5");
    }
  }

  // #r_color never drops on A4 steps without R1.
  if (!root_move || root_move->rule.name != RuleName::R1) {
    const std::uint8_t rc = e.before[r].color;
    std::size_t b = 0, a = 0;
    for (NodeId u = 0; u < e.before.size(); ++u) {
      b += e.before[u].color == rc;
      a += e.after[u].color == rc;
    }
    if (a < b) violation(Check::RColorMonotone, e.index, std::nullopt, "#r_color decreased");
  }
}

void TrialMonitor::observe(const StepEvent& e) {
  steps_ = e.index + 1;
  summary_.steps = steps_;
  summary_.rounds = e.round;

  auto after_config = std::make_unique<Configuration>(e.after);
  auto after_eval = std::make_unique<AttractorEvaluator>(topology_, *after_config);
  const Level before_level = level_;
  const Level after_level = after_eval->level();
  const NodeId r = topology_.root();

  const Move* root_move = nullptr;
  for (const Move& m : e.moves) {
    if (m.node == r) root_move = &m;
  }
  const bool r1 = root_move && root_move->rule.name == RuleName::R1;

  // Closure of every level once reached.
  if (static_cast<int>(after_level) < static_cast<int>(best_level_)) {
    violation(Check::AttractorClosure, e.index, std::nullopt,
              "fell from " + std::string(to_string(best_level_)) + " to " +
                  std::string(to_string(after_level)));
  }

  // Root activity inside A4: the gap is the round index of the root's move.
  if (root_clock_ && root_move) {
    const std::size_t gap = root_clock_->tracker.completed() + 1;
    summary_.max_root_gap = std::max(summary_.max_root_gap, gap);
    root_clock_.reset();
    root_gap_reported_ = false;
  }

  // Status obligations: resolve, advance clocks, expire.
  advance_obligations(e);

  if (root_clock_ && !root_gap_reported_ &&
      root_clock_->tracker.completed() >= bounds_.root_gap) {
    root_gap_reported_ = true;
    violation(Check::RootGap, e.index, r,
              "root idle for " + std::to_string(root_clock_->tracker.completed()) + " rounds");
  }

  // Legitimate regime: step lemmas, constructions, languages.
  if (before_level == Level::Al) check_step_lemmas(e, *prev_eval_, *after_eval);
  else if (static_cast<int>(before_level) >= 4 && !r1) {
    const std::uint8_t rc = e.before[r].color;
    std::size_t b = 0, a = 0;
    for (NodeId u = 0; u < e.before.size(); ++u) {
      b += e.before[u].color == rc;
      a += e.after[u].color == rc;
    }
    if (a < b) violation(Check::RColorMonotone, e.index, std::nullopt, "#r_color decreased");
  }

  if (al_reached_) {
    language_->feed(e.moves);
    const std::size_t rej = language_->rejections();
    if (rej > language_reported_) {
      for (NodeId u = 0; u < topology_.size(); ++u) {
        if (!language_->accepted(u) && !language_flagged_[u]) {
          language_flagged_[u] = 1;
          violation(Check::MoveLanguage, e.index, u, "rule sequence left the move language");
        }
      }
      language_reported_ = rej;
    }
    if (r1) {
      if (construction_clock_) {
        const auto& t = construction_clock_->tracker;
        const std::size_t rounds = t.completed() + (t.at_boundary() ? 0 : 1);
        summary_.construction_rounds.push_back(rounds);
        if (rounds > bounds_.construction) {
          violation(Check::ConstructionRounds, e.index, std::nullopt,
                    "construction took " + std::to_string(rounds) + " rounds");
        }
        for (NodeId u = 0; u < topology_.size(); ++u) {
          summary_.max_moves_per_process =
              std::max(summary_.max_moves_per_process, construction_moves_[u]);
          if (construction_moves_[u] > bounds_.moves) {
            violation(Check::ConstructionMoves, e.index, u,
                      std::to_string(construction_moves_[u]) + " moves in one construction");
          }
        }
      }
      const BfsCheck bfs = bfs_tree_check(e.before, topology_);
      if (!bfs.ok) {
        violation(Check::BfsAtConstruction, e.index, bfs.violations.front(),
                  std::to_string(bfs.violations.size()) + " processes off the BFS tree");
      }
      ++summary_.constructions_after_al;
      construction_clock_ = std::make_shared<Clock>(e.enabled_before);
      construction_moves_.assign(topology_.size(), 0);
    }
    if (construction_clock_) {
      construction_clock_->tracker.advance(e.moves, e.enabled_after);
      for (const Move& m : e.moves) ++construction_moves_[m.node];
    }
  }

  if (r1) ++r1_count_;

  // Level bookkeeping for the reached configuration.
  prev_level_ = level_;
  level_ = after_level;
  if (static_cast<int>(after_level) > static_cast<int>(best_level_)) best_level_ = after_level;
  note_level(after_level, e.round);
  const std::size_t config_index = e.index + 1;
  if (static_cast<int>(after_level) >= 4 && !root_clock_) {
    root_clock_ = clock_at(config_index, e.enabled_after);
  }
  if (after_level == Level::Al && !al_reached_) {
    al_reached_ = true;
    language_ = std::make_unique<LanguageMonitor>(topology_);
    language_flagged_.assign(topology_.size(), 0);
  }
  open_status_obligations(e.after, e.enabled_after, config_index, prev_config_.get(), e.moves);

  // Potential windows over four whole rounds.
  if (e.closes_round) {
    boundaries_.push_back(snapshot(*after_eval));
    if (boundaries_.size() > 5) boundaries_.erase(boundaries_.begin());
    if (boundaries_.size() == 5) {
      const BoundarySnapshot& from = boundaries_.front();
      const BoundarySnapshot& to = boundaries_.back();
      if (from.in_a1 && from.value_pic > 0 && from.r1_count == to.r1_count &&
          to.value_pic >= from.value_pic) {
        violation(Check::PicPotential, e.index, std::nullopt,
                  "ValPIC " + std::to_string(from.value_pic) + " -> " +
                      std::to_string(to.value_pic) + " over 4 rounds");
      }
      if (from.in_a2 && from.value_pir > 0 && to.value_pir >= from.value_pir) {
        violation(Check::PirPotential, e.index, std::nullopt,
                  "ValPIR " + std::to_string(from.value_pir) + " -> " +
                      std::to_string(to.value_pir) + " over 4 rounds");
      }
    }
  }

  prev_eval_ = std::move(after_eval);
  prev_config_ = std::move(after_config);
}

TrialSummary TrialMonitor::finish() {
  if (root_clock_) {
    summary_.max_root_gap = std::max(summary_.max_root_gap, root_clock_->tracker.completed());
  }
  return summary_;
}

}  // namespace stabfs
