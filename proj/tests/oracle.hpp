#ifndef STABFS_TESTS_ORACLE_HPP_
#define STABFS_TESTS_ORACLE_HPP_

// Straightforward reference evaluator used as a test oracle. It is written
// directly from the predicate and rule formulas without sharing code with the
// library: fixed points by Kleene iteration, neighbor scans by brute force.

#include <algorithm>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "stabfs/types.hpp"
#include "stabfs/topology.hpp"

namespace oracle {

using stabfs::Configuration;
using stabfs::NodeId;
using stabfs::Phase;
using stabfs::ProcessState;
using stabfs::Status;
using stabfs::Topology;

struct Ref {
  const Topology& t;
  const Configuration& c;

  std::vector<bool> legal, power_parent;

  Ref(const Topology& topo, const Configuration& config) : t(topo), c(config) {
    const std::size_t n = c.size();
    legal.assign(n, false);
    for (bool changed = true; changed;) {
      changed = false;
      for (NodeId u = 0; u < n; ++u) {
        bool v = (u == t.root() && S(u) != Status::StrongE) ||
                 (u != t.root() && P(u) && legal[*P(u)] && !faulty(u));
        if (v && !legal[u]) { legal[u] = true; changed = true; }
      }
    }
    power_parent.assign(n, false);
    for (bool changed = true; changed;) {
      changed = false;
      for (NodeId u = 0; u < n; ++u) {
        bool v = false;
        if (P(u) && S(u) == Status::Idle) {
          const NodeId p = *P(u);
          v = (S(p) == Status::Working && ph(u) != ph(p)) || (power_parent[p] && ph(u) == ph(p));
        }
        if (v && !power_parent[u]) { power_parent[u] = true; changed = true; }
      }
    }
  }

  std::optional<NodeId> P(NodeId u) const { return c[u].parent; }
  Status S(NodeId u) const { return c[u].status; }
  Phase ph(NodeId u) const { return c[u].phase; }
  int C(NodeId u) const { return c[u].color; }
  bool root(NodeId u) const { return u == t.root(); }
  static bool err(Status s) { return s == Status::WeakE || s == Status::StrongE; }

  std::vector<NodeId> nbrs(NodeId u) const {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < c.size(); ++v) {
      if (v != u && t.adjacent(u, v)) out.push_back(v);
    }
    return out;
  }
  std::vector<NodeId> children(NodeId u) const {
    std::vector<NodeId> out;
    for (NodeId v : nbrs(u)) {
      if (P(v) && *P(v) == u) out.push_back(v);
    }
    return out;
  }
  bool childless(NodeId u) const { return children(u).empty(); }

  bool strong_conflict(NodeId u) const {
    if (S(u) == Status::StrongE) return false;
    auto closed = nbrs(u);
    closed.push_back(u);
    for (NodeId v : closed) {
      for (NodeId w : closed) {
        if (v != w && S(v) == Status::Power && S(w) == Status::Power && C(v) != C(w)) return true;
      }
    }
    return false;
  }
  bool conflict(NodeId u) const {
    if (!root(u)) {
      if (!P(u)) return false;
      for (NodeId v : nbrs(u)) {
        if (S(v) == Status::Power && C(v) != C(u)) return true;
      }
      return false;
    }
    if (S(u) == Status::StrongE) return false;
    for (NodeId v : nbrs(u)) {
      if (S(v) == Status::Power && (C(v) != C(u) || childless(u))) return true;
    }
    return false;
  }
  bool detached(NodeId u) const {
    return childless(u) && (!P(u) || root(u)) && S(u) != Status::Power;
  }
  bool strong_e_ready(NodeId u) const {
    if (S(u) != Status::StrongE) return false;
    for (NodeId v : nbrs(u)) {
      if (S(v) == Status::Power) return false;
    }
    return true;
  }
  bool power_faulty(NodeId u) const {
    if (S(u) != Status::Power) return false;
    for (NodeId v : nbrs(u)) {
      if (S(v) == Status::StrongE) return true;
    }
    return false;
  }
  bool faulty(NodeId u) const {
    if (root(u) || !P(u)) return false;
    const NodeId p = *P(u);
    if (err(S(p))) return false;
    return err(S(u)) || C(u) != C(p) || (S(p) != Status::Working && S(u) != Status::Idle) ||
           (S(p) == S(u) && ph(u) != ph(p)) || (S(u) == Status::Power && ph(u) != ph(p)) ||
           (S(p) == Status::Power && (!childless(u) || ph(u) != ph(p)));
  }
  bool illegal_root(NodeId u) const { return !root(u) && !P(u) && !detached(u); }
  bool illegal_live_root(NodeId u) const { return illegal_root(u) && !err(S(u)); }
  bool illegal_child(NodeId u) const { return !root(u) && P(u) && err(S(*P(u))); }
  bool isolated(NodeId u) const {
    return S(u) == Status::WeakE || S(u) == Status::Working || strong_e_ready(u);
  }
  bool ok(NodeId u) const {
    return !strong_conflict(u) && !conflict(u) && !power_faulty(u) && !faulty(u) &&
           !illegal_root(u) && !illegal_child(u);
  }
  bool quiet(NodeId u) const {
    for (NodeId v : children(u)) {
      if (S(v) != Status::Idle || ph(v) != ph(u)) return false;
    }
    return true;
  }
  bool end_first_phase(NodeId u) const {
    if (S(u) != Status::Power || !quiet(u)) return false;
    for (NodeId v : nbrs(u)) {
      if (C(v) != C(u)) return false;
    }
    return true;
  }
  bool end_phase(NodeId u) const { return S(u) == Status::Working && quiet(u); }
  bool end_last_phase(NodeId u) const {
    return childless(u) && (end_first_phase(u) || end_phase(u));
  }
  bool end_intermediate_phase(NodeId u) const {
    return !childless(u) && (end_first_phase(u) || end_phase(u));
  }
  bool connection(NodeId u, NodeId v) const {
    return detached(u) && (isolated(u) || S(u) == Status::Idle) && t.adjacent(u, v) &&
           C(v) != C(u) && S(v) == Status::Power;
  }
  bool new_phase(NodeId u) const {
    return P(u) && quiet(u) && S(u) == Status::Idle && ph(u) != ph(*P(u));
  }
  bool no_strong_e_nbr(NodeId u) const {
    for (NodeId v : nbrs(u)) {
      if (S(v) == Status::StrongE) return false;
    }
    return true;
  }

  bool in_legal_tree(NodeId u) const { return legal[u]; }
  bool un_regular(NodeId u) const { return !detached(u) && !legal[u]; }
  bool influential(NodeId u) const { return S(u) == Status::Power || power_parent[u]; }
  bool inside_legal_tree(NodeId u) const {
    return legal[u] && S(u) != Status::Power && !childless(u);
  }
  bool un_safe(NodeId u) const {
    if (!inside_legal_tree(u)) return false;
    for (NodeId v : nbrs(u)) {
      if (C(v) != C(u) && influential(v)) return true;
    }
    return false;
  }
  bool pic(NodeId u) const { return influential(u) && C(u) != C(t.root()); }
  bool pir(NodeId u) const { return influential(u) && un_regular(u); }
  bool correct(NodeId u) const {
    if (un_regular(u)) return false;
    if (!legal[u] && S(u) != Status::Idle) return false;
    if (root(u)) return true;
    const auto ts = c[u].tree_parent;
    return ts && t.dist(*ts) < t.dist(u);
  }

  /// Names of every satisfied guard at u; R3 as "R3>v" per candidate.
  std::set<std::string> guards(NodeId u) const {
    std::set<std::string> g;
    if (root(u)) {
      if (!conflict(u) && power_faulty(u) && quiet(u)) g.insert("RC1");
      if (detached(u) && strong_e_ready(u)) g.insert("RC2");
      if (conflict(u)) g.insert("RC3");
      if (ok(u) && end_last_phase(u) && no_strong_e_nbr(u)) g.insert("R1");
      if (ok(u) && end_intermediate_phase(u)) g.insert("R2");
      return g;
    }
    if (strong_conflict(u)) g.insert("RC4");
    if (!strong_conflict(u) && (conflict(u) || faulty(u) || power_faulty(u) ||
                                illegal_live_root(u) || illegal_child(u))) {
      g.insert("RC5");
    }
    if (detached(u) && isolated(u)) {
      bool calm = true;
      for (NodeId v : nbrs(u)) {
        if (!(C(v) == C(u) || S(v) != Status::Power)) calm = false;
      }
      if (calm) g.insert("RC6");
    }
    if (ok(u)) {
      for (NodeId v : nbrs(u)) {
        if (connection(u, v)) g.insert("R3>" + std::to_string(v));
      }
      if (new_phase(u) && !childless(u)) g.insert("R4");
      if (new_phase(u) && childless(u) && no_strong_e_nbr(u)) g.insert("R5");
      if (end_intermediate_phase(u)) g.insert("R6");
      if (P(u) && end_last_phase(u)) g.insert("R7");
    }
    return g;
  }

  /// New local state of u after `rule` ("R3>v" carries the target).
  ProcessState act(NodeId u, const std::string& rule) const {
    ProcessState s = c[u];
    if (rule == "RC1" || rule == "RC2") s.status = Status::Working;
    else if (rule == "RC3") s.status = Status::StrongE;
    else if (rule == "RC4") { s.status = Status::StrongE; s.parent.reset(); }
    else if (rule == "RC5") { s.status = Status::WeakE; s.parent.reset(); }
    else if (rule == "RC6") s.status = Status::Idle;
    else if (rule == "R1") { s.color = 1 - s.color; s.status = Status::Power; }
    else if (rule == "R2") { s.phase = s.phase == Phase::A ? Phase::B : Phase::A; s.status = Status::Working; }
    else if (rule.rfind("R3>", 0) == 0) {
      const NodeId v = static_cast<NodeId>(std::stoul(rule.substr(3)));
      s.color = c[v].color; s.phase = c[v].phase; s.status = Status::Idle;
      s.parent = v; s.tree_parent = v;
    }
    else if (rule == "R4") { s.phase = c[*s.parent].phase; s.status = Status::Working; }
    else if (rule == "R5") { s.phase = c[*s.parent].phase; s.status = Status::Power; }
    else if (rule == "R6") s.status = Status::Idle;
    else if (rule == "R7") { s.status = Status::Idle; s.parent.reset(); }
    return s;
  }
};

/// Attractor membership written from the definitions.
struct Attractors {
  const Topology& t;
  const Configuration& c;
  Ref r;
  Attractors(const Topology& topo, const Configuration& config) : t(topo), c(config), r(topo, config) {}

  std::size_t n() const { return c.size(); }
  bool same_color(NodeId u) const { return c[u].color == c[t.root()].color; }
  bool all(auto pred) const {
    for (NodeId u = 0; u < n(); ++u) {
      if (!pred(u)) return false;
    }
    return true;
  }

  bool a1() const { return all([&](NodeId u) { return !r.faulty(u) && !r.illegal_live_root(u); }); }
  bool a2() const { return a1() && all([&](NodeId u) { return !r.un_safe(u); }); }
  bool a3() const {
    return a2() && all([&](NodeId u) { return !r.influential(u) || r.in_legal_tree(u); });
  }
  bool a4() const { return a3() && all([&](NodeId u) { return c[u].status != Status::StrongE; }); }
  bool a5(int l) const {
    return a4() && all([&](NodeId u) {
             const int d = t.dist(u);
             return (d > l || same_color(u)) && (d > l - 1 || r.correct(u));
           });
  }
  bool nbrs_same(NodeId u) const {
    for (NodeId v : r.nbrs(u)) {
      if (!same_color(v)) return false;
    }
    return true;
  }
  bool a4kl(int k, int l) const {
    return a4() && all([&](NodeId u) {
             const int d = t.dist(u);
             const Status s = c[u].status;
             if (d < l && !r.correct(u)) return false;
             if (d <= k - 1 && !same_color(u)) return false;
             if (k < d && d <= l && same_color(u)) return false;
             if (d == k - 1 && !(nbrs_same(u) || (r.influential(u) &&
                                                  (r.childless(u) || s == Status::Power)))) {
               return false;
             }
             if (d == k && !(!same_color(u) ||
                             (r.in_legal_tree(u) && !r.influential(u) && s == Status::Idle &&
                              r.childless(u) && r.correct(u)))) {
               return false;
             }
             if (k <= d && !(s == Status::Idle || s == Status::Working || s == Status::WeakE)) {
               return false;
             }
             return true;
           });
  }
  bool a4_next(int l) const {
    return a4() && all([&](NodeId u) {
             const int d = t.dist(u);
             if (d <= l && !(r.correct(u) && same_color(u))) return false;
             if (d == l && !nbrs_same(u) &&
                 !(r.influential(u) && (r.childless(u) || c[u].status == Status::Power))) {
               return false;
             }
             return true;
           });
  }
  bool al() const {
    const int l = t.diameter() + 1;
    if (a5(l) || a4_next(l)) return true;
    for (int k = 1; k <= l; ++k) {
      if (a4kl(k, l)) return true;
    }
    return false;
  }
};

/// Round boundaries by the definition: the round starting at configuration
/// i ends at the first j such that every process enabled in c_i moved in a
/// step of [i, j) or is disabled in some c_m with i < m <= j.
inline std::vector<std::size_t> round_boundaries(
    const std::vector<std::vector<bool>>& enabled,       // per configuration
    const std::vector<std::vector<NodeId>>& movers) {    // per step
  std::vector<std::size_t> out;
  std::size_t start = 0;
  const std::size_t steps = movers.size();
  while (start < steps) {
    std::size_t end = start;
    bool found = false;
    for (std::size_t j = start + 1; j <= steps && !found; ++j) {
      bool all_done = true;
      for (NodeId u = 0; u < enabled[start].size(); ++u) {
        if (!enabled[start][u]) continue;
        bool done = false;
        for (std::size_t m = start; m < j && !done; ++m) {
          done = std::find(movers[m].begin(), movers[m].end(), u) != movers[m].end() ||
                 !enabled[m + 1][u];
        }
        if (!done) { all_done = false; break; }
      }
      if (all_done) { end = j; found = true; }
    }
    if (!found) break;
    out.push_back(end);
    start = end;
  }
  return out;
}

/// Language membership through std::regex: the projected sequence must be a
/// factor of some word of the language, so canonical prefixes and suffixes
/// reaching every automaton state are tried around it.
inline bool accepts(bool root, const std::vector<std::string>& rules) {
  std::string word;
  for (const auto& r : rules) {
    if (root) word += r == "R1" ? 'x' : r == "R2" ? 'y' : 'z';
    else word += r == "R3" ? 'a' : r == "R5" ? 'b' : r == "R6" ? 'c' : r == "R4" ? 'd' : r == "R7" ? 'e' : 'z';
  }
  if (root) {
    static const std::regex re("(xy*)*");
    for (const char* pre : {"", "x"}) {
      if (std::regex_match(pre + word, re)) return true;
    }
    return false;
  }
  static const std::regex re("(ab(cd)*e)*");
  for (const char* pre : {"", "a", "ab", "abc"}) {
    for (const char* post : {"", "be", "e", "de"}) {
      if (std::regex_match(pre + word + post, re)) return true;
    }
  }
  return false;
}

}  // namespace oracle

#endif  // STABFS_TESTS_ORACLE_HPP_
