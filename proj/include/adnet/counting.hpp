// Anonymity inference and counting from history-tree views.
//
// The input is a view of the history tree of a (virtual) network: the anchor
// is the observer's own node, the observer's class is the unique leader, and
// every node carries its complete red in-edge profile. Anonymities a(v) are
// inferred with exact integer rules:
//
//   R1  the anchor's ancestor chain is the leader's class: a = 1, and the
//       chain cannot branch, so chain nodes (except the anchor) have
//       complete children.
//   R2  children of a children-complete node partition it: sums propagate
//       both ways, and a known a(v) bounds partial sums.
//   R3  a children-complete node u with known children determines the link
//       count Link(u, w) = sum over children c of a(c) * mult(c, w) for every
//       class w of its level; in a virtual network every process receives
//       exactly 2 messages from its own class, so Link(v, v) = 2 a(v) and
//       every child carries a multiplicity-2 red edge to its parent's class.
//   R4  the same link count, read from the other side, constrains the
//       children of w: residuals solve single unknowns, and any negative or
//       unexplainable residual is a contradiction.
//   R5  bounded exact enumeration: the positive integer solutions of the
//       remaining per-node / per-level linear systems; components forced in
//       every solution are assigned, an empty solution set is a
//       contradiction.
//
// count_from_view runs these rules under a candidate hypothesis n = k for
// every k with 3k <= view depth. If the true count is k, every class of
// level s is visible in the view for s <= depth-k+1 (a class influences the
// observer within k-1 rounds through a connected network), so granting
// children-completeness on levels <= depth-k and level sums = k on levels
// <= depth-k+1 is sound; a contradiction then refutes the candidate. The
// answer is the unique surviving candidate that is complete (all anonymities
// on granted levels known) and certified by a cut certificate.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "adnet/history_tree.hpp"

namespace adnet {

struct Inference {
  std::vector<std::optional<std::int64_t>> a;  // anonymity per view node
  std::vector<char> cc;                        // children complete per node
  bool contradiction = false;
  std::string reason;

  bool known(int v) const { return a[v].has_value(); }
};

struct CountResult {
  enum class Kind { Unknown, Count, Multiset, Malformed };
  Kind kind = Kind::Unknown;
  std::int64_t count = 0;                          // Count and Multiset
  std::map<std::int64_t, std::int64_t> values;     // Multiset: value -> count
  std::string note;

  static CountResult unknown(std::string why) {
    CountResult r;
    r.kind = Kind::Unknown;
    r.note = std::move(why);
    return r;
  }
  static CountResult malformed(std::string why) {
    CountResult r;
    r.kind = Kind::Malformed;
    r.note = std::move(why);
    return r;
  }
  bool is_count() const { return kind == Kind::Count || kind == Kind::Multiset; }
};

namespace detail {

// One linear equation over unknown nodes: sum coef[v] * a(v) = rhs.
struct LinEq {
  std::vector<std::pair<int, std::int64_t>> coef;
  std::int64_t rhs = 0;
};

class RuleEngine {
 public:
  // grant_cc_max_level: grant children-completeness to every node at level
  // <= this (use kNoGrant for none). hypothesis: assumed total count, enables
  // level-sum reasoning up to sum_max_level.
  static constexpr int kNoGrant = -1000000;

  RuleEngine(const HistoryTree& t, int anchor, int grant_cc_max_level,
             std::optional<std::int64_t> hypothesis, int sum_max_level,
             std::uint64_t order_seed = 0)
      : t_(t),
        anchor_(anchor),
        grant_max_(grant_cc_max_level),
        hyp_(hypothesis),
        sum_max_(sum_max_level),
        order_seed_(order_seed) {
    depth_ = t_.depth();
    children_ = t_.children_lists();
    for (int l = 0; l <= depth_; ++l) levels_.push_back(t_.level_nodes(l));
    inf_.a.assign(t_.nodes.size(), std::nullopt);
    inf_.cc.assign(t_.nodes.size(), 0);
    for (int v = anchor_; v != -1; v = t_.nodes[v].parent) chain_.push_back(v);
  }

  Inference run() {
    // R1: the observer is alone in its class on every level it traversed.
    for (int v : chain_) {
      if (v != 0) set_a(v, 1, "leader chain");
      if (v != anchor_) set_cc(v);
    }
    if (hyp_) set_a(0, *hyp_, "hypothesized total");
    for (int v = 0; v < int(t_.nodes.size()); ++v)
      if (t_.nodes[v].level <= grant_max_) set_cc(v);

    // Fixpoint: cheap propagation first, enumeration once it stalls.
    while (!inf_.contradiction) {
      changed_ = false;
      sweep_cheap();
      if (!changed_ && !inf_.contradiction) sweep_enumerate();
      if (!changed_) break;
    }
    return inf_;
  }

 private:
  void fail(const std::string& why) {
    if (!inf_.contradiction) {
      inf_.contradiction = true;
      inf_.reason = why;
    }
  }

  void set_a(int v, std::int64_t val, const char* why) {
    if (val < 1) {
      fail(std::string(why) + ": anonymity below 1");
      return;
    }
    if (inf_.a[v]) {
      if (*inf_.a[v] != val) fail(std::string(why) + ": conflicting anonymity");
      return;
    }
    inf_.a[v] = val;
    changed_ = true;
  }

  void set_cc(int v) {
    if (!inf_.cc[v]) {
      inf_.cc[v] = 1;
      changed_ = true;
    }
  }

  bool complete_known(int u) const {
    if (!inf_.cc[u]) return false;
    for (int c : children_[u])
      if (!inf_.known(c)) return false;
    return true;
  }

  std::int64_t link_from(int u, int w) const {
    // Messages exchanged between P_u and P_w in the round below level(u),
    // computed from u's side (valid when complete_known(u)).
    std::int64_t s = 0;
    for (int c : children_[u]) s += *inf_.a[c] * t_.red_mult(c, w);
    return s;
  }

  void sweep_cheap() {
    // Visit order is irrelevant to the fixpoint (rules only add facts); a
    // nonzero order_seed shuffles it to let tests demonstrate that.
    std::vector<int> order(t_.nodes.size());
    for (int i = 0; i < int(order.size()); ++i) order[i] = i;
    if (order_seed_) {
      std::mt19937_64 rng(order_seed_);
      std::shuffle(order.begin(), order.end(), rng);
    }
    for (int v : order) {
      rule_parent_sum(v);
      if (inf_.contradiction) return;
    }
    for (int s = 0; s <= depth_ - 1; ++s) {
      for (int u : levels_[s]) {
        if (!complete_known(u)) continue;
        for (int w : levels_[s]) {
          rule_link(u, w);
          if (inf_.contradiction) return;
        }
      }
    }
    if (hyp_) {
      for (int s = 0; s <= std::min(sum_max_, depth_); ++s) {
        rule_level_sum(s);
        if (inf_.contradiction) return;
      }
    }
  }

  // R2 / R5 solve-last around one parent node.
  void rule_parent_sum(int v) {
    const auto& ch = children_[v];
    if (v != 0 && t_.nodes[v].level >= depth_) return;  // leaves have no visible children
    std::int64_t known_sum = 0;
    std::vector<int> unknown;
    for (int c : ch) {
      if (inf_.known(c))
        known_sum += *inf_.a[c];
      else
        unknown.push_back(c);
    }
    if (inf_.known(v)) {
      std::int64_t av = *inf_.a[v];
      // Visible children are disjoint subclasses: each unknown is >= 1 and
      // hidden children only add more.
      if (known_sum + std::int64_t(unknown.size()) > av) {
        fail("children exceed parent anonymity");
        return;
      }
      if (inf_.cc[v]) {
        std::int64_t rest = av - known_sum;
        if (unknown.empty()) {
          if (rest != 0) fail("children of a complete class do not sum up");
        } else if (unknown.size() == 1) {
          set_a(unknown[0], rest, "parent sum");
        }
      } else if (unknown.empty() && known_sum == av) {
        // No room for hidden children: the visible ones are all of them.
        set_cc(v);
      }
    } else if (inf_.cc[v] && unknown.empty() && !ch.empty()) {
      set_a(v, known_sum, "sum of children");
    }
  }

  // R3+R4 for the ordered class pair (u, w) on one level; u is
  // children-complete with known children.
  void rule_link(int u, int w) {
    std::int64_t link = link_from(u, w);
    std::int64_t known_sum = 0;
    std::vector<int> unknown;
    for (int d : children_[w]) {
      std::int64_t m = t_.red_mult(d, u);
      if (m == 0) continue;
      if (inf_.known(d))
        known_sum += *inf_.a[d] * m;
      else
        unknown.push_back(d);
    }
    if (known_sum > link) {
      fail("link residual negative");
      return;
    }
    if (!inf_.cc[w]) return;  // hidden children of w could carry the rest
    std::int64_t r = link - known_sum;
    if (unknown.empty()) {
      if (r != 0) fail("messages without a visible source class");
      return;
    }
    std::int64_t min_take = 0;
    for (int d : unknown) min_take += t_.red_mult(d, u);
    if (min_take > r) {
      fail("link residual too small for remaining classes");
      return;
    }
    if (unknown.size() == 1) {
      std::int64_t m = t_.red_mult(unknown[0], u);
      if (r % m != 0) {
        fail("link residual not divisible");
        return;
      }
      set_a(unknown[0], r / m, "link residual");
    }
  }

  // Level-wide sum under the hypothesis: the view shows all of level s.
  void rule_level_sum(int s) {
    std::int64_t known_sum = 0;
    std::vector<int> unknown;
    for (int v : levels_[s]) {
      if (inf_.known(v))
        known_sum += *inf_.a[v];
      else
        unknown.push_back(v);
    }
    std::int64_t total = *hyp_;
    if (known_sum + std::int64_t(unknown.size()) > total) {
      fail("level sum exceeds hypothesized total");
      return;
    }
    if (unknown.empty()) {
      if (known_sum != total) fail("level sum does not match hypothesized total");
      return;
    }
    if (unknown.size() == 1) set_a(unknown[0], total - known_sum, "level sum");
  }

  // Linear equations over a set of same-level unknowns, from complete-known
  // classes one level up (link equations) and from parents with known
  // anonymity (partition equations).
  std::vector<LinEq> equations_for(const std::set<int>& unknowns, int level) {
    std::vector<LinEq> eqs;
    if (level == 0) {
      // Partition equation from the root if its total is known.
      if (inf_.cc[0] && inf_.known(0)) {
        LinEq eq;
        eq.rhs = *inf_.a[0];
        bool ok = true;
        for (int d : children_[0]) {
          if (unknowns.count(d))
            eq.coef.emplace_back(d, 1);
          else if (inf_.known(d))
            eq.rhs -= *inf_.a[d];
          else
            ok = false;
        }
        if (ok && !eq.coef.empty()) eqs.push_back(eq);
      }
      return eqs;
    }
    for (int w : levels_[level - 1]) {
      // Partition equation around w.
      if (inf_.cc[w] && inf_.known(w)) {
        LinEq eq;
        eq.rhs = *inf_.a[w];
        bool ok = true;
        for (int d : children_[w]) {
          if (unknowns.count(d))
            eq.coef.emplace_back(d, 1);
          else if (inf_.known(d))
            eq.rhs -= *inf_.a[d];
          else
            ok = false;
        }
        if (ok && !eq.coef.empty()) eqs.push_back(eq);
      }
      // Link equations (u complete-known, reading w's children).
      if (!inf_.cc[w]) continue;
      for (int u : levels_[level - 1]) {
        if (!complete_known(u)) continue;
        LinEq eq;
        eq.rhs = link_from(u, w);
        bool ok = true;
        for (int d : children_[w]) {
          std::int64_t m = t_.red_mult(d, u);
          if (m == 0) continue;
          if (unknowns.count(d))
            eq.coef.emplace_back(d, m);
          else if (inf_.known(d))
            eq.rhs -= *inf_.a[d] * m;
          else
            ok = false;
        }
        if (ok && !eq.coef.empty()) eqs.push_back(eq);
      }
    }
    return eqs;
  }

  // R5: exact enumeration of positive integer solutions with a fixed total.
  // Assigns components that take the same value in every solution.
  void enumerate(const std::vector<int>& unknowns, std::int64_t total, int level) {
    int m = int(unknowns.size());
    if (m == 0 || m > 9 || total > 40) return;  // keep the search tiny
    if (total < m) {
      fail("total too small for remaining classes");
      return;
    }
    std::set<int> uset(unknowns.begin(), unknowns.end());
    auto eqs = equations_for(uset, level);
    std::vector<std::int64_t> x(m, 0);
    std::vector<std::vector<std::int64_t>> survivors;
    std::function<void(int, std::int64_t)> rec = [&](int i, std::int64_t left) {
      if (int(survivors.size()) > 4000) return;
      if (i == m - 1) {
        x[i] = left;
        for (const auto& eq : eqs) {
          std::int64_t s = 0;
          for (auto [node, c] : eq.coef) {
            auto it = std::find(unknowns.begin(), unknowns.end(), node);
            s += c * x[it - unknowns.begin()];
          }
          if (s != eq.rhs) return;
        }
        survivors.push_back(x);
        return;
      }
      for (std::int64_t v = 1; v + (m - i - 1) <= left; ++v) {
        x[i] = v;
        rec(i + 1, left - v);
      }
    };
    rec(0, total);
    if (survivors.size() > 4000) return;  // search capped: no conclusions
    if (survivors.empty()) {
      fail("no integer solution for class system");
      return;
    }
    for (int i = 0; i < m; ++i) {
      std::int64_t v0 = survivors[0][i];
      bool forced = true;
      for (const auto& s : survivors)
        if (s[i] != v0) {
          forced = false;
          break;
        }
      if (forced) set_a(unknowns[i], v0, "forced by class system");
    }
  }

  void sweep_enumerate() {
    // Per-parent systems (R5 around one node).
    for (int v = 0; v < int(t_.nodes.size()) && !inf_.contradiction; ++v) {
      if (!inf_.cc[v] || !inf_.known(v)) continue;
      std::int64_t known_sum = 0;
      std::vector<int> unknown;
      for (int c : children_[v]) {
        if (inf_.known(c))
          known_sum += *inf_.a[c];
        else
          unknown.push_back(c);
      }
      if (unknown.size() >= 2) {
        enumerate(unknown, *inf_.a[v] - known_sum, t_.nodes[v].level + 1);
        if (changed_ || inf_.contradiction) return;
      }
    }
    // Per-level systems under the hypothesis.
    if (!hyp_) return;
    for (int s = 0; s <= std::min(sum_max_, depth_) && !inf_.contradiction; ++s) {
      std::int64_t known_sum = 0;
      std::vector<int> unknown;
      for (int v : levels_[s]) {
        if (inf_.known(v))
          known_sum += *inf_.a[v];
        else
          unknown.push_back(v);
      }
      if (unknown.size() >= 2) {
        enumerate(unknown, *hyp_ - known_sum, s);
        if (changed_ || inf_.contradiction) return;
      }
    }
  }

  const HistoryTree& t_;
  int anchor_;
  int grant_max_;
  std::optional<std::int64_t> hyp_;
  int sum_max_;
  std::uint64_t order_seed_;
  int depth_ = 0;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<int>> levels_;
  std::vector<int> chain_;
  Inference inf_;
  bool changed_ = false;
};

// Structural requirements on anything claiming to be a view of a virtual
// network's history tree. Returns a reason if violated.
inline std::optional<std::string> view_defect(const HistoryTree& t, int anchor) {
  try {
    t.validate();
  } catch (const std::exception& e) {
    return std::string(e.what());
  }
  int T = t.depth();
  if (anchor < 0 || anchor >= int(t.nodes.size())) return "anchor out of range";
  if (t.nodes[anchor].level != T) return "anchor is not at the deepest level";
  if (t.level_nodes(T).size() != 1) return "deepest level must contain only the anchor";
  int leaders = 0;
  for (int v : t.level_nodes(0))
    if (t.nodes[v].input == kLeaderInput) ++leaders;
  if (leaders != 1) return "view must contain exactly one leader class";
  int v = anchor;
  while (t.nodes[v].level > 0) v = t.nodes[v].parent;
  if (t.nodes[v].input != kLeaderInput) return "anchor is not rooted in the leader class";
  for (int i = 1; i < int(t.nodes.size()); ++i) {
    const auto& nd = t.nodes[i];
    if (nd.level >= 1 && t.red_mult(i, nd.parent) != 2)
      return "missing multiplicity-2 edge to the parent class";
  }
  return std::nullopt;
}

}  // namespace detail

// Sound anonymity inference without any completeness assumptions: only facts
// that hold in every network consistent with the view are derived.
inline Inference infer_anonymities(const HistoryTree& view, int anchor,
                                   std::uint64_t order_seed = 0) {
  if (auto defect = detail::view_defect(view, anchor)) {
    Inference inf;
    inf.a.assign(view.nodes.size(), std::nullopt);
    inf.cc.assign(view.nodes.size(), 0);
    inf.contradiction = true;
    inf.reason = *defect;
    return inf;
  }
  detail::RuleEngine eng(view, anchor, detail::RuleEngine::kNoGrant, std::nullopt,
                         -1, order_seed);
  return eng.run();
}

// Cut certificate: a level whose classes are all known and children-complete,
// whose children draw all their red in-edges from that level's classes, and
// whose anonymities sum to `total`. In a connected network such a cut pins
// the population exactly.
inline std::optional<std::pair<int, std::vector<int>>> find_cut_certificate(
    const HistoryTree& view, const Inference& inf, std::int64_t total) {
  int depth = view.depth();
  for (int s = depth - 1; s >= 0; --s) {
    auto nodes = view.level_nodes(s);
    bool ok = !nodes.empty();
    std::int64_t sum = 0;
    for (int v : nodes) {
      if (!inf.known(v) || !inf.cc[v]) {
        ok = false;
        break;
      }
      sum += *inf.a[v];
    }
    if (!ok || sum != total) continue;
    std::set<int> cut(nodes.begin(), nodes.end());
    for (int d : view.level_nodes(s + 1)) {
      for (auto [src, mult] : view.nodes[d].in_red) {
        (void)mult;
        if (!cut.count(src)) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) return std::make_pair(s, nodes);
  }
  return std::nullopt;
}

// Counts the network from a view. Basic mode returns Count(n); generalized
// mode additionally reports the multiset of non-leader input values. Unknown
// means the view does not yet determine the count; Malformed means the input
// cannot be a view of any virtual network run.
inline CountResult count_from_view(const HistoryTree& view, int anchor,
                                   bool generalized = false,
                                   std::uint64_t order_seed = 0) {
  if (auto defect = detail::view_defect(view, anchor))
    return CountResult::malformed(*defect);
  int T = view.depth();
  if (T < 3) return CountResult::unknown("view too shallow for any candidate");

  struct Candidate {
    std::int64_t k;
    bool complete;
    Inference inf;
  };
  std::vector<Candidate> survivors;
  for (std::int64_t k = 1; 3 * k <= T; ++k) {
    detail::RuleEngine eng(view, anchor, int(T - k), k, int(T - k + 1), order_seed);
    Inference inf = eng.run();
    if (inf.contradiction) continue;  // candidate refuted
    bool complete = true;
    for (int v = 1; v < int(view.nodes.size()); ++v)
      if (view.nodes[v].level <= T - k && !inf.known(v)) complete = false;
    complete = complete && find_cut_certificate(view, inf, k).has_value();
    survivors.push_back({k, complete, std::move(inf)});
  }
  if (survivors.empty())
    return CountResult::unknown("every candidate in range refuted");
  if (survivors.size() > 1)
    return CountResult::unknown("multiple candidates remain");
  if (!survivors[0].complete)
    return CountResult::unknown("candidate not fully determined");

  const Candidate& win = survivors[0];
  CountResult r;
  r.count = win.k;
  if (!generalized) {
    r.kind = CountResult::Kind::Count;
    return r;
  }
  r.kind = CountResult::Kind::Multiset;
  std::int64_t non_leader = 0;
  for (int v : view.level_nodes(0)) {
    if (view.nodes[v].input == kLeaderInput) continue;
    r.values[view.nodes[v].input] += *win.inf.a[v];
    non_leader += *win.inf.a[v];
  }
  if (non_leader + 1 != win.k)
    return CountResult::malformed("input classes do not sum to the count");
  return r;
}

}  // namespace adnet
