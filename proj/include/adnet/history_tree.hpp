// History trees: the per-round refinement structure of an anonymous dynamic
// network. Provides ground-truth construction from a topology sequence,
// view extraction, canonical forms / isomorphism, the generalized-view
// embedding test, and a textual debug dump.
#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "adnet/engine.hpp"

namespace adnet {

// L_0 label of the unique leader. Non-leader labels are the (non-negative)
// input values; in basic counting every non-leader carries 0.
inline constexpr std::int64_t kLeaderInput = -1;

struct HistoryTree {
  struct Node {
    int level = -1;   // root sits at level -1
    int parent = -1;  // node index; -1 for the root
    std::int64_t id = -1;     // protocol ID when known, else -1 (anonymous)
    std::int64_t input = 0;   // L_0 label; only meaningful at level 0
    // Red in-edges: (node index at level-1, multiplicity), sorted by index.
    // A node's processes received exactly this multiset of messages, grouped
    // by the sender's class of the previous level.
    std::vector<std::pair<int, std::int64_t>> in_red;

    friend bool operator==(const Node&, const Node&) = default;
  };

  std::vector<Node> nodes;  // index 0 is the root; levels are non-decreasing

  friend bool operator==(const HistoryTree&, const HistoryTree&) = default;

  static HistoryTree with_root() {
    HistoryTree t;
    t.nodes.push_back(Node{});
    return t;
  }

  int depth() const {
    int d = -1;
    for (const auto& n : nodes) d = std::max(d, n.level);
    return d;
  }

  std::vector<int> level_nodes(int level) const {
    std::vector<int> out;
    for (int i = 0; i < int(nodes.size()); ++i)
      if (nodes[i].level == level) out.push_back(i);
    return out;
  }

  std::vector<std::vector<int>> children_lists() const {
    std::vector<std::vector<int>> ch(nodes.size());
    for (int i = 0; i < int(nodes.size()); ++i)
      if (nodes[i].parent >= 0) ch[nodes[i].parent].push_back(i);
    return ch;
  }

  // Structural sanity: contiguous levels, parents one level up, red edges
  // between consecutive levels with positive multiplicities.
  void validate() const {
    if (nodes.empty() || nodes[0].level != -1 || nodes[0].parent != -1)
      throw std::invalid_argument("history tree must start with a level -1 root");
    for (int i = 1; i < int(nodes.size()); ++i) {
      const Node& v = nodes[i];
      if (v.level < 0) throw std::invalid_argument("only the root may sit at level -1");
      if (v.parent < 0 || v.parent >= int(nodes.size()))
        throw std::invalid_argument("bad parent index");
      if (nodes[v.parent].level != v.level - 1)
        throw std::invalid_argument("parent must sit one level up");
      if (v.level == 0 && !v.in_red.empty())
        throw std::invalid_argument("level-0 nodes receive no messages");
      int prev = -1;
      for (auto [src, mult] : v.in_red) {
        if (src < 0 || src >= int(nodes.size()) || nodes[src].level != v.level - 1)
          throw std::invalid_argument("red edge source must sit one level up");
        if (mult < 1) throw std::invalid_argument("red multiplicity must be >= 1");
        if (src <= prev) throw std::invalid_argument("red edges must be sorted by source");
        prev = src;
      }
    }
  }

  // Index of the node carrying the given protocol ID, or -1.
  int find_id(std::int64_t id) const {
    for (int i = 0; i < int(nodes.size()); ++i)
      if (nodes[i].id == id) return i;
    return -1;
  }

  std::int64_t red_mult(int node, int src) const {
    for (auto [s, m] : nodes[node].in_red)
      if (s == src) return m;
    return 0;
  }

  // Count of distinct red edges on levels <= max_level (counting an edge at
  // the level of its target node).
  std::int64_t distinct_red_edges(int max_level) const {
    std::int64_t c = 0;
    for (const auto& v : nodes)
      if (v.level <= max_level) c += std::int64_t(v.in_red.size());
    return c;
  }
};

// --- Ground truth ------------------------------------------------------------

struct GroundTruth {
  HistoryTree tree;
  // node_of[t][i]: tree node of process i at level t (t = 0..rounds).
  std::vector<std::vector<int>> node_of;
  // anonymity[v]: number of processes whose history class is node v
  // (n for the root).
  std::vector<std::int64_t> anonymity;
};

// Builds the history tree of a dynamic network: level 0 groups processes by
// input label, level t+1 refines level t by the multiset of (sender class,
// multiplicity) each process receives under rounds[t].
inline GroundTruth build_ground_truth(int n, const std::vector<RoundTopology>& rounds,
                                      const std::vector<std::int64_t>& inputs) {
  if (int(inputs.size()) != n) throw std::invalid_argument("inputs size mismatch");
  GroundTruth gt;
  gt.tree = HistoryTree::with_root();
  auto& tree = gt.tree;

  // Level 0: one node per distinct input label, ascending.
  std::vector<std::int64_t> labels(inputs);
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  std::map<std::int64_t, int> node_of_label;
  for (auto lb : labels) {
    HistoryTree::Node v;
    v.level = 0;
    v.parent = 0;
    v.input = lb;
    node_of_label[lb] = int(tree.nodes.size());
    tree.nodes.push_back(v);
  }
  std::vector<int> cur(n);
  for (int i = 0; i < n; ++i) cur[i] = node_of_label[inputs[i]];
  gt.node_of.push_back(cur);

  for (std::size_t t = 0; t < rounds.size(); ++t) {
    const RoundTopology& g = rounds[t];
    if (g.n != n) throw std::invalid_argument("round topology has wrong n");
    // Messages received per process, grouped by the sender's current class.
    std::vector<std::map<int, std::int64_t>> recv(n);
    for (const auto& l : g.links) {
      if (l.u == l.v) {
        recv[l.u][cur[l.u]] += l.mult;
      } else {
        recv[l.u][cur[l.v]] += l.mult;
        recv[l.v][cur[l.u]] += l.mult;
      }
    }
    using Sig = std::pair<int, std::vector<std::pair<int, std::int64_t>>>;
    std::map<Sig, std::vector<int>> groups;
    for (int i = 0; i < n; ++i) {
      Sig s{cur[i], {recv[i].begin(), recv[i].end()}};
      groups[s].push_back(i);
    }
    std::vector<int> next(n);
    for (const auto& [sig, members] : groups) {
      HistoryTree::Node v;
      v.level = int(t) + 1;
      v.parent = sig.first;
      v.in_red = sig.second;
      int idx = int(tree.nodes.size());
      tree.nodes.push_back(v);
      for (int i : members) next[i] = idx;
    }
    cur = next;
    gt.node_of.push_back(cur);
  }

  // node_of[t] holds only level-t nodes, so each node is counted by exactly
  // one snapshot.
  gt.anonymity.assign(tree.nodes.size(), 0);
  gt.anonymity[0] = n;
  for (const auto& lvl : gt.node_of)
    for (int v : lvl) ++gt.anonymity[v];
  return gt;
}

// --- Views -------------------------------------------------------------------

struct View {
  HistoryTree tree;
  std::vector<int> orig;  // view node -> node index in the source tree
  int anchor = -1;        // index (in view tree) of the node it was taken from
};

// The view of a node: the closure of the node under parents and red in-edge
// sources. Every included node keeps its complete in-edge list (all sources
// are included by construction), which is exactly the view property.
inline View extract_view(const HistoryTree& t, int anchor) {
  std::vector<char> keep(t.nodes.size(), 0);
  std::vector<int> stack = {anchor};
  keep[anchor] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    auto push = [&](int u) {
      if (u >= 0 && !keep[u]) {
        keep[u] = 1;
        stack.push_back(u);
      }
    };
    push(t.nodes[v].parent);
    for (auto [src, mult] : t.nodes[v].in_red) {
      (void)mult;
      push(src);
    }
  }
  View view;
  std::vector<int> remap(t.nodes.size(), -1);
  // Keep (level, original index) order so the root stays first.
  std::vector<int> order;
  for (int i = 0; i < int(t.nodes.size()); ++i)
    if (keep[i]) order.push_back(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return t.nodes[a].level < t.nodes[b].level; });
  for (int i : order) {
    remap[i] = int(view.tree.nodes.size());
    view.tree.nodes.push_back(t.nodes[i]);
    view.orig.push_back(i);
  }
  for (auto& v : view.tree.nodes) {
    if (v.parent >= 0) v.parent = remap[v.parent];
    for (auto& [src, mult] : v.in_red) {
      (void)mult;
      src = remap[src];
    }
    std::sort(v.in_red.begin(), v.in_red.end());
  }
  view.anchor = remap[anchor];
  return view;
}

// Truncates a tree to levels <= max_level.
inline HistoryTree truncate_tree(const HistoryTree& t, int max_level) {
  HistoryTree out;
  std::vector<int> remap(t.nodes.size(), -1);
  for (int i = 0; i < int(t.nodes.size()); ++i) {
    if (t.nodes[i].level > max_level) continue;
    remap[i] = int(out.nodes.size());
    out.nodes.push_back(t.nodes[i]);
  }
  for (auto& v : out.nodes) {
    if (v.parent >= 0) v.parent = remap[v.parent];
    for (auto& [src, mult] : v.in_red) {
      (void)mult;
      src = remap[src];
    }
  }
  return out;
}

// --- Canonical form and isomorphism -----------------------------------------

// Level-by-level canonical encoding: nodes are renumbered within each level
// by sorting their signatures (parent class, L_0 label, red in-edge profile).
// On refinement-generated trees signatures are injective per level, making
// this a complete isomorphism invariant; on arbitrary trees it is the
// canonical multiset form.
inline std::string canonical_form(const HistoryTree& t, int max_level = 1 << 30) {
  std::vector<int> cls(t.nodes.size(), -1);
  cls[0] = 0;
  std::string out = "root;";
  for (int level = 0; level <= std::min(max_level, t.depth()); ++level) {
    auto idxs = t.level_nodes(level);
    if (idxs.empty()) break;
    using Key = std::tuple<int, std::int64_t, std::vector<std::pair<int, std::int64_t>>>;
    std::vector<std::pair<Key, int>> keyed;
    for (int i : idxs) {
      const auto& v = t.nodes[i];
      std::vector<std::pair<int, std::int64_t>> red;
      for (auto [src, mult] : v.in_red) red.emplace_back(cls[src], mult);
      std::sort(red.begin(), red.end());
      keyed.emplace_back(Key{cls[v.parent], level == 0 ? v.input : 0, std::move(red)},
                         i);
    }
    std::sort(keyed.begin(), keyed.end());
    std::ostringstream os;
    os << "L" << level << ":";
    for (int k = 0; k < int(keyed.size()); ++k) {
      const auto& [key, idx] = keyed[k];
      cls[idx] = k;
      os << "[p" << std::get<0>(key);
      if (level == 0) os << ",i" << std::get<1>(key);
      os << ",r";
      for (auto [c, m] : std::get<2>(key)) os << "(" << c << "," << m << ")";
      os << "]";
    }
    os << ";";
    out += os.str();
  }
  return out;
}

inline bool is_isomorphic(const HistoryTree& a, const HistoryTree& b) {
  return canonical_form(a) == canonical_form(b);
}

// Exact test that `sub` embeds into `full` as a generalized view: an
// injective, level-preserving map sending root to root, commuting with
// parents, preserving L_0 labels, and matching every node's complete red
// in-edge profile. Backtracking search; the per-level signature grouping
// makes it fast on refinement-generated inputs.
inline bool is_generalized_view_of(const HistoryTree& sub, const HistoryTree& full) {
  if (sub.nodes.empty() || full.nodes.empty()) return false;
  int sub_depth = sub.depth();
  if (sub_depth > full.depth()) return false;

  std::vector<std::vector<int>> sub_levels, full_levels;
  for (int l = 0; l <= sub_depth; ++l) {
    sub_levels.push_back(sub.level_nodes(l));
    full_levels.push_back(full.level_nodes(l));
    if (sub_levels.back().size() > full_levels.back().size()) return false;
  }

  std::vector<int> map(sub.nodes.size(), -1);
  map[0] = 0;
  std::vector<char> used(full.nodes.size(), 0);
  used[0] = 1;

  // Match nodes level by level, within a level in list order.
  auto matches = [&](int s, int f) {
    const auto& sv = sub.nodes[s];
    const auto& fv = full.nodes[f];
    if (map[sv.parent] != fv.parent) return false;
    if (sv.level == 0 && sv.input != fv.input) return false;
    if (sv.in_red.size() != fv.in_red.size()) return false;
    std::vector<std::pair<int, std::int64_t>> mapped;
    for (auto [src, mult] : sv.in_red) mapped.emplace_back(map[src], mult);
    std::sort(mapped.begin(), mapped.end());
    return mapped == fv.in_red;
  };

  std::vector<std::pair<int, int>> flat;  // (level, position)
  for (int l = 0; l <= sub_depth; ++l)
    for (int k = 0; k < int(sub_levels[l].size()); ++k) flat.emplace_back(l, k);

  std::function<bool(std::size_t)> go = [&](std::size_t step) -> bool {
    if (step == flat.size()) return true;
    auto [l, k] = flat[step];
    int s = sub_levels[l][k];
    for (int f : full_levels[l]) {
      if (used[f] || !matches(s, f)) continue;
      used[f] = 1;
      map[s] = f;
      if (go(step + 1)) return true;
      used[f] = 0;
      map[s] = -1;
    }
    return false;
  };
  return go(0);
}

// --- Debug dump --------------------------------------------------------------
//
// One line per node, levels ascending:
//   <level> <id> <parent-id> [input] { (neighbor, mult), ... }
// IDs fall back to node indices for anonymous trees; the root's parent
// prints as '-'. The [input] field appears on level-0 nodes only.

inline std::string dump_tree(const HistoryTree& t) {
  std::vector<int> order(t.nodes.size());
  for (int i = 0; i < int(order.size()); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return t.nodes[a].level < t.nodes[b].level;
  });
  auto display = [&](int idx) -> std::string {
    if (idx < 0) return "-";
    const auto& v = t.nodes[idx];
    return std::to_string(v.id >= 0 ? v.id : idx);
  };
  std::ostringstream os;
  for (int i : order) {
    const auto& v = t.nodes[i];
    os << v.level << " " << display(i) << " " << display(v.parent);
    if (v.level == 0) os << " [" << v.input << "]";
    os << " {";
    bool first = true;
    for (auto [src, mult] : v.in_red) {
      os << (first ? " " : ", ") << "(" << display(src) << ", " << mult << ")";
      first = false;
    }
    os << " }\n";
  }
  return os.str();
}

}  // namespace adnet
