// Lock-step simulation engine for anonymous dynamic networks: per-round
// multigraph topologies, message delivery, deterministic topology schedulers,
// and the textual trace format.
#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "adnet/message.hpp"

namespace adnet {

// Undirected multigraph link. u == v is a self-loop: one message sent and
// received by the same process (per unit of multiplicity).
struct Link {
  int u = 0, v = 0;
  std::int64_t mult = 1;

  friend bool operator==(const Link& a, const Link& b) {
    return a.u == b.u && a.v == b.v && a.mult == b.mult;
  }
};

struct RoundTopology {
  int n = 0;
  std::vector<Link> links;  // canonical: u <= v, sorted, pairs unique

  void add(int u, int v, std::int64_t mult = 1) {
    if (u > v) std::swap(u, v);
    links.push_back({u, v, mult});
  }

  // Sorts links, merges duplicate pairs, and validates ranges.
  void normalize() {
    for (auto& l : links) {
      if (l.u > l.v) std::swap(l.u, l.v);
      if (l.u < 0 || l.v >= n) throw std::invalid_argument("link endpoint out of range");
      if (l.mult < 1) throw std::invalid_argument("link multiplicity must be >= 1");
    }
    std::sort(links.begin(), links.end(), [](const Link& a, const Link& b) {
      return std::tie(a.u, a.v) < std::tie(b.u, b.v);
    });
    std::vector<Link> merged;
    for (const auto& l : links) {
      if (!merged.empty() && merged.back().u == l.u && merged.back().v == l.v)
        merged.back().mult += l.mult;
      else
        merged.push_back(l);
    }
    links = std::move(merged);
  }

  std::int64_t total_link_mult() const {
    std::int64_t s = 0;
    for (const auto& l : links) s += l.mult;
    return s;
  }

  friend bool operator==(const RoundTopology& a, const RoundTopology& b) {
    return a.n == b.n && a.links == b.links;
  }
};

// Connectivity of the simple graph underlying the multigraph (self-loops do
// not connect anything). A single process with no links is connected.
inline bool is_connected(const RoundTopology& t) {
  if (t.n <= 0) return false;
  std::vector<int> parent(t.n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = t.n;
  for (const auto& l : t.links) {
    if (l.u == l.v) continue;
    int a = find(l.u), b = find(l.v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

// Merges the links of several rounds into one topology (the T-round union).
inline RoundTopology union_topology(const std::vector<RoundTopology>& rounds) {
  RoundTopology u;
  if (rounds.empty()) return u;
  u.n = rounds.front().n;
  for (const auto& r : rounds) {
    assert(r.n == u.n);
    for (const auto& l : r.links) u.links.push_back(l);
  }
  u.normalize();
  return u;
}

// Delivers one message per process over the given topology. inbox[i] is the
// multiset of messages process i receives, in canonical sorted order (the
// model is anonymous: no sender information survives delivery).
inline std::vector<std::vector<Message>> deliver(
    const RoundTopology& topo, const std::vector<Message>& outgoing) {
  assert(int(outgoing.size()) == topo.n);
  std::vector<std::vector<Message>> inbox(topo.n);
  for (const auto& l : topo.links) {
    for (std::int64_t k = 0; k < l.mult; ++k) {
      if (l.u == l.v) {
        inbox[l.u].push_back(outgoing[l.u]);
      } else {
        inbox[l.u].push_back(outgoing[l.v]);
        inbox[l.v].push_back(outgoing[l.u]);
      }
    }
  }
  auto key = [](const Message& m) {
    return std::tuple(int(m.label), m.p[0], m.p[1], m.p[2]);
  };
  for (auto& box : inbox)
    std::sort(box.begin(), box.end(),
              [&](const Message& a, const Message& b) { return key(a) < key(b); });
  return inbox;
}

// Total deliveries the topology induces: 2*mult per proper link, mult per
// self-loop. Used by conservation checks.
inline std::int64_t expected_deliveries(const RoundTopology& topo) {
  std::int64_t s = 0;
  for (const auto& l : topo.links) s += (l.u == l.v) ? l.mult : 2 * l.mult;
  return s;
}

// --- Schedulers -------------------------------------------------------------
//
// A scheduler produces the round-t topology. Rounds are requested strictly
// sequentially starting from 1; all randomness comes from the constructor
// seed, so identical configurations yield identical topology sequences.

class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual RoundTopology round(int t) = 0;
  virtual std::string name() const = 0;

 protected:
  void check_sequential(int t) {
    if (t != next_) throw std::logic_error("scheduler rounds must be requested in order");
    ++next_;
  }
  int next_ = 1;
};

class StaticScheduler : public Scheduler {
 public:
  explicit StaticScheduler(RoundTopology topo, std::string label = "static")
      : topo_(std::move(topo)), label_(std::move(label)) {
    topo_.normalize();
  }
  RoundTopology round(int t) override {
    check_sequential(t);
    return topo_;
  }
  std::string name() const override { return label_; }

 private:
  RoundTopology topo_;
  std::string label_;
};

// Cycles through a fixed list of topologies, one per round.
class AlternatingScheduler : public Scheduler {
 public:
  explicit AlternatingScheduler(std::vector<RoundTopology> topos,
                                std::string label = "alternating")
      : topos_(std::move(topos)), label_(std::move(label)) {
    if (topos_.empty()) throw std::invalid_argument("need at least one topology");
    for (auto& t : topos_) t.normalize();
  }
  RoundTopology round(int t) override {
    check_sequential(t);
    return topos_[(t - 1) % topos_.size()];
  }
  std::string name() const override { return label_; }

 private:
  std::vector<RoundTopology> topos_;
  std::string label_;
};

// Fresh random connected topology every round: a random spanning tree over a
// random vertex permutation, plus each remaining pair independently with
// probability extra_prob.
class RandomConnectedScheduler : public Scheduler {
 public:
  RandomConnectedScheduler(int n, std::uint64_t seed, double extra_prob = 0.2)
      : n_(n), extra_prob_(extra_prob), rng_(seed) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
  }
  RoundTopology round(int t) override {
    check_sequential(t);
    RoundTopology topo;
    topo.n = n_;
    std::vector<int> perm(n_);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng_);
    for (int i = 1; i < n_; ++i) {
      std::uniform_int_distribution<int> pick(0, i - 1);
      topo.add(perm[pick(rng_)], perm[i]);
    }
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        if (coin(rng_) < extra_prob_) topo.add(i, j);
    topo.normalize();
    return topo;
  }
  std::string name() const override { return "random_connected"; }

 private:
  int n_;
  double extra_prob_;
  std::mt19937_64 rng_;
};

// T-interval connectivity: each block of T consecutive rounds has a connected
// union, but individual rounds only carry a slice of the block's edges (and
// may be disconnected or even empty).
class TUnionScheduler : public Scheduler {
 public:
  TUnionScheduler(int n, int T, std::uint64_t seed, double extra_prob = 0.2)
      : n_(n), T_(T), rng_(seed), extra_prob_(extra_prob) {
    if (n < 1 || T < 1) throw std::invalid_argument("bad T-union parameters");
  }
  RoundTopology round(int t) override {
    check_sequential(t);
    int offset = (t - 1) % T_;
    if (offset == 0) make_block();
    return block_[offset];
  }
  std::string name() const override { return "t_union"; }

 private:
  void make_block() {
    RoundTopology all;
    all.n = n_;
    std::vector<int> perm(n_);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng_);
    for (int i = 1; i < n_; ++i) {
      std::uniform_int_distribution<int> pick(0, i - 1);
      all.add(perm[pick(rng_)], perm[i]);
    }
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        if (coin(rng_) < extra_prob_) all.add(i, j);
    all.normalize();
    // Deal the block's links round-robin into T slices.
    std::shuffle(all.links.begin(), all.links.end(), rng_);
    block_.assign(T_, RoundTopology{});
    for (auto& slice : block_) slice.n = n_;
    for (std::size_t k = 0; k < all.links.size(); ++k)
      block_[k % T_].links.push_back(all.links[k]);
    for (auto& slice : block_) slice.normalize();
  }

  int n_, T_;
  std::mt19937_64 rng_;
  double extra_prob_;
  std::vector<RoundTopology> block_;
};

// Common fixed topologies.
inline RoundTopology star_topology(int n) {
  RoundTopology t;
  t.n = n;
  for (int i = 1; i < n; ++i) t.add(0, i);
  t.normalize();
  return t;
}

inline RoundTopology path_topology(int n) {
  RoundTopology t;
  t.n = n;
  for (int i = 0; i + 1 < n; ++i) t.add(i, i + 1);
  t.normalize();
  return t;
}

inline RoundTopology cycle_topology(int n) {
  RoundTopology t;
  t.n = n;
  for (int i = 0; i + 1 < n; ++i) t.add(i, i + 1);
  if (n > 2) t.add(0, n - 1);
  t.normalize();
  return t;
}

// Builds a scheduler from a textual spec. Accepted forms:
//   star | path | cycle | random | tunion:<T> | alt:star,path,...
inline std::unique_ptr<Scheduler> make_scheduler(const std::string& spec, int n,
                                                 std::uint64_t seed) {
  auto fixed = [&](const std::string& kind) -> std::optional<RoundTopology> {
    if (kind == "star") return star_topology(n);
    if (kind == "path") return path_topology(n);
    if (kind == "cycle") return cycle_topology(n);
    return std::nullopt;
  };
  if (auto t = fixed(spec)) return std::make_unique<StaticScheduler>(*t, spec);
  if (spec == "random") return std::make_unique<RandomConnectedScheduler>(n, seed);
  if (spec.rfind("tunion:", 0) == 0)
    return std::make_unique<TUnionScheduler>(n, std::stoi(spec.substr(7)), seed);
  if (spec.rfind("alt:", 0) == 0) {
    std::vector<RoundTopology> topos;
    std::stringstream ss(spec.substr(4));
    std::string kind;
    while (std::getline(ss, kind, ',')) {
      auto t = fixed(kind);
      if (!t) throw std::invalid_argument("unknown topology in alt list: " + kind);
      topos.push_back(*t);
    }
    return std::make_unique<AlternatingScheduler>(std::move(topos), spec);
  }
  throw std::invalid_argument("unknown scheduler spec: " + spec);
}

// --- Trace files ------------------------------------------------------------
//
// Header line:  n <n> T <T>
// Followed by, per round:  round <t>   then one "u v mult" line per link.
// Rounds must be numbered 1..R consecutively.

struct Trace {
  int n = 0;
  int T = 1;  // union window the trace is meant to satisfy
  std::vector<RoundTopology> rounds;
};

inline void write_trace(std::ostream& os, const Trace& trace) {
  os << "n " << trace.n << " T " << trace.T << "\n";
  for (std::size_t i = 0; i < trace.rounds.size(); ++i) {
    os << "round " << (i + 1) << "\n";
    for (const auto& l : trace.rounds[i].links)
      os << l.u << " " << l.v << " " << l.mult << "\n";
  }
}

inline Trace parse_trace(std::istream& is) {
  Trace trace;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& why) {
    throw std::runtime_error("trace parse error at line " + std::to_string(lineno) +
                             ": " + why);
  };
  bool have_header = false;
  while (std::getline(is, line)) {
    ++lineno;
    std::stringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) continue;  // blank line
    if (tok == "#") continue;    // comment
    if (!have_header) {
      if (tok != "n") fail("expected header 'n <n> T <T>'");
      std::string tkey;
      if (!(ss >> trace.n >> tkey >> trace.T) || tkey != "T") fail("bad header");
      if (trace.n < 1 || trace.T < 1) fail("n and T must be >= 1");
      have_header = true;
      continue;
    }
    if (tok == "round") {
      int idx = 0;
      if (!(ss >> idx)) fail("bad round header");
      if (idx != int(trace.rounds.size()) + 1) fail("rounds must be consecutive from 1");
      if (!trace.rounds.empty()) trace.rounds.back().normalize();
      trace.rounds.push_back(RoundTopology{trace.n, {}});
      continue;
    }
    if (trace.rounds.empty()) fail("link line before any round header");
    Link l;
    std::stringstream ls(line);
    if (!(ls >> l.u >> l.v >> l.mult)) fail("bad link line");
    if (l.u < 0 || l.u >= trace.n || l.v < 0 || l.v >= trace.n || l.mult < 1)
      fail("link out of range");
    trace.rounds.back().links.push_back(l);
  }
  if (!have_header) throw std::runtime_error("trace parse error: missing header");
  if (!trace.rounds.empty()) trace.rounds.back().normalize();
  return trace;
}

// Replays a recorded trace as a scheduler. Rounds beyond the recorded suffix
// repeat the last topology (a finite trace driving a longer run).
class TraceScheduler : public Scheduler {
 public:
  explicit TraceScheduler(Trace trace) : trace_(std::move(trace)) {
    if (trace_.rounds.empty()) throw std::invalid_argument("empty trace");
  }
  RoundTopology round(int t) override {
    check_sequential(t);
    std::size_t i = std::min<std::size_t>(t - 1, trace_.rounds.size() - 1);
    return trace_.rounds[i];
  }
  std::string name() const override { return "trace"; }

 private:
  Trace trace_;
};

}  // namespace adnet
