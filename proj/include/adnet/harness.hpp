// Experiment harness: drives process fleets over schedulers, watches every
// run with an omniscient monitor (agreement, phase lockstep, estimate bounds,
// tree-embedding checks against the reconstructed ideal tree), injects faults
// on demand, and emits one CSV row per run.
//
// The monitor is read-only: it samples process state after each round's
// emissions and never feeds anything back into the processes.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "adnet/counting.hpp"
#include "adnet/engine.hpp"
#include "adnet/history_tree.hpp"
#include "adnet/message.hpp"
#include "adnet/protocol.hpp"

namespace adnet {

// --- Configuration -----------------------------------------------------------

struct ExperimentConfig {
  int n = 0;
  std::string scheduler = "random";  // spec for make_scheduler, or "trace:<file>"
  std::uint64_t seed = 0;
  std::string mode = "basic";  // basic | simultaneous | generalized | tunion:<T>
  // Generalized mode: one non-negative value per non-leader. Left empty, a
  // deterministic assignment is derived from (n, seed).
  std::vector<std::int64_t> inputs;
  std::int64_t round_budget = 0;  // 0 = default_round_budget(n), scaled by T
  bool check_invariants = true;
  // Fault injection: once the leader enters an acknowledgment broadcast at or
  // after the given round, the last process is cut off for the remainder of
  // that phase. This forces a divergent acceptance and a reset without ever
  // touching a begin round (so the recorded observation rounds stay honest).
  bool fault_cut = false;
  std::int64_t fault_cut_after_round = 1;
};

// Generous empirical ceiling: the construction finishes in O(n^3 log n)
// rounds, and no observed run has come near this constant.
inline std::int64_t default_round_budget(int n) {
  double lg = std::log2(double(std::max(n, 2)));
  return std::int64_t(64.0 * double(n) * double(n) * double(n) * (lg + 2.0));
}

struct ModeSpec {
  Mode mode = Mode::Basic;
  int block = 1;  // T: rounds per virtual round (1 = connected every round)
};

inline ModeSpec parse_mode(const std::string& s) {
  if (s == "basic") return {Mode::Basic, 1};
  if (s == "simultaneous") return {Mode::Simultaneous, 1};
  if (s == "generalized") return {Mode::Generalized, 1};
  if (s.rfind("tunion:", 0) == 0) {
    int T = std::stoi(s.substr(7));
    if (T < 1) throw std::invalid_argument("block size must be >= 1");
    return {Mode::Basic, T};
  }
  throw std::invalid_argument("unknown mode: " + s);
}

inline std::vector<std::int64_t> derive_inputs(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x1d872b41c9a3f507ull ^ (std::uint64_t(n) << 32));
  std::uniform_int_distribution<std::int64_t> dist(0, 9);
  std::vector<std::int64_t> vals;
  for (int i = 1; i < n; ++i) vals.push_back(dist(rng));
  return vals;
}

// --- Results -------------------------------------------------------------------

struct Violation {
  std::string check;  // name of the violated guarantee
  std::int64_t round = 0;  // first offending round
  std::string detail;
  std::int64_t count = 1;  // occurrences
};

struct RunMetrics {
  std::int64_t rounds = 0;
  std::int64_t resets = 0;
  std::int64_t max_diam_estimate = 0;
  std::int64_t distinct_red_edges = 0;
  std::int64_t max_msg_bits = 0;
  std::int64_t max_param = 0;
};

// Leader tree snapshot taken when a broadcast just failed (error handling
// started): levels are partially built, which is exactly the input the
// counting soundness tests want.
struct FaultSnapshot {
  HistoryTree tree;
  int anchor = -1;  // deepest node on the leader's identity chain
  std::int64_t round = 0;
};

// Everything needed to rebuild one level of the ideal tree: the real round
// whose begin-round graph seeded the level, the process-to-class partition at
// that round, the spanning tree over classes the run settled on, and the
// virtual round derived from the three.
struct IdealVhtRecord {
  std::int64_t level = 0;  // tree level this record builds
  std::int64_t round = 0;  // real round of the recorded begin-round graph
  RoundTopology topo;      // that graph
  std::vector<std::int64_t> ids;  // class of each process at that round
  LevelGraph s;
  RoundTopology nt;
};

struct RunResult {
  ExperimentConfig config;  // with derived inputs filled in
  RunMetrics metrics;
  bool timed_out = false;
  std::optional<std::int64_t> count;            // leader's count
  std::map<std::int64_t, std::int64_t> values;  // generalized only
  std::vector<std::int64_t> output_rounds;      // per process; -1 = never
  std::int64_t output_level = 0;                // leader stage at output
  bool correct = false;                         // output matches ground truth
  std::vector<Violation> violations;
  HistoryTree ideal;      // reconstructed ideal tree (empty in block mode)
  HistoryTree effective;  // leader's final tree
  std::vector<IdealVhtRecord> ideal_records;  // one per surviving level ≥ 1
  std::vector<View> finalization_views;  // leader's view per clean finalization
  std::vector<FaultSnapshot> fault_snapshots;

  bool ok() const { return correct && violations.empty(); }
};

// --- Ideal-tree reconstruction --------------------------------------------------

// Derives one round of the virtual network from a real round: cross-class
// links survive only along the spanning tree S of class adjacencies; links
// within a class are replaced by a cycle over its members (degenerating to a
// double link for two members and a double self-loop for one), which hands
// every process exactly two same-class observations.
inline RoundTopology build_virtual_round(const RoundTopology& g,
                                         const std::vector<std::int64_t>& id_of,
                                         const LevelGraph& s) {
  if (int(id_of.size()) != g.n)
    throw std::invalid_argument("id partition size mismatch");
  RoundTopology vt;
  vt.n = g.n;
  for (const Link& l : g.links) {
    if (l.u == l.v) continue;                  // same process: same class
    std::int64_t a = id_of[l.u], b = id_of[l.v];
    if (a == b) continue;                      // within-class: the cycle covers it
    if (!s.has_edge(a, b)) continue;           // off-tree class pair: dropped
    vt.add(l.u, l.v, l.mult);
  }
  std::map<std::int64_t, std::vector<int>> classes;
  for (int i = 0; i < g.n; ++i) classes[id_of[i]].push_back(i);
  for (const auto& [id, ps] : classes) {
    (void)id;
    if (ps.size() == 1) {
      vt.add(ps[0], ps[0], 2);
    } else {
      for (std::size_t k = 0; k < ps.size(); ++k)
        vt.add(ps[k], ps[(k + 1) % ps.size()], 1);
    }
  }
  vt.normalize();
  return vt;
}

// Distinct red edges in levels 1..max_level, split into each node's edge to
// its own parent (contributed by the class cycle, always multiplicity 2) and
// the cross-class remainder. The remainder is what the spanning-tree choice
// keeps small: it is bounded by 2n(m+n) over m levels, while the parent edges
// add exactly one per node (at most n per level). The combined total can
// exceed 2n(m+n) on fast-separating topologies, so the two parts are tracked
// separately.
struct RedEdgeSplit {
  std::int64_t parent = 0;
  std::int64_t cross = 0;
};

inline RedEdgeSplit split_red_edges(const HistoryTree& t, int max_level) {
  RedEdgeSplit s;
  for (const auto& v : t.nodes) {
    if (v.level < 1 || v.level > max_level) continue;
    for (auto [src, mult] : v.in_red) {
      (void)mult;
      if (src == v.parent)
        ++s.parent;
      else
        ++s.cross;
    }
  }
  return s;
}

// Removes level-0 nodes that no process ever adopted, provided they stayed
// childless and unreferenced. The construction unconditionally seeds a
// non-leader class (and, in value-counting mode, a placeholder class), which
// the network's real history does not contain when nobody carries it.
inline HistoryTree drop_vestigial_l0(const HistoryTree& t,
                                     const std::set<std::int64_t>& held_ids) {
  std::vector<char> has_child(t.nodes.size(), 0), is_src(t.nodes.size(), 0);
  for (const auto& v : t.nodes) {
    if (v.parent >= 0) has_child[v.parent] = 1;
    for (auto [src, mult] : v.in_red) {
      (void)mult;
      is_src[src] = 1;
    }
  }
  HistoryTree out;
  std::vector<int> remap(t.nodes.size(), -1);
  for (int i = 0; i < int(t.nodes.size()); ++i) {
    const auto& v = t.nodes[i];
    bool drop = v.level == 0 && !has_child[i] && !is_src[i] &&
                held_ids.count(v.id) == 0;
    if (drop) continue;
    remap[i] = int(out.nodes.size());
    out.nodes.push_back(v);
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

inline std::unique_ptr<Scheduler> make_experiment_scheduler(
    const ExperimentConfig& cfg) {
  if (cfg.scheduler.rfind("trace:", 0) == 0) {
    std::ifstream is(cfg.scheduler.substr(6));
    if (!is) throw std::invalid_argument("cannot open trace file: " +
                                         cfg.scheduler.substr(6));
    Trace trace = parse_trace(is);
    if (trace.n != cfg.n)
      throw std::invalid_argument("trace is for a different process count");
    return std::make_unique<TraceScheduler>(std::move(trace));
  }
  std::string spec =
      cfg.scheduler == "random-connected" ? "random" : cfg.scheduler;
  return make_scheduler(spec, cfg.n, cfg.seed);
}

// --- Runner ----------------------------------------------------------------------

namespace detail {

class ViolationLog {
 public:
  void add(std::vector<Violation>& out, const std::string& check,
           std::int64_t round, const std::string& detail) {
    auto it = index_.find(check);
    if (it != index_.end()) {
      ++out[it->second].count;
      return;
    }
    index_[check] = out.size();
    out.push_back({check, round, detail, 1});
  }

 private:
  std::map<std::string, std::size_t> index_;
};

inline bool constructive(PhaseKind p) {
  return p == PhaseKind::BeginRound || p == PhaseKind::VhtBroadcast ||
         p == PhaseKind::AckBroadcast;
}

// "Non-error" in the agreement sense: the constructive main flow only. The
// wait and reset phases live inside the error-handling path and may carry
// stale estimates (a process can sit out a whole reset era in its error loop
// and join a later flood with an ancient value); fresh estimates are adopted
// only at the simultaneous rewind.
inline bool non_error(PhaseKind p) { return constructive(p); }

inline std::vector<std::int64_t> chain_ids(const HistoryTree& t, std::int64_t id) {
  std::vector<std::int64_t> out;
  int v = t.find_id(id);
  while (v > 0) {
    out.push_back(t.nodes[v].id);
    v = t.nodes[v].parent;
  }
  return out;
}

// Topology with the last process cut off; the rest stays connected.
inline RoundTopology cut_topology(int n) {
  RoundTopology t;
  t.n = n;
  for (int i = 0; i + 2 < n; ++i) t.add(i, i + 1);
  t.normalize();
  return t;
}

class ExperimentRunner {
 public:
  explicit ExperimentRunner(const ExperimentConfig& cfg) : cfg_(cfg) {
    if (cfg_.n < 1) throw std::invalid_argument("process count must be >= 1");
    spec_ = parse_mode(cfg_.mode);
    if (spec_.mode == Mode::Generalized) {
      if (cfg_.inputs.empty())
        cfg_.inputs = derive_inputs(cfg_.n, cfg_.seed);
      if (int(cfg_.inputs.size()) != cfg_.n - 1)
        throw std::invalid_argument("need one input per non-leader");
    }
    if (cfg_.fault_cut && cfg_.n < 2)
      throw std::invalid_argument("fault injection needs a process to cut off");
    budget_ = cfg_.round_budget > 0
                  ? cfg_.round_budget
                  : default_round_budget(cfg_.n) * spec_.block;
  }

  RunResult run() {
    return spec_.block > 1 ? run_blocked() : run_direct();
  }

 private:
  // Ground-truth L_0 labels for the ideal tree.
  std::vector<std::int64_t> input_labels() const {
    std::vector<std::int64_t> labels(cfg_.n, 0);
    labels[0] = kLeaderInput;
    if (spec_.mode == Mode::Generalized)
      for (int i = 1; i < cfg_.n; ++i) labels[i] = cfg_.inputs[i - 1];
    return labels;
  }

  std::map<std::int64_t, std::int64_t> expected_values() const {
    std::map<std::int64_t, std::int64_t> m;
    for (auto v : cfg_.inputs) ++m[v];
    return m;
  }

  void note_message(RunResult& res, const Message& m) {
    res.metrics.max_msg_bits =
        std::max(res.metrics.max_msg_bits, std::int64_t(bit_size(m)));
    for (int k = 0; k < param_count(m.label); ++k)
      res.metrics.max_param = std::max(res.metrics.max_param, m.p[k]);
  }

  void end_of_run_checks(RunResult& res) {
    int n = cfg_.n;
    std::int64_t reset_bound =
        std::int64_t(std::log2(double(std::max(n, 1)))) + 3;
    if (res.metrics.resets > reset_bound)
      log_.add(res.violations, "l:maxdiam", res.metrics.rounds,
               "resets " + std::to_string(res.metrics.resets) + " > " +
                   std::to_string(reset_bound));
    std::int64_t bit_bound = 3 + 3 * varint_bits(res.metrics.max_param);
    if (res.metrics.max_msg_bits > bit_bound)
      log_.add(res.violations, "c:msize", res.metrics.rounds,
               "message of " + std::to_string(res.metrics.max_msg_bits) +
                   " bits exceeds " + std::to_string(bit_bound));
    std::int64_t param_bound = 64;
    for (int k = 0; k < 4; ++k) param_bound *= n;
    if (res.metrics.max_param > param_bound)
      log_.add(res.violations, "c:msize", res.metrics.rounds,
               "parameter " + std::to_string(res.metrics.max_param) +
                   " exceeds " + std::to_string(param_bound));
  }

  // ---- direct modes (every round connected) -------------------------------

  RunResult run_direct() {
    const int n = cfg_.n;
    RunResult res;
    res.config = cfg_;
    res.output_rounds.assign(n, -1);

    std::vector<ProcessAutomaton> fleet;
    for (int i = 0; i < n; ++i)
      fleet.emplace_back(i == 0, spec_.mode,
                         i == 0 || spec_.mode != Mode::Generalized
                             ? 0
                             : cfg_.inputs[i - 1]);
    auto sched = make_experiment_scheduler(cfg_);

    // Recording state for the ideal-tree reconstruction.
    std::vector<RoundTopology> ideal_rounds;
    struct Pending {
      bool valid = false;
      std::int64_t round = 0;
      RoundTopology topo;
      std::vector<std::int64_t> ids;
    } pending;
    std::set<std::int64_t> held_l0;
    for (int i = 0; i < n; ++i) held_l0.insert(i == 0 ? 0 : 1);
    std::set<std::int64_t> leader_ids = {0};

    std::int64_t prev_finalized = 0, prev_rewinds = 0;
    PhaseKind prev_leader_phase = PhaseKind::BeginRound;
    bool final_era = false;       // simultaneous: announcement is out
    bool completeness_gap = false;
    bool cutting = false, cut_done = false;

    std::vector<std::vector<Message>> in(n);
    bool finished = false;
    std::int64_t round = 1;
    for (; round <= budget_; ++round) {
      std::vector<std::optional<Message>> out(n);
      for (int i = 0; i < n; ++i) out[i] = fleet[i].on_round(in[i]);

      ProcessAutomaton& L = fleet[0];
      for (int i = 0; i < n; ++i) {
        if (out[i]) note_message(res, *out[i]);
        res.metrics.max_diam_estimate =
            std::max(res.metrics.max_diam_estimate, fleet[i].diam_estimate());
        if (!out[i] && fleet[i].output() && res.output_rounds[i] < 0)
          res.output_rounds[i] = round;
      }
      leader_ids.insert(L.my_id());

      // A rewind discards the levels the reset deleted; the recorded virtual
      // rounds and the leader's identity chain shrink with them.
      if (L.rewinds() > prev_rewinds) {
        prev_rewinds = L.rewinds();
        int depth = std::max(L.vht().depth(), 0);
        if (int(ideal_rounds.size()) > depth) ideal_rounds.resize(depth);
        if (res.ideal_records.size() > ideal_rounds.size())
          res.ideal_records.resize(ideal_rounds.size());
        leader_ids.clear();
        leader_ids.insert(L.my_id());
        for (auto id : chain_ids(L.vht(), L.my_id())) leader_ids.insert(id);
        pending.valid = false;
      }

      // Error handling just began: keep the partially built tree around as a
      // fault-era specimen.
      if (cfg_.check_invariants && L.phase() == PhaseKind::LeaderWait &&
          prev_leader_phase != PhaseKind::LeaderWait) {
        FaultSnapshot snap;
        snap.tree = L.vht();
        snap.round = round;
        for (int i = 0; i < int(snap.tree.nodes.size()); ++i)
          if (leader_ids.count(snap.tree.nodes[i].id) &&
              (snap.anchor < 0 ||
               snap.tree.nodes[i].level > snap.tree.nodes[snap.anchor].level))
            snap.anchor = i;
        if (snap.anchor >= 0) res.fault_snapshots.push_back(std::move(snap));
      }
      prev_leader_phase = L.phase();

      if (L.levels_finalized() > prev_finalized) {
        prev_finalized = L.levels_finalized();
        bool clean = L.terminated() || L.phase() == PhaseKind::BeginRound ||
                     L.phase() == PhaseKind::FinalFlood;
        if (clean) {
          std::int64_t stage = L.current_level();
          if (L.phase() == PhaseKind::BeginRound) stage -= 1;
          on_finalization(res, fleet, stage, round, pending, ideal_rounds,
                          held_l0, completeness_gap);
        }
      }

      // Termination.
      if (spec_.mode == Mode::Simultaneous) {
        if (L.phase() == PhaseKind::FinalFlood) final_era = true;
        int done = 0;
        for (int i = 0; i < n; ++i)
          if (!out[i]) ++done;
        if (done == n) {
          res.metrics.rounds = round;
          finished = true;
          break;
        }
        if (done > 0)
          log_.add(res.violations, "simultaneity", round,
                   "some processes left while others are still running");
      } else if (!out[0]) {
        res.metrics.rounds = round;
        finished = true;
        break;
      }

      if (cfg_.check_invariants && !final_era)
        round_monitors(res, fleet, round);

      // Topology for this round, with the scripted cut when requested.
      RoundTopology topo = sched->round(int(round));
      if (cfg_.fault_cut && !cut_done) {
        bool ack = L.phase() == PhaseKind::AckBroadcast;
        if (!cutting && ack && round >= cfg_.fault_cut_after_round)
          cutting = true;
        if (cutting && !ack) {
          cutting = false;
          cut_done = true;
        }
        if (cutting) topo = cut_topology(n);
      }

      if (L.phase() == PhaseKind::BeginRound) {
        pending.valid = true;
        pending.round = round;
        pending.topo = topo;
        pending.ids.assign(n, 0);
        for (int i = 0; i < n; ++i) pending.ids[i] = fleet[i].my_id();
      }

      std::vector<Message> msgs(n, Message::null());
      for (int i = 0; i < n; ++i)
        if (out[i]) msgs[i] = *out[i];
      in = deliver(topo, msgs);
    }

    if (!finished) {
      res.timed_out = true;
      res.metrics.rounds = budget_;
    }

    const ProcessAutomaton& L = fleet[0];
    res.effective = L.vht();
    res.metrics.resets = L.resets_initiated();
    res.metrics.distinct_red_edges =
        L.vht().distinct_red_edges(L.vht().depth());
    res.output_level = L.current_level();
    if (L.output()) {
      res.count = L.output()->count;
      res.values = L.output()->values;
    }

    res.correct = evaluate_output(res, fleet);
    if (!res.correct && !res.timed_out && res.count)
      log_.add(res.violations, "soundness", res.metrics.rounds,
               "output does not match the ground truth");
    if (completeness_gap)
      log_.add(res.violations, "completeness", res.metrics.rounds,
               "no output although the tree spans " +
                   std::to_string(3 * cfg_.n) + " levels");
    end_of_run_checks(res);
    return res;
  }

  bool evaluate_output(const RunResult& res,
                       const std::vector<ProcessAutomaton>& fleet) const {
    if (res.timed_out || !res.count) return false;
    if (*res.count != cfg_.n) return false;
    if (spec_.mode == Mode::Generalized && res.values != expected_values())
      return false;
    if (spec_.mode == Mode::Simultaneous) {
      for (int i = 0; i < cfg_.n; ++i) {
        if (res.output_rounds[i] != res.output_rounds[0]) return false;
        if (!fleet[i].output() || fleet[i].output()->count != cfg_.n)
          return false;
      }
    }
    return true;
  }

  template <typename Pending>
  void on_finalization(RunResult& res, std::vector<ProcessAutomaton>& fleet,
                       std::int64_t stage, std::int64_t round, Pending& pending,
                       std::vector<RoundTopology>& ideal_rounds,
                       std::set<std::int64_t>& held_l0,
                       bool& completeness_gap) {
    const int n = cfg_.n;
    ProcessAutomaton& L = fleet[0];
    std::int64_t t = L.stage_tree_level(stage);

    if (t >= 1) {
      if (!pending.valid) {
        log_.add(res.violations, "internal", round,
                 "level finalized without a recorded begin round");
        return;
      }
      // The auxiliary graph must have grown into a spanning tree of the
      // previous level's occupied classes by the time the level closes.
      // (The tree may hold vestigial classes nobody sits on; they stay
      // isolated and play no part in the construction.)
      const LevelGraph& s = L.level_graph();
      std::set<std::int64_t> occupied(pending.ids.begin(), pending.ids.end());
      bool span = s.acyclic() && s.edges.size() + 1 == occupied.size();
      for (auto id : occupied)
        if (std::find(s.ids.begin(), s.ids.end(), id) == s.ids.end())
          span = false;
      for (const auto& [a, b] : s.edges)
        if (!occupied.count(a) || !occupied.count(b)) span = false;
      if (!span)
        log_.add(res.violations, "levelgraph", round,
                 "finalized level graph is not a spanning tree of the "
                 "occupied classes");
      RoundTopology nt = build_virtual_round(pending.topo, pending.ids, s);
      if (!is_connected(nt))
        log_.add(res.violations, "n_t_connected", round,
                 "virtual round " + std::to_string(t) + " is disconnected");
      if (int(ideal_rounds.size()) != t - 1) {
        log_.add(res.violations, "internal", round,
                 "virtual round records out of step with the tree depth");
        ideal_rounds.resize(std::size_t(std::max<std::int64_t>(t - 1, 0)));
        res.ideal_records.resize(ideal_rounds.size());
      }
      ideal_rounds.push_back(nt);
      res.ideal_records.push_back(
          {t, pending.round, pending.topo, pending.ids, s, nt});
    } else {
      // Input stage finalized: processes now sit on their value classes.
      held_l0.clear();
      for (int i = 0; i < n; ++i)
        if (constructive(fleet[i].phase()) || fleet[i].terminated())
          held_l0.insert(fleet[i].my_id());
    }

    GroundTruth gt = build_ground_truth(n, ideal_rounds, input_labels());
    res.ideal = gt.tree;

    HistoryTree eff = drop_vestigial_l0(L.vht(), held_l0);
    if (!is_generalized_view_of(eff, gt.tree))
      log_.add(res.violations, "l:vhtcorr", round,
               "effective tree does not embed into the ideal tree at level " +
                   std::to_string(t));

    int anchor = L.vht().find_id(L.my_id());
    if (anchor >= 0 && t >= 0 && t < int(gt.node_of.size())) {
      View lv = extract_view(L.vht(), anchor);
      res.finalization_views.push_back(lv);
      View iv = extract_view(gt.tree, gt.node_of[std::size_t(t)][0]);
      if (!is_isomorphic(lv.tree, iv.tree))
        log_.add(res.violations, "c:vhtcorr", round,
                 "leader view differs from its ideal view at level " +
                     std::to_string(t));
    }

    RedEdgeSplit red = split_red_edges(gt.tree, int(t));
    if (red.cross > 2LL * n * (t + n))
      log_.add(res.violations, "l:vhtsize", round,
               "ideal tree holds " + std::to_string(red.cross) +
                   " cross-class red edges in " + std::to_string(t) +
                   " levels (bound " + std::to_string(2LL * n * (t + n)) +
                   ")");
    if (red.parent > std::int64_t(n) * t)
      log_.add(res.violations, "l:vhtsize", round,
               "ideal tree holds " + std::to_string(red.parent) +
                   " parent red edges in " + std::to_string(t) +
                   " levels (bound " + std::to_string(std::int64_t(n) * t) +
                   ")");
    for (std::size_t vi = 0; vi < gt.tree.nodes.size(); ++vi) {
      const HistoryTree::Node& v = gt.tree.nodes[vi];
      if (v.level < 1 || v.level > t) continue;
      if (gt.tree.red_mult(int(vi), v.parent) != 2) {
        log_.add(res.violations, "c_v_pair", round,
                 "ideal node " + std::to_string(vi) + " at level " +
                     std::to_string(v.level) +
                     " lacks the multiplicity-2 red edge to its parent");
        break;
      }
    }

    if (spec_.mode == Mode::Basic && t >= 3 * n && !L.terminated())
      completeness_gap = true;
  }

  void round_monitors(RunResult& res, const std::vector<ProcessAutomaton>& fleet,
                      std::int64_t round) {
    const int n = cfg_.n;

    // Estimate agreement across everything that is not flooding errors.
    std::int64_t diam = -1;
    for (const auto& p : fleet) {
      if (!non_error(p.phase())) continue;
      if (diam < 0) diam = p.diam_estimate();
      if (p.diam_estimate() != diam) {
        log_.add(res.violations, "l:diam", round,
                 "estimates " + std::to_string(diam) + " and " +
                     std::to_string(p.diam_estimate()) + " coexist");
        break;
      }
    }

    for (const auto& p : fleet)
      if (p.diam_estimate() > 4 * n) {
        log_.add(res.violations, "l:maxdiam", round,
                 "estimate " + std::to_string(p.diam_estimate()) + " > " +
                     std::to_string(4 * n));
        break;
      }

    // Phase lockstep with the leader.
    PhaseKind lp = fleet[0].phase();
    if (constructive(lp) || lp == PhaseKind::ResetFlood) {
      for (int i = 1; i < n; ++i) {
        PhaseKind p = fleet[i].phase();
        if (p == PhaseKind::ErrorLoop) continue;
        if (p != lp) {
          log_.add(res.violations, "l:phases", round,
                   std::string("leader in ") + phase_name(lp) + ", process " +
                       std::to_string(i) + " in " + phase_name(p));
          break;
        }
      }
    }

    // Variable agreement across the processes actively constructing.
    int ref = -1;
    for (int i = 0; i < n; ++i) {
      if (!constructive(fleet[i].phase())) continue;
      if (ref < 0) {
        ref = i;
        continue;
      }
      const auto& a = fleet[ref];
      const auto& b = fleet[i];
      const char* what = nullptr;
      if (a.current_level() != b.current_level()) what = "CurrentLevel";
      else if (a.next_fresh_id() != b.next_fresh_id()) what = "NextFreshID";
      else if (!(a.vht() == b.vht())) what = "VHT";
      else if (!(a.temp_vht() == b.temp_vht())) what = "TempVHT";
      else if (!(a.level_graph() == b.level_graph())) what = "LevelGraph";
      if (what) {
        log_.add(res.violations, "c:totalagree", round,
                 std::string(what) + " differs between processes " +
                     std::to_string(ref) + " and " + std::to_string(i));
        break;
      }
    }

    // The auxiliary graph never holds a cycle.
    for (int i = 0; i < n; ++i)
      if (constructive(fleet[i].phase()) && !fleet[i].level_graph().acyclic()) {
        log_.add(res.violations, "levelgraph", round,
                 "cycle in the level graph of process " + std::to_string(i));
        break;
      }
  }

  // ---- block mode (connected only in unions of T rounds) ------------------

  RunResult run_blocked() {
    const int n = cfg_.n;
    RunResult res;
    res.config = cfg_;
    res.output_rounds.assign(n, -1);

    std::vector<TUnionAutomaton> fleet;
    for (int i = 0; i < n; ++i)
      fleet.emplace_back(spec_.block, ProcessAutomaton(i == 0));
    auto sched = make_experiment_scheduler(cfg_);

    std::vector<std::vector<Message>> in(n);
    bool finished = false;
    for (std::int64_t round = 1; round <= budget_; ++round) {
      std::vector<std::optional<Message>> out(n);
      for (int i = 0; i < n; ++i) out[i] = fleet[i].on_round(in[i]);
      for (int i = 0; i < n; ++i) {
        if (out[i]) note_message(res, *out[i]);
        res.metrics.max_diam_estimate = std::max(
            res.metrics.max_diam_estimate, fleet[i].inner().diam_estimate());
        if (!out[i] && fleet[i].output() && res.output_rounds[i] < 0)
          res.output_rounds[i] = round;
      }
      if (!out[0]) {
        res.metrics.rounds = round;
        finished = true;
        break;
      }
      for (const auto& p : fleet)
        if (p.inner().diam_estimate() > 4 * n)
          log_.add(res.violations, "l:maxdiam", round, "estimate above bound");
      std::vector<Message> msgs(n, Message::null());
      for (int i = 0; i < n; ++i)
        if (out[i]) msgs[i] = *out[i];
      in = deliver(sched->round(int(round)), msgs);
    }
    if (!finished) {
      res.timed_out = true;
      res.metrics.rounds = budget_;
    }
    const ProcessAutomaton& L = fleet[0].inner();
    res.effective = L.vht();
    res.metrics.resets = L.resets_initiated();
    res.metrics.distinct_red_edges =
        L.vht().distinct_red_edges(L.vht().depth());
    res.output_level = L.current_level();
    if (L.output()) res.count = L.output()->count;
    res.correct = !res.timed_out && res.count && *res.count == n;
    end_of_run_checks(res);
    return res;
  }

  ExperimentConfig cfg_;
  ModeSpec spec_;
  std::int64_t budget_ = 0;
  ViolationLog log_;
};

}  // namespace detail

inline RunResult run_experiment(const ExperimentConfig& cfg) {
  detail::ExperimentRunner runner(cfg);
  return runner.run();
}

// Runs the cross product of process counts and seeds; rows come back in
// deterministic (n, seed) order.
inline std::vector<RunResult> sweep(const ExperimentConfig& base,
                                    const std::vector<int>& ns,
                                    const std::vector<std::uint64_t>& seeds) {
  std::vector<RunResult> rows;
  for (int n : ns)
    for (std::uint64_t seed : seeds) {
      ExperimentConfig cfg = base;
      cfg.n = n;
      cfg.seed = seed;
      cfg.inputs.clear();  // re-derive per cell in generalized mode
      rows.push_back(run_experiment(cfg));
    }
  return rows;
}

// --- CSV -------------------------------------------------------------------------

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string csv_header() {
  return "n,seed,scheduler,mode,rounds,resets,max_diam_estimate,"
         "distinct_red_edges,max_msg_bits,max_param,output,correct";
}

inline std::string csv_row(const RunResult& r) {
  std::ostringstream os;
  os << r.config.n << ',' << r.config.seed << ','
     << csv_field(r.config.scheduler) << ',' << csv_field(r.config.mode) << ','
     << r.metrics.rounds << ',' << r.metrics.resets << ','
     << r.metrics.max_diam_estimate << ',' << r.metrics.distinct_red_edges
     << ',' << r.metrics.max_msg_bits << ',' << r.metrics.max_param << ',';
  if (r.timed_out)
    os << "timeout";
  else if (r.count)
    os << *r.count;
  else
    os << "none";
  os << ',' << (r.correct ? "true" : "false");
  return os.str();
}

}  // namespace adnet
