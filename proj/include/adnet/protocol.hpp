#pragma once
// Per-process state machine for counting in congested anonymous dynamic
// networks. Processes cooperatively build a history tree of a *virtual*
// network one level per stage: a begin round collects neighbor observations,
// then repeated broadcast/acknowledgment phases publish one red edge at a
// time, with an error/reset subsystem that detects failed broadcasts and
// restarts the level with a doubled diameter estimate.
//
// The blocking send/receive structure is re-expressed as a round-driven
// automaton: each on_round call consumes the previous round's delivery and
// returns the next outgoing message.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "adnet/counting.hpp"
#include "adnet/history_tree.hpp"
#include "adnet/message.hpp"

namespace adnet {

enum class Mode {
  Basic,         // leader alone outputs the count
  Simultaneous,  // every process outputs the count in the same round
  Generalized,   // leader outputs the multiset of non-leader inputs
};

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Basic: return "basic";
    case Mode::Simultaneous: return "simultaneous";
    case Mode::Generalized: return "generalized";
  }
  return "?";
}

enum class PhaseKind {
  BeginRound,    // sent Begin, waiting for the level's observation inbox
  VhtBroadcast,  // relaying the construction broadcast
  AckBroadcast,  // relaying the leader's acknowledgment
  ErrorLoop,     // flooding an Error until a Reset arrives
  LeaderWait,    // leader quiescing so everyone reaches the error loop
  ResetFlood,    // forwarding a Reset until its final round
  FinalFlood,    // forwarding the termination announcement
  Terminated,
};

inline const char* phase_name(PhaseKind p) {
  switch (p) {
    case PhaseKind::BeginRound: return "begin";
    case PhaseKind::VhtBroadcast: return "vht";
    case PhaseKind::AckBroadcast: return "ack";
    case PhaseKind::ErrorLoop: return "error";
    case PhaseKind::LeaderWait: return "wait";
    case PhaseKind::ResetFlood: return "reset";
    case PhaseKind::FinalFlood: return "final";
    case PhaseKind::Terminated: return "terminated";
  }
  return "?";
}

// Placeholder input of the initial non-leader node in generalized mode; no
// real input value may collide with it (inputs are non-negative).
inline constexpr std::int64_t kVacantInput = -2;

// Scaffolding for the level under construction: a forest whose roots copy the
// previous tree level. Each accepted edge broadcast grows one child, carrying
// the red edge that created it (toward the root of the observed class).
struct TempForest {
  struct Node {
    std::int64_t id = -1;
    int parent = -1;   // forest index; -1 for roots
    int red_src = -1;  // forest index of the observed root; -1 for roots
    std::int64_t red_mult = 0;
    friend bool operator==(const Node&, const Node&) = default;
  };
  std::vector<Node> nodes;
  friend bool operator==(const TempForest&, const TempForest&) = default;

  int find(std::int64_t id) const {
    for (int i = 0; i < int(nodes.size()); ++i)
      if (nodes[i].id == id) return i;
    return -1;
  }
  int root_of(int idx) const {
    while (nodes[idx].parent >= 0) idx = nodes[idx].parent;
    return idx;
  }
};

// Simple graph on the previous level's IDs; grows into the spanning tree that
// selects which cross-class links enter the virtual network.
struct LevelGraph {
  std::vector<std::int64_t> ids;
  std::set<std::pair<std::int64_t, std::int64_t>> edges;
  friend bool operator==(const LevelGraph&, const LevelGraph&) = default;

  static std::pair<std::int64_t, std::int64_t> key(std::int64_t a, std::int64_t b) {
    return {std::min(a, b), std::max(a, b)};
  }
  bool has_edge(std::int64_t a, std::int64_t b) const { return edges.count(key(a, b)) > 0; }
  void add_edge(std::int64_t a, std::int64_t b) { edges.insert(key(a, b)); }

  // True if a and b are already joined by a path.
  bool connected(std::int64_t a, std::int64_t b) const {
    if (a == b) return true;
    std::map<std::int64_t, std::int64_t> up;
    for (std::int64_t v : ids) up[v] = v;
    auto find = [&](std::int64_t x) {
      while (up.count(x) && up[x] != x) x = up[x] = up[up[x]];
      return x;
    };
    for (const auto& [u, v] : edges) up[find(u)] = find(v);
    return up.count(a) && up.count(b) && find(a) == find(b);
  }
  bool acyclic() const {
    std::map<std::int64_t, std::int64_t> up;
    for (std::int64_t v : ids) up[v] = v;
    auto find = [&](std::int64_t x) {
      while (up.count(x) && up[x] != x) x = up[x] = up[up[x]];
      return x;
    };
    for (const auto& [u, v] : edges) {
      std::int64_t ru = find(u), rv = find(v);
      if (ru == rv) return false;
      up[ru] = rv;
    }
    return true;
  }
};

struct ProcessOutput {
  std::int64_t count = 0;
  std::map<std::int64_t, std::int64_t> values;  // generalized mode only
  friend bool operator==(const ProcessOutput&, const ProcessOutput&) = default;
};

class ProcessAutomaton {
 public:
  explicit ProcessAutomaton(bool is_leader, Mode mode = Mode::Basic,
                            std::int64_t input_value = 0)
      : leader_(is_leader), mode_(mode), input_value_(input_value) {
    if (mode == Mode::Generalized && !is_leader && input_value < 0)
      throw std::invalid_argument("generalized inputs must be non-negative");
    my_id_ = leader_ ? 0 : 1;
    vht_ = HistoryTree::with_root();
    vht_.nodes.push_back({0, 0, 0, kLeaderInput, {}});
    vht_.nodes.push_back(
        {0, 0, 1, mode == Mode::Generalized ? kVacantInput : 0, {}});
  }

  // One call per communication round: consumes the previous round's delivery
  // (empty on the first call), then returns this round's outgoing message.
  // Returns nullopt once the process has output and left the network.
  std::optional<Message> on_round(const std::vector<Message>& inbox) {
    if (phase_ == PhaseKind::Terminated) return std::nullopt;
    if (!started_) {
      started_ = true;
      return Message::begin(my_id_);  // phase_ is already BeginRound
    }
    ++current_round_;

    // A termination announcement overrides every phase: forward it until the
    // round stamped inside it plus the count, then output.
    for (const Message& m : inbox)
      if (m.label == Label::Final && phase_ != PhaseKind::FinalFlood) {
        final_msg_ = m;
        phase_ = PhaseKind::FinalFlood;
      }
    if (phase_ == PhaseKind::FinalFlood) {
      if (current_round_ >= final_msg_.p[1] + final_msg_.p[0]) {
        output_ = ProcessOutput{final_msg_.p[0], {}};
        phase_ = PhaseKind::Terminated;
        return std::nullopt;
      }
      return final_msg_;
    }

    switch (phase_) {
      case PhaseKind::BeginRound: return consume_begin(inbox);
      case PhaseKind::VhtBroadcast: return consume_broadcast(inbox, false);
      case PhaseKind::AckBroadcast: return consume_broadcast(inbox, true);
      case PhaseKind::ErrorLoop: return consume_error(inbox);
      case PhaseKind::LeaderWait: return consume_wait();
      case PhaseKind::ResetFlood: return consume_reset(inbox);
      default: return std::nullopt;  // unreachable
    }
  }

  // --- read-only snapshots for monitors --------------------------------
  bool leader() const { return leader_; }
  Mode mode() const { return mode_; }
  PhaseKind phase() const { return phase_; }
  int broadcast_step() const { return step_; }
  std::int64_t my_id() const { return my_id_; }
  std::int64_t next_fresh_id() const { return next_fresh_id_; }
  std::int64_t current_round() const { return current_round_; }
  std::int64_t current_level() const { return current_level_; }
  std::int64_t diam_estimate() const { return diam_; }
  const HistoryTree& vht() const { return vht_; }
  const TempForest& temp_vht() const { return temp_; }
  const LevelGraph& level_graph() const { return lg_; }
  const std::vector<std::pair<std::int64_t, std::int64_t>>& obs_list() const {
    return obs_;
  }
  const std::optional<ProcessOutput>& output() const { return output_; }
  bool terminated() const { return phase_ == PhaseKind::Terminated; }
  std::int64_t resets_initiated() const { return resets_initiated_; }
  std::int64_t rewinds() const { return rewinds_; }
  std::int64_t levels_finalized() const { return levels_finalized_; }

  // Tree level built during the given stage (the input stage of generalized
  // mode builds level 0; everything shifts down by one).
  std::int64_t stage_tree_level(std::int64_t stage) const {
    return mode_ == Mode::Generalized ? stage - 1 : stage;
  }

 private:
  // --- begin round ------------------------------------------------------
  std::optional<Message> consume_begin(const std::vector<Message>& inbox) {
    // Any non-Begin message here means somebody is out of phase; take the
    // loudest offender down the error path.
    const Message* offender = nullptr;
    std::map<std::int64_t, std::int64_t> counts;
    for (const Message& m : inbox) {
      if (m.label != Label::Begin) {
        if (!offender || higher_priority(m, *offender)) offender = &m;
      } else if (m.p[0] != my_id_) {
        ++counts[m.p[0]];
      }
    }
    if (offender) return handle_error(*offender);

    obs_.clear();
    for (const auto& [id, c] : counts) obs_.push_back({id, c});
    obs_.push_back({my_id_, 2});
    std::sort(obs_.begin(), obs_.end());

    temp_.nodes.clear();
    lg_ = LevelGraph{};
    if (input_stage()) {
      obs_.clear();  // the input stage broadcasts values, not observations
    } else {
      for (int idx : vht_.level_nodes(int(stage_tree_level(current_level_)) - 1)) {
        temp_.nodes.push_back({vht_.nodes[idx].id, -1, -1, 0});
        lg_.ids.push_back(vht_.nodes[idx].id);
      }
    }
    return start_vht_broadcast();
  }

  bool input_stage() const {
    return mode_ == Mode::Generalized && current_level_ == 1;
  }

  // --- broadcast phases -------------------------------------------------
  Message make_vht_message() const {
    if (input_stage()) {
      if (leader_) return Message::null();  // the leader's class exists from the start
      for (const auto& n : vht_.nodes)
        if (n.level == 0 && n.input == input_value_) return Message::null();
      return Message::input(input_value_);
    }
    if (!obs_.empty())
      return Message::edge(my_id_, obs_.front().first, obs_.front().second);
    if (vht_.find_id(my_id_) >= 0) return Message::end();
    return Message::done(my_id_);
  }

  std::optional<Message> start_vht_broadcast() {
    phase_ = PhaseKind::VhtBroadcast;
    step_ = 1;
    top_ = make_vht_message();
    return top_;
  }

  std::optional<Message> consume_broadcast(const std::vector<Message>& inbox,
                                           bool ack) {
    for (const Message& m : inbox)
      if (higher_priority(m, top_)) top_ = m;
    if (step_ < diam_) {
      ++step_;
      return top_;
    }
    // Phase complete.
    if (top_.label == Label::Error) return handle_error(top_);
    if (top_.label == Label::Reset) return enter_reset(top_);
    if (!ack) {
      vht_msg_ = top_;
      phase_ = PhaseKind::AckBroadcast;
      step_ = 1;
      top_ = leader_ ? vht_msg_ : Message::null();
      return top_;
    }
    if (!(top_ == vht_msg_)) {
      // The acknowledgment does not match: the broadcast failed somewhere.
      // Only non-leaders ever reach this in a faithful run; the leader would
      // deadlock flooding errors (nobody else issues resets), so it goes
      // straight to the reset path.
      if (leader_) return handle_error(Message::error(current_level_));
      return enter_error_loop(current_level_);
    }
    return apply_accepted(top_);
  }

  std::optional<Message> apply_accepted(const Message& acc) {
    if (input_stage()) {
      if (acc.label == Label::Input) {
        apply_accepted_input(acc.p[0]);
        return start_vht_broadcast();
      }
      if (acc.label == Label::Null) return finalize_stage();
      return defensive_error();  // leaked message from another phase
    }
    switch (acc.label) {
      case Label::Edge:
        if (!update_temp_vht(acc.p[0], acc.p[1], acc.p[2])) return defensive_error();
        return start_vht_broadcast();
      case Label::Done:
        if (!update_vht(acc.p[0])) return defensive_error();
        return start_vht_broadcast();
      case Label::End:
        return finalize_stage();
      default:
        return defensive_error();
    }
  }

  void apply_accepted_input(std::int64_t value) {
    std::int64_t nid = next_fresh_id_++;
    vht_.nodes.push_back({0, 0, nid, value, {}});
    if (!leader_ && input_value_ == value) {
      int mine = vht_.find_id(my_id_);
      if (mine < 0 || vht_.nodes[mine].input != value) my_id_ = nid;
    }
  }

  // --- accepted-update application ---------------------------------------
  bool update_temp_vht(std::int64_t id1, std::int64_t id2, std::int64_t mult) {
    if (mult < 1) return false;
    int node = temp_.find(id1);
    int obs = temp_.find(id2);
    if (node < 0 || obs < 0) return false;
    int root1 = temp_.root_of(node), root2 = temp_.root_of(obs);
    int child = int(temp_.nodes.size());
    temp_.nodes.push_back({next_fresh_id_++, node, root2, mult});
    if (my_id_ == id1) {
      auto it = std::find(obs_.begin(), obs_.end(), std::make_pair(id2, mult));
      if (it != obs_.end()) {
        obs_.erase(it);
        my_id_ = temp_.nodes[child].id;
      }
    }
    std::int64_t a = temp_.nodes[root1].id, b = temp_.nodes[root2].id;
    if (a != b && !lg_.has_edge(a, b)) {
      lg_.add_edge(a, b);
      prevent_cycles();
    }
    return true;
  }

  // Drops observations whose selection would close a cycle in the level
  // graph; pairs whose class edge is already present (or internal to the
  // class) always stay.
  void prevent_cycles() {
    int me = temp_.find(my_id_);
    if (me < 0) return;
    std::int64_t my_root = temp_.nodes[temp_.root_of(me)].id;
    obs_.erase(std::remove_if(obs_.begin(), obs_.end(),
                              [&](const std::pair<std::int64_t, std::int64_t>& p) {
                                if (p.first == my_root) return false;
                                if (lg_.has_edge(my_root, p.first)) return false;
                                return lg_.connected(my_root, p.first);
                              }),
               obs_.end());
  }

  bool update_vht(std::int64_t done_id) {
    int tn = temp_.find(done_id);
    if (tn < 0) return false;
    if (vht_.find_id(done_id) >= 0) return false;  // already finalized
    int troot = temp_.root_of(tn);
    if (tn == troot) return false;  // a bare previous-level copy has no history
    int parent = vht_.find_id(temp_.nodes[troot].id);
    if (parent < 0) return false;
    HistoryTree::Node child;
    child.level = vht_.nodes[parent].level + 1;
    child.parent = parent;
    child.id = done_id;
    for (int it = tn; it != troot; it = temp_.nodes[it].parent) {
      int src = vht_.find_id(temp_.nodes[temp_.nodes[it].red_src].id);
      if (src < 0) return false;
      child.in_red.push_back({src, temp_.nodes[it].red_mult});
    }
    std::sort(child.in_red.begin(), child.in_red.end());
    // Merge duplicate sources (only reachable via faulty broadcasts).
    std::vector<std::pair<int, std::int64_t>> merged;
    for (auto [s, m] : child.in_red) {
      if (!merged.empty() && merged.back().first == s)
        merged.back().second += m;
      else
        merged.push_back({s, m});
    }
    child.in_red = std::move(merged);
    vht_.nodes.push_back(child);
    return true;
  }

  std::optional<Message> finalize_stage() {
    ++levels_finalized_;
    if (leader_) {
      int anchor = vht_.find_id(my_id_);
      if (anchor < 0) return defensive_error();
      View view = extract_view(vht_, anchor);
      CountResult r =
          count_from_view(view.tree, view.anchor, mode_ == Mode::Generalized);
      if (r.kind == CountResult::Kind::Count ||
          r.kind == CountResult::Kind::Multiset) {
        if (mode_ == Mode::Simultaneous) {
          final_msg_ = Message::final(r.count, current_round_);
          phase_ = PhaseKind::FinalFlood;
          return final_msg_;
        }
        output_ = ProcessOutput{r.count, r.values};
        phase_ = PhaseKind::Terminated;
        return std::nullopt;
      }
      // Unknown (or a fault-era malformation): build another level.
    }
    ++current_level_;
    phase_ = PhaseKind::BeginRound;
    return Message::begin(my_id_);
  }

  // --- error/reset subsystem ---------------------------------------------
  std::optional<Message> defensive_error() {
    return handle_error(Message::error(current_level_));
  }

  std::optional<Message> handle_error(const Message& m) {
    if (m.label == Label::Error && m.p[0] < current_level_) current_level_ = m.p[0];
    if (leader_) {
      // Quiesce long enough for every broadcast phase to end in an error
      // loop, then issue the reset.
      phase_ = PhaseKind::LeaderWait;
      step_ = 1;
      wait_total_ = 2 * diam_ + 1;
      return Message::null();
    }
    return enter_error_loop(current_level_);
  }

  std::optional<Message> enter_error_loop(std::int64_t level) {
    phase_ = PhaseKind::ErrorLoop;
    top_ = Message::error(level);
    return top_;
  }

  std::optional<Message> consume_error(const std::vector<Message>& inbox) {
    for (const Message& m : inbox)
      if (higher_priority(m, top_)) top_ = m;
    if (top_.label == Label::Reset) return enter_reset(top_);
    return top_;
  }

  std::optional<Message> consume_wait() {
    // The leader ignores everything while waiting.
    if (step_ < wait_total_) {
      ++step_;
      return Message::null();
    }
    ++resets_initiated_;
    Message reset = Message::reset(current_level_, current_round_, diam_ * 2);
    return enter_reset(reset);
  }

  std::optional<Message> enter_reset(const Message& m) {
    reset_msg_ = m;
    top_ = m;
    phase_ = PhaseKind::ResetFlood;
    if (current_round_ < reset_msg_.p[1] + reset_msg_.p[2]) return top_;
    return perform_rewind();  // stale reset: its window already passed
  }

  std::optional<Message> consume_reset(const std::vector<Message>& inbox) {
    for (const Message& m : inbox)
      if (higher_priority(m, top_)) top_ = m;
    if (current_round_ < reset_msg_.p[1] + reset_msg_.p[2]) return top_;
    return perform_rewind();
  }

  std::optional<Message> perform_rewind() {
    ++rewinds_;
    std::int64_t rl = std::min(reset_msg_.p[0], current_level_);
    if (rl < 1) rl = 1;
    if (mode_ == Mode::Generalized && rl == 1) {
      // Back to before the input stage: only the two initial classes remain.
      my_id_ = leader_ ? 0 : 1;
      vht_.nodes.resize(3);
    } else {
      // Revert to the class held when the target stage began: the ancestor of
      // the current class at the last level that survives.
      std::int64_t cut = stage_tree_level(rl);  // first tree level to delete
      int me = temp_.find(my_id_);
      if (me >= 0) {
        int node = vht_.find_id(temp_.nodes[temp_.root_of(me)].id);
        if (node >= 0) {
          while (vht_.nodes[node].level > cut - 1) node = vht_.nodes[node].parent;
          my_id_ = vht_.nodes[node].id;
        }
      }
      std::size_t keep = vht_.nodes.size();
      while (keep > 0 && vht_.nodes[keep - 1].level >= cut) --keep;
      vht_.nodes.resize(keep);
    }
    current_level_ = rl;
    diam_ = reset_msg_.p[2];
    // Re-derive the fresh-ID counter from the surviving tree. Processes that
    // sat out accepted updates in an error loop hold a stale counter; every
    // survivor of the reset shares the finalized prefix, so this restores the
    // agreement the construction depends on (IDs minted for discarded work
    // get reused, which is safe because the reset flushed every stale
    // broadcast).
    next_fresh_id_ = 2;
    for (const auto& nd : vht_.nodes)
      next_fresh_id_ = std::max(next_fresh_id_, nd.id + 1);
    temp_.nodes.clear();
    lg_ = LevelGraph{};
    obs_.clear();
    phase_ = PhaseKind::BeginRound;
    return Message::begin(my_id_);
  }

  // --- configuration & state ----------------------------------------------
  bool leader_;
  Mode mode_;
  std::int64_t input_value_;

  std::int64_t my_id_ = 1;
  std::int64_t next_fresh_id_ = 2;
  std::int64_t current_round_ = 0;
  HistoryTree vht_;
  std::int64_t current_level_ = 1;  // stage counter (input stage first in generalized mode)
  TempForest temp_;
  std::vector<std::pair<std::int64_t, std::int64_t>> obs_;
  LevelGraph lg_;
  std::int64_t diam_ = 1;

  bool started_ = false;
  PhaseKind phase_ = PhaseKind::BeginRound;
  int step_ = 0;           // sends so far within the current phase
  int wait_total_ = 0;     // sends the leader's wait consists of
  Message top_ = Message::null();
  Message vht_msg_ = Message::null();
  Message reset_msg_ = Message::null();
  Message final_msg_ = Message::null();
  std::optional<ProcessOutput> output_;
  std::int64_t resets_initiated_ = 0;
  std::int64_t rewinds_ = 0;
  std::int64_t levels_finalized_ = 0;
};

// Block wrapper for networks that are only connected in the union of every T
// consecutive rounds: the same message is repeated for T real rounds while
// inboxes accumulate, and the merged inbox is handed to the inner automaton
// as one virtual round.
class TUnionAutomaton {
 public:
  TUnionAutomaton(int T, ProcessAutomaton inner) : T_(T), inner_(std::move(inner)) {
    if (T < 1) throw std::invalid_argument("block size must be >= 1");
  }

  std::optional<Message> on_round(const std::vector<Message>& inbox) {
    if (inner_.terminated()) return std::nullopt;
    if (!started_) {
      started_ = true;
      cur_ = inner_.on_round({});
      sent_in_block_ = 1;
      return cur_;
    }
    buffer_.insert(buffer_.end(), inbox.begin(), inbox.end());
    if (sent_in_block_ == T_) {
      cur_ = inner_.on_round(buffer_);
      buffer_.clear();
      sent_in_block_ = 1;
    } else {
      ++sent_in_block_;
    }
    return cur_;
  }

  const ProcessAutomaton& inner() const { return inner_; }
  bool leader() const { return inner_.leader(); }
  bool terminated() const { return inner_.terminated(); }
  const std::optional<ProcessOutput>& output() const { return inner_.output(); }

 private:
  int T_;
  ProcessAutomaton inner_;
  bool started_ = false;
  int sent_in_block_ = 0;
  std::vector<Message> buffer_;
  std::optional<Message> cur_;
};

}  // namespace adnet
