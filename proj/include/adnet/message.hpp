// Message types exchanged by the counting protocol, their total priority
// order, and the bit-level wire encoding used for congestion accounting.
#pragma once

#include <array>
#include <cassert>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace adnet {

enum class Label : std::uint8_t {
  Null = 0,
  Begin = 1,
  End = 2,
  Done = 3,
  Edge = 4,
  Error = 5,
  Reset = 6,
  Input = 7,  // extension: generalized counting, carries an input value
  Final = 8,  // extension: simultaneous termination, carries (count, round)
};

inline const char* label_name(Label l) {
  switch (l) {
    case Label::Null: return "Null";
    case Label::Begin: return "Begin";
    case Label::End: return "End";
    case Label::Done: return "Done";
    case Label::Edge: return "Edge";
    case Label::Error: return "Error";
    case Label::Reset: return "Reset";
    case Label::Input: return "Input";
    case Label::Final: return "Final";
  }
  return "?";
}

inline int param_count(Label l) {
  switch (l) {
    case Label::Null:
    case Label::End: return 0;
    case Label::Begin:
    case Label::Done:
    case Label::Error:
    case Label::Input: return 1;
    case Label::Final: return 2;
    case Label::Edge:
    case Label::Reset: return 3;
  }
  return 0;
}

struct Message {
  Label label = Label::Null;
  // Parameters in declared order; unused slots stay 0.
  //   Begin(id) / Done(id) / Error(level) / Input(value)
  //   Edge(id1, id2, mult)
  //   Reset(level, starting_round, new_diam)
  //   Final(count, round)
  std::array<std::int64_t, 3> p{0, 0, 0};

  static Message null() { return {}; }
  static Message begin(std::int64_t id) { return {Label::Begin, {id, 0, 0}}; }
  static Message end() { return {Label::End, {0, 0, 0}}; }
  static Message done(std::int64_t id) { return {Label::Done, {id, 0, 0}}; }
  static Message edge(std::int64_t id1, std::int64_t id2, std::int64_t mult) {
    return {Label::Edge, {id1, id2, mult}};
  }
  static Message error(std::int64_t level) { return {Label::Error, {level, 0, 0}}; }
  static Message reset(std::int64_t level, std::int64_t starting_round,
                       std::int64_t new_diam) {
    return {Label::Reset, {level, starting_round, new_diam}};
  }
  static Message input(std::int64_t value) { return {Label::Input, {value, 0, 0}}; }
  static Message final(std::int64_t count, std::int64_t round) {
    return {Label::Final, {count, round, 0}};
  }

  friend bool operator==(const Message& a, const Message& b) {
    return a.label == b.label && a.p == b.p;
  }
  friend bool operator!=(const Message& a, const Message& b) { return !(a == b); }
};

// Priority rank of the label class. Error and Reset interleave by level and are
// handled separately; both map to the same class rank here.
inline int priority_class(Label l) {
  switch (l) {
    case Label::Null: return 0;
    case Label::Begin: return 1;
    case Label::Input: return 2;  // between Begin and End, per the input phase
    case Label::End: return 3;
    case Label::Done: return 4;
    case Label::Edge: return 5;
    case Label::Error:
    case Label::Reset: return 6;
    case Label::Final: return 7;  // outranks everything, ends the execution
  }
  return -1;
}

// Three-way priority comparison: returns <0 if a has lower priority than b,
// 0 if equal, >0 if higher. Total on all messages.
//
// Within a class, smaller parameters mean higher priority: Done by ID, Edge by
// lexicographic (ID1, ID2, Mult), Input by value. Error(k) and Reset(k)
// interleave as ... < Reset(k+1) < Error(k) < Reset(k) < Error(k-1) < ...
inline int priority_compare(const Message& a, const Message& b) {
  int ca = priority_class(a.label), cb = priority_class(b.label);
  if (ca != cb) return ca < cb ? -1 : 1;
  auto smaller_wins = [](std::int64_t x, std::int64_t y) {
    return x == y ? 0 : (x < y ? 1 : -1);
  };
  if (ca == 6) {
    // Map Reset(k) -> 2k, Error(k) -> 2k+1; smaller key = higher priority.
    auto key = [](const Message& m) {
      return 2 * m.p[0] + (m.label == Label::Error ? 1 : 0);
    };
    if (int c = smaller_wins(key(a), key(b))) return c;
    // Same label and level; Reset breaks ties on remaining parameters.
    for (int i = 1; i < 3; ++i)
      if (int c = smaller_wins(a.p[i], b.p[i])) return c;
    return 0;
  }
  switch (a.label) {
    case Label::Null:
    case Label::Begin:  // all Begin messages share one priority
    case Label::End:
      return 0;
    case Label::Done:
    case Label::Input:
      return smaller_wins(a.p[0], b.p[0]);
    case Label::Edge:
    case Label::Final:
      for (int i = 0; i < 3; ++i)
        if (int c = smaller_wins(a.p[i], b.p[i])) return c;
      return 0;
    default:
      return 0;
  }
}

inline bool higher_priority(const Message& a, const Message& b) {
  return priority_compare(a, b) > 0;
}

// Returns the higher-priority message; on ties keeps the first argument
// (a flooding process only replaces its value on strictly higher priority).
inline const Message& max_priority(const Message& a, const Message& b) {
  return higher_priority(b, a) ? b : a;
}

inline std::string to_string(const Message& m) {
  std::string s = label_name(m.label);
  int np = param_count(m.label);
  if (np > 0) {
    s += '(';
    for (int i = 0; i < np; ++i) {
      if (i) s += ',';
      s += std::to_string(m.p[i]);
    }
    s += ')';
  }
  return s;
}

// --- Wire encoding ---------------------------------------------------------
//
// A message is a 3-bit label code followed by its parameters as base-128
// varints (7 payload bits + 1 continuation bit per group, least significant
// group first). Bits are packed MSB-first into bytes; the final partial byte
// is zero-padded. Codes 0..6 are the core labels; code 7 is the extension
// escape, followed by a varint subcode (0 = Input, 1 = Final) and parameters.

inline int wire_code(Label l) {
  switch (l) {
    case Label::Null: return 0;
    case Label::Begin: return 1;
    case Label::End: return 2;
    case Label::Done: return 3;
    case Label::Edge: return 4;
    case Label::Error: return 5;
    case Label::Reset: return 6;
    case Label::Input:
    case Label::Final: return 7;
  }
  return 0;
}

// Number of bits a varint encoding of v occupies (whole 8-bit groups).
inline int varint_bits(std::uint64_t v) {
  int groups = 1;
  while (v >= 128) {
    v >>= 7;
    ++groups;
  }
  return 8 * groups;
}

struct BitWriter {
  std::vector<std::uint8_t> bytes;
  int bits = 0;

  void push_bit(int b) {
    if (bits % 8 == 0) bytes.push_back(0);
    if (b) bytes.back() |= std::uint8_t(1u << (7 - bits % 8));
    ++bits;
  }
  void push_bits(std::uint64_t v, int n) {
    for (int i = n - 1; i >= 0; --i) push_bit(int((v >> i) & 1));
  }
  void push_varint(std::uint64_t v) {
    do {
      std::uint8_t group = v & 0x7f;
      v >>= 7;
      push_bits(std::uint8_t(group | (v ? 0x80 : 0)), 8);
    } while (v);
  }
};

struct BitReader {
  const std::vector<std::uint8_t>* bytes;
  int nbits;
  int pos = 0;

  std::optional<int> read_bit() {
    if (pos >= nbits) return std::nullopt;
    int byte = pos / 8, off = pos % 8;
    ++pos;
    return ((*bytes)[byte] >> (7 - off)) & 1;
  }
  std::optional<std::uint64_t> read_bits(int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      auto b = read_bit();
      if (!b) return std::nullopt;
      v = (v << 1) | std::uint64_t(*b);
    }
    return v;
  }
  std::optional<std::uint64_t> read_varint() {
    std::uint64_t v = 0;
    for (int shift = 0;; shift += 7) {
      auto g = read_bits(8);
      if (!g || shift > 56) return std::nullopt;
      v |= (*g & 0x7f) << shift;
      if (!(*g & 0x80)) return v;
    }
  }
};

struct Encoded {
  std::vector<std::uint8_t> bytes;
  int bits = 0;

  std::string hex() const {
    static const char* d = "0123456789abcdef";
    std::string s;
    for (auto b : bytes) {
      s += d[b >> 4];
      s += d[b & 0xf];
    }
    return s;
  }
};

inline Encoded encode(const Message& m) {
  assert(m.p[0] >= 0 && m.p[1] >= 0 && m.p[2] >= 0);
  BitWriter w;
  w.push_bits(std::uint64_t(wire_code(m.label)), 3);
  if (m.label == Label::Input) w.push_varint(0);
  if (m.label == Label::Final) w.push_varint(1);
  for (int i = 0; i < param_count(m.label); ++i)
    w.push_varint(std::uint64_t(m.p[i]));
  return {std::move(w.bytes), w.bits};
}

// Bit length of encode(m) without materializing it.
inline int bit_size(const Message& m) {
  int n = 3;
  if (m.label == Label::Input || m.label == Label::Final) n += 8;  // subcode
  for (int i = 0; i < param_count(m.label); ++i)
    n += varint_bits(std::uint64_t(m.p[i]));
  return n;
}

// Decodes a bit string produced by encode(). Fails on unknown extension
// subcodes, varints overrunning the buffer, and nonzero trailing padding.
inline std::optional<Message> decode(const std::vector<std::uint8_t>& bytes,
                                     int nbits) {
  if (nbits < 0 || std::size_t((nbits + 7) / 8) != bytes.size()) return std::nullopt;
  BitReader r{&bytes, nbits};
  auto code = r.read_bits(3);
  if (!code) return std::nullopt;
  Message m;
  if (*code == 7) {
    auto sub = r.read_varint();
    if (!sub) return std::nullopt;
    if (*sub == 0)
      m.label = Label::Input;
    else if (*sub == 1)
      m.label = Label::Final;
    else
      return std::nullopt;
  } else {
    m.label = static_cast<Label>(*code);
  }
  for (int i = 0; i < param_count(m.label); ++i) {
    auto v = r.read_varint();
    if (!v) return std::nullopt;
    m.p[i] = std::int64_t(*v);
  }
  if (r.pos != nbits) return std::nullopt;  // trailing payload bits
  // Zero padding up to the byte boundary is implicit in the length check:
  // nbits must equal the consumed bits exactly, and bytes beyond nbits must
  // be zero for the encoding to be canonical.
  int total = int(bytes.size()) * 8;
  for (int i = nbits; i < total; ++i) {
    if ((bytes[i / 8] >> (7 - i % 8)) & 1) return std::nullopt;
  }
  return m;
}

}  // namespace adnet
