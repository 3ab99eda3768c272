#pragma once

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "zeq/common.hpp"
#include "zeq/window.hpp"

namespace zeq {

// --- base-7 valuation ------------------------------------------------------

/// Value of a digit string (most significant digit first). The empty string
/// has value 0.
inline Int val7(const std::string& w) {
  Int v = 0;
  for (char c : w) {
    if (c < '0' || c > '6') throw ParseError(std::string("bad base-7 digit '") + c + "'");
    v = checkedAdd(checkedMul(v, 7), c - '0');
  }
  return v;
}

/// Canonical base-7 notation without leading zeros; rep7(0) = "0".
inline std::string rep7(Int n) {
  if (n < 0) throw Error("rep7 of a negative number");
  if (n == 0) return "0";
  std::string s;
  while (n > 0) {
    s.push_back(static_cast<char>('0' + n % 7));
    n /= 7;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

// --- binary witnesses over {3,6} --------------------------------------------

/// Strings over {3,6} read as binary numbers: 3 is the zero bit, 6 the one
/// bit, most significant first; the empty string denotes 0.
struct BinaryWitness {
  static Int value(const std::string& x) {
    Int v = 0;
    for (char c : x) {
      if (c != '3' && c != '6') throw ParseError("binary witness digits must be 3 or 6");
      v = checkedAdd(checkedMul(v, 2), c == '6' ? 1 : 0);
    }
    return v;
  }

  /// Shortest encoding of n (no leading 3s except for n = 0, which is "").
  static std::string encode(Int n) {
    if (n < 0) throw Error("binary witness of a negative number");
    std::string s;
    while (n > 0) {
      s.push_back(n % 2 ? '6' : '3');
      n /= 2;
    }
    std::reverse(s.begin(), s.end());
    return s;
  }
};

// --- digit patterns ----------------------------------------------------------
//
// A pattern is a regular set of base-7 digit strings, denoting the set of
// their valuations. Grammar (whitespace insignificant):
//
//   pattern := alt ('\' alt)*
//   alt     := term ('|' term)*
//   term    := atom+
//   atom    := class | class '*' | class '+' | '(' class+ ')' '*'
//   class   := digit | '[' digit+ ']' | 'W'        (W = [0123456])

namespace dfa {

using ClassMask = unsigned;  // bit i set <=> digit i allowed

struct Dfa {
  int start = 0;
  std::vector<std::array<int, 7>> next;  // complete transition table
  std::vector<bool> accept;

  int states() const { return static_cast<int>(next.size()); }

  bool accepts(const std::string& w) const {
    int s = start;
    for (char c : w) {
      if (c < '0' || c > '6') return false;
      s = next[static_cast<std::size_t>(s)][static_cast<std::size_t>(c - '0')];
    }
    return accept[static_cast<std::size_t>(s)];
  }
};

// NFA with epsilon edges, built structurally from the pattern AST.
struct Nfa {
  struct State {
    std::vector<std::pair<ClassMask, int>> edges;
    std::vector<int> eps;
  };
  std::vector<State> st;
  int start = 0, fin = 0;

  int add() {
    st.emplace_back();
    return static_cast<int>(st.size()) - 1;
  }
};

inline Dfa determinize(const Nfa& n) {
  auto closure = [&](std::set<int> s) {
    std::deque<int> q(s.begin(), s.end());
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (int e : n.st[static_cast<std::size_t>(v)].eps)
        if (s.insert(e).second) q.push_back(e);
    }
    return s;
  };
  std::map<std::set<int>, int> ids;
  std::vector<std::set<int>> subsets;
  Dfa d;
  auto intern = [&](const std::set<int>& s) {
    auto it = ids.find(s);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(subsets.size());
    ids.emplace(s, id);
    subsets.push_back(s);
    d.next.push_back({});
    d.accept.push_back(s.count(n.fin) > 0);
    return id;
  };
  d.start = intern(closure({n.start}));
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    for (int c = 0; c < 7; ++c) {
      std::set<int> t;
      for (int v : subsets[i])
        for (auto& [mask, to] : n.st[static_cast<std::size_t>(v)].edges)
          if (mask & (1u << c)) t.insert(to);
      d.next[i][static_cast<std::size_t>(c)] = intern(closure(t));
    }
  }
  return d;
}

/// Moore partition refinement; keeps automata small so the leading-zero
/// padding bound stays tight.
inline Dfa minimize(const Dfa& in) {
  int n = in.states();
  std::vector<int> cls(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) cls[static_cast<std::size_t>(i)] = in.accept[static_cast<std::size_t>(i)] ? 1 : 0;
  for (;;) {
    std::map<std::array<int, 8>, int> sig;
    std::vector<int> next(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      std::array<int, 8> key{};
      key[0] = cls[static_cast<std::size_t>(i)];
      for (int c = 0; c < 7; ++c)
        key[static_cast<std::size_t>(c + 1)] =
            cls[static_cast<std::size_t>(in.next[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)])];
      auto it = sig.emplace(key, static_cast<int>(sig.size())).first;
      next[static_cast<std::size_t>(i)] = it->second;
    }
    if (next == cls) break;
    cls = next;
  }
  int m = 1 + *std::max_element(cls.begin(), cls.end());
  Dfa out;
  out.next.assign(static_cast<std::size_t>(m), {});
  out.accept.assign(static_cast<std::size_t>(m), false);
  for (int i = 0; i < n; ++i) {
    std::size_t ci = static_cast<std::size_t>(cls[static_cast<std::size_t>(i)]);
    out.accept[ci] = in.accept[static_cast<std::size_t>(i)];
    for (int c = 0; c < 7; ++c)
      out.next[ci][static_cast<std::size_t>(c)] =
          cls[static_cast<std::size_t>(in.next[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)])];
  }
  out.start = cls[static_cast<std::size_t>(in.start)];
  return out;
}

enum class BoolOp { And, Or, Diff };

inline Dfa product(const Dfa& a, const Dfa& b, BoolOp op) {
  std::map<std::pair<int, int>, int> ids;
  std::vector<std::pair<int, int>> pairs;
  Dfa d;
  auto intern = [&](std::pair<int, int> p) {
    auto it = ids.find(p);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(pairs.size());
    ids.emplace(p, id);
    pairs.push_back(p);
    d.next.push_back({});
    bool x = a.accept[static_cast<std::size_t>(p.first)];
    bool y = b.accept[static_cast<std::size_t>(p.second)];
    d.accept.push_back(op == BoolOp::And ? (x && y) : op == BoolOp::Or ? (x || y) : (x && !y));
    return id;
  };
  d.start = intern({a.start, b.start});
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (int c = 0; c < 7; ++c) {
      auto [x, y] = pairs[i];
      d.next[i][static_cast<std::size_t>(c)] =
          intern({a.next[static_cast<std::size_t>(x)][static_cast<std::size_t>(c)],
                  b.next[static_cast<std::size_t>(y)][static_cast<std::size_t>(c)]});
    }
  }
  return minimize(d);
}

}  // namespace dfa

/// Cycle/length structure of a compiled pattern; `scaledPowerFamily` is set
/// when the language is exactly {prefix · 0^k : k >= k0}, i.e. the denoted
/// set is {a · 7^k}.
struct DigitDelta {
  std::optional<Int> minLen;  // empty language: no lengths at all
  std::optional<Int> maxLen;  // nullopt = unbounded
  struct Scaled {
    Int base = 0;  // value of the prefix string
    Int k0 = 0;    // zeros start at this count
  };
  std::optional<Scaled> scaledPowerFamily;
};

/// Deterministic automaton over the base-7 digit alphabet, read most
/// significant digit first, denoting the set of valuations of accepted
/// strings. Patterns are N-only constants.
class DigitPattern {
 public:
  DigitPattern() = default;

  static DigitPattern compile(const std::string& src);

  const std::string& source() const { return src_; }
  const dfa::Dfa& automaton() const { return dfa_; }
  const DigitDelta& digitDelta() const { return delta_; }

  bool acceptsString(const std::string& w) const { return dfa_.accepts(w); }

  /// n is denoted iff some representation 0^k rep7(n), 0 <= k <= |states|,
  /// is accepted (the pumping bound makes the padding search complete), or
  /// n = 0 and the empty string is accepted.
  bool member(Int n) const {
    if (n < 0) return false;
    if (n == 0 && dfa_.accept[static_cast<std::size_t>(dfa_.start)]) return true;
    std::string w = rep7(n);
    int s = dfa_.start;
    for (int pad = 0; pad <= dfa_.states(); ++pad) {
      int t = s;
      for (char c : w) t = dfa_.next[static_cast<std::size_t>(t)][static_cast<std::size_t>(c - '0')];
      if (dfa_.accept[static_cast<std::size_t>(t)]) return true;
      s = dfa_.next[static_cast<std::size_t>(s)][0];
    }
    return false;
  }

  /// All denoted values with representations of length <= the window's digit
  /// cap; the result is exact on [0, 7^digitCap - 1].
  WindowSet enumerate(const Window& w) const {
    WindowSet r(w);
    Int cap = w.digitCap();
    std::vector<int> minDist = minAcceptDistance();
    struct Frame {
      int state;
      Int value;
      Int depth;
    };
    std::vector<Frame> stack{{dfa_.start, 0, 0}};
    while (!stack.empty()) {
      Frame f = stack.back();
      stack.pop_back();
      if (dfa_.accept[static_cast<std::size_t>(f.state)] && f.depth > 0 && w.contains(f.value))
        r.set(f.value);
      if (f.depth == 0 && dfa_.accept[static_cast<std::size_t>(f.state)] && w.contains(0))
        r.set(0);  // empty string
      if (f.depth >= cap) continue;
      for (int c = 0; c < 7; ++c) {
        int t = dfa_.next[static_cast<std::size_t>(f.state)][static_cast<std::size_t>(c)];
        if (minDist[static_cast<std::size_t>(t)] > cap - f.depth - 1) continue;
        Int v = f.value * 7 + c;
        if (v > w.hi) continue;
        stack.push_back({t, v, f.depth + 1});
      }
    }
    r.setHorizon(Iv{0, pow7(cap) - 1});
    return r;
  }

  friend DigitPattern patIntersect(const DigitPattern& a, const DigitPattern& b) {
    return combined(a, b, dfa::BoolOp::And, "(" + a.src_ + ") & (" + b.src_ + ")");
  }
  friend DigitPattern patUnion(const DigitPattern& a, const DigitPattern& b) {
    return combined(a, b, dfa::BoolOp::Or, a.src_ + " | " + b.src_);
  }
  friend DigitPattern patDifference(const DigitPattern& a, const DigitPattern& b) {
    return combined(a, b, dfa::BoolOp::Diff, a.src_ + " \\ " + b.src_);
  }

  bool operator==(const DigitPattern& o) const { return src_ == o.src_; }

 private:
  static DigitPattern combined(const DigitPattern& a, const DigitPattern& b, dfa::BoolOp op,
                               std::string src) {
    DigitPattern p;
    p.dfa_ = dfa::product(a.dfa_, b.dfa_, op);
    p.src_ = std::move(src);
    p.computeDelta();
    return p;
  }

  std::vector<int> minAcceptDistance() const {
    const int inf = 1 << 28;
    std::vector<int> dist(static_cast<std::size_t>(dfa_.states()), inf);
    std::deque<int> q;
    for (int i = 0; i < dfa_.states(); ++i)
      if (dfa_.accept[static_cast<std::size_t>(i)]) {
        dist[static_cast<std::size_t>(i)] = 0;
        q.push_back(i);
      }
    // reverse BFS
    std::vector<std::vector<int>> rev(static_cast<std::size_t>(dfa_.states()));
    for (int i = 0; i < dfa_.states(); ++i)
      for (int c = 0; c < 7; ++c) rev[static_cast<std::size_t>(dfa_.next[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)])].push_back(i);
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (int u : rev[static_cast<std::size_t>(v)])
        if (dist[static_cast<std::size_t>(u)] > dist[static_cast<std::size_t>(v)] + 1) {
          dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
          q.push_back(u);
        }
    }
    return dist;
  }

  void computeDelta();

  dfa::Dfa dfa_;
  std::string src_;
  DigitDelta delta_;
};

// --- pattern parser -> NFA -> DFA -------------------------------------------

namespace dfa {

class PatternParser {
 public:
  explicit PatternParser(const std::string& s) : s_(s) {}

  Dfa parse() {
    Nfa n;
    Dfa acc = parseAlt();
    ws();
    while (peek() == '\\') {
      ++i_;
      Dfa rhs = parseAlt();
      acc = product(acc, rhs, BoolOp::Diff);
      ws();
    }
    if (i_ != s_.size()) fail("unexpected input");
    return acc;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("pattern syntax error at position " + std::to_string(i_) + ": " + msg);
  }

  void ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  char peek() {
    ws();
    return i_ < s_.size() ? s_[i_] : '\0';
  }

  bool classStart(char c) const { return (c >= '0' && c <= '6') || c == '[' || c == 'W'; }

  ClassMask parseClass() {
    ws();
    if (i_ >= s_.size()) fail("expected digit class");
    char c = s_[i_];
    if (c >= '0' && c <= '6') {
      ++i_;
      return 1u << (c - '0');
    }
    if (c == 'W') {
      ++i_;
      return 0x7Fu;
    }
    if (c == '[') {
      ++i_;
      ClassMask m = 0;
      while (i_ < s_.size() && s_[i_] != ']') {
        char d = s_[i_];
        if (d < '0' || d > '6') fail("bad digit in class");
        m |= 1u << (d - '0');
        ++i_;
      }
      if (i_ >= s_.size()) fail("unterminated class");
      ++i_;
      if (!m) fail("empty class");
      return m;
    }
    fail("expected digit class");
  }

  // Builds the NFA for one term (a concatenation of atoms).
  void parseTermInto(Nfa& n, int from, int to) {
    int cur = from;
    bool any = false;
    for (;;) {
      char c = peek();
      if (c == '(') {
        ++i_;
        std::vector<ClassMask> group;
        while (classStart(peek())) group.push_back(parseClass());
        if (group.empty()) fail("empty group");
        if (peek() != ')') fail("expected ')'");
        ++i_;
        if (peek() != '*') fail("group must be starred");
        ++i_;
        // (c1 ... ck)* : a loop on the current point
        int hub = n.add();
        n.st[static_cast<std::size_t>(cur)].eps.push_back(hub);
        int p = hub;
        for (std::size_t g = 0; g + 1 < group.size(); ++g) {
          int q = n.add();
          n.st[static_cast<std::size_t>(p)].edges.push_back({group[g], q});
          p = q;
        }
        n.st[static_cast<std::size_t>(p)].edges.push_back({group.back(), hub});
        cur = hub;
        any = true;
      } else if (classStart(c)) {
        ClassMask m = parseClass();
        char suffix = peek();
        if (suffix == '*') {
          ++i_;
          int hub = n.add();
          n.st[static_cast<std::size_t>(cur)].eps.push_back(hub);
          n.st[static_cast<std::size_t>(hub)].edges.push_back({m, hub});
          cur = hub;
        } else if (suffix == '+') {
          ++i_;
          int q = n.add();
          n.st[static_cast<std::size_t>(cur)].edges.push_back({m, q});
          n.st[static_cast<std::size_t>(q)].edges.push_back({m, q});
          cur = q;
        } else {
          int q = n.add();
          n.st[static_cast<std::size_t>(cur)].edges.push_back({m, q});
          cur = q;
        }
        any = true;
      } else {
        break;
      }
    }
    if (!any) fail("expected atom");
    n.st[static_cast<std::size_t>(cur)].eps.push_back(to);
  }

  Dfa parseAlt() {
    Nfa n;
    n.start = n.add();
    n.fin = n.add();
    parseTermInto(n, n.start, n.fin);
    while (peek() == '|') {
      ++i_;
      parseTermInto(n, n.start, n.fin);
    }
    return minimize(determinize(n));
  }

  const std::string& s_;
  std::size_t i_ = 0;
};

}  // namespace dfa

inline DigitPattern DigitPattern::compile(const std::string& src) {
  DigitPattern p;
  p.src_ = src;
  p.dfa_ = dfa::PatternParser(src).parse();
  p.computeDelta();
  return p;
}

inline void DigitPattern::computeDelta() {
  delta_ = DigitDelta{};
  int n = dfa_.states();
  // live = can reach an accepting state
  std::vector<int> dist = minAcceptDistance();
  const int inf = 1 << 28;
  if (dist[static_cast<std::size_t>(dfa_.start)] >= inf) return;  // empty language
  delta_.minLen = dist[static_cast<std::size_t>(dfa_.start)];
  // max length: unbounded iff a live cycle is reachable from the start
  // through live states. Walk n+1 levels; if any live state repeats depth,
  // treat as unbounded.
  std::vector<bool> reach(static_cast<std::size_t>(n), false);
  reach[static_cast<std::size_t>(dfa_.start)] = true;
  Int best = dfa_.accept[static_cast<std::size_t>(dfa_.start)] ? 0 : -1;
  bool unbounded = false;
  std::vector<bool> cur = reach;
  for (int step = 1; step <= n + 1 && !unbounded; ++step) {
    std::vector<bool> nxt(static_cast<std::size_t>(n), false);
    bool anyLive = false;
    for (int i = 0; i < n; ++i) {
      if (!cur[static_cast<std::size_t>(i)]) continue;
      for (int c = 0; c < 7; ++c) {
        int t = dfa_.next[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
        if (dist[static_cast<std::size_t>(t)] >= inf) continue;
        nxt[static_cast<std::size_t>(t)] = true;
        anyLive = true;
        if (dfa_.accept[static_cast<std::size_t>(t)]) best = std::max<Int>(best, step);
      }
    }
    if (step == n + 1 && anyLive) unbounded = true;
    cur = nxt;
  }
  if (!unbounded) delta_.maxLen = best;
  // Scaled power family {a 7^k : k >= k0}: all accepted strings are the
  // shortest accepted string followed by zeros, and from some zero count on
  // every extension is accepted.
  auto shortest = [&]() -> std::optional<std::string> {
    std::string w;
    int s = dfa_.start;
    std::set<int> seen;
    while (!dfa_.accept[static_cast<std::size_t>(s)]) {
      if (!seen.insert(s).second) return std::nullopt;
      int bestC = -1, bestT = -1;
      for (int c = 0; c < 7; ++c) {
        int t = dfa_.next[static_cast<std::size_t>(s)][static_cast<std::size_t>(c)];
        if (dist[static_cast<std::size_t>(t)] == dist[static_cast<std::size_t>(s)] - 1) {
          bestC = c;
          bestT = t;
          break;
        }
      }
      if (bestC < 0) return std::nullopt;
      w.push_back(static_cast<char>('0' + bestC));
      s = bestT;
    }
    return w;
  }();
  if (!shortest) return;
  // Check: language ⊆ shortest·0* and a tail of zero counts all accepted.
  int s = dfa_.start;
  for (char c : *shortest) s = dfa_.next[static_cast<std::size_t>(s)][static_cast<std::size_t>(c - '0')];
  // After the prefix, only 0-transitions may stay live, and no other string
  // may be accepted: verify structurally over live states along the prefix.
  {
    int t = dfa_.start;
    std::size_t pos = 0;
    for (char c : *shortest) {
      for (int d = 0; d < 7; ++d) {
        if (d == c - '0') continue;
        int u = dfa_.next[static_cast<std::size_t>(t)][static_cast<std::size_t>(d)];
        if (dist[static_cast<std::size_t>(u)] < inf) return;  // another live branch
      }
      if (pos > 0 && dfa_.accept[static_cast<std::size_t>(t)]) return;  // accepts a strict prefix
      t = dfa_.next[static_cast<std::size_t>(t)][static_cast<std::size_t>(c - '0')];
      ++pos;
    }
  }
  Int k0 = -1;
  std::set<int> seen;
  int t = s;
  for (Int k = 0;; ++k) {
    for (int d = 1; d < 7; ++d)
      if (dist[static_cast<std::size_t>(dfa_.next[static_cast<std::size_t>(t)][static_cast<std::size_t>(d)])] < inf)
        return;  // nonzero digit after the prefix stays live
    if (dfa_.accept[static_cast<std::size_t>(t)]) {
      if (k0 < 0) k0 = k;
    } else if (k0 >= 0) {
      return;  // gap in the zero tail
    }
    if (!seen.insert(t).second) break;
    t = dfa_.next[static_cast<std::size_t>(t)][0];
  }
  if (k0 < 0) return;
  delta_.scaledPowerFamily = DigitDelta::Scaled{val7(*shortest), k0};
}

}  // namespace zeq
