#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "zeq/common.hpp"
#include "zeq/window.hpp"

namespace zeq {

/// One periodic tail of an ultimately periodic set. A positive tail claims
/// membership of every n >= d with n mod p in res; a negative tail claims
/// every n <= -d with (-n) mod p in res. Claims are sound (never wrong) and,
/// beyond the canonical bound, complete.
struct Tail {
  Int d = 0;
  Int p = 1;
  std::vector<Int> res;  // sorted, subset of [0, p)

  bool claims(Int m) const {  // m is n for positive tails, -n for negative ones
    if (m < d) return false;
    return std::binary_search(res.begin(), res.end(), posMod(m, p));
  }
  bool empty() const { return res.empty(); }
  bool operator==(const Tail& o) const { return d == o.d && p == o.p && res == o.res; }
};

/// Exact, canonical, ultimately periodic subset of Z (or of N when the
/// domain flag says so): finitely many exceptions between two periodic tails.
/// Two values denote the same set iff their fields are identical.
class UPSet {
 public:
  UPSet() = default;  // empty set over Z

  Domain domain() const { return dom_; }
  const std::vector<Int>& exceptions() const { return exc_; }
  const Tail& posTail() const { return pos_; }
  const Tail& negTail() const { return neg_; }

  bool contains(Int n) const {
    if (std::binary_search(exc_.begin(), exc_.end(), n)) return true;
    if (n >= 0 && pos_.claims(n)) return true;
    if (n <= 0 && neg_.claims(-n)) return true;
    return false;
  }

  bool empty() const { return exc_.empty() && pos_.empty() && neg_.empty(); }
  bool isFinite() const { return pos_.empty() && neg_.empty(); }

  /// Smallest / largest element of a finite set.
  std::optional<Int> minElement() const {
    if (!neg_.empty()) return std::nullopt;
    if (!exc_.empty()) {
      Int m = exc_.front();
      if (!pos_.empty()) {
        Int t = firstClaimed(pos_);
        return std::min(m, t);
      }
      return m;
    }
    if (!pos_.empty()) return firstClaimed(pos_);
    return std::nullopt;  // empty set: no elements
  }
  std::optional<Int> maxElement() const {
    if (!pos_.empty()) return std::nullopt;
    if (!exc_.empty()) {
      Int m = exc_.back();
      if (!neg_.empty()) return std::max(m, -firstClaimed(neg_));
      return m;
    }
    if (!neg_.empty()) return -firstClaimed(neg_);
    return std::nullopt;
  }

  bool operator==(const UPSet& o) const {
    return dom_ == o.dom_ && exc_ == o.exc_ && pos_ == o.pos_ && neg_ == o.neg_;
  }

  /// Beyond this bound (inclusive) positive membership equals the positive
  /// tail claim; mirrored meaning for the negative side.
  Int posExactBound() const {
    Int b = std::max<Int>(pos_.d, 1);
    if (!exc_.empty()) b = std::max(b, exc_.back() + 1);
    return b;
  }
  Int negExactBound() const {
    Int b = std::max<Int>(neg_.d, 1);
    if (!exc_.empty()) b = std::max(b, -exc_.front() + 1);
    return b;
  }

  // --- construction ---------------------------------------------------

  static UPSet finite(std::set<Int> elems, Domain dom = Domain::Int) {
    return fromFn([&](Int n) { return elems.count(n) > 0; }, dom, 1,
                  elems.empty() ? 1 : std::max<Int>(1, *elems.rbegin() + 1), 1,
                  elems.empty() ? 1 : std::max<Int>(1, -*elems.begin() + 1));
  }

  static UPSet naturals(Domain dom = Domain::Int) {
    return fromFn([](Int n) { return n >= 0; }, dom, 1, 1, 1, 1);
  }

  static UPSet negNaturals() {
    return fromFn([](Int n) { return n <= 0; }, Domain::Int, 1, 1, 1, 1);
  }

  static UPSet allIntegers() {
    return fromFn([](Int) { return true; }, Domain::Int, 1, 1, 1, 1);
  }

  /// {a*n + b : n in S}, |a| = scale, used by the track encodings.
  static UPSet affine(const UPSet& s, Int a, Int b);

  /// Canonicalize an arbitrary raw representation (used by the parser and
  /// by tests that feed non-canonical forms).
  static UPSet fromRaw(const std::vector<Int>& exc, const Tail& pos, const Tail& neg, Domain dom) {
    std::set<Int> ex(exc.begin(), exc.end());
    auto fn = [&](Int n) {
      if (ex.count(n)) return true;
      if (n >= 0 && pos.claims(n)) return true;
      if (n <= 0 && neg.claims(-n)) return true;
      return false;
    };
    Int pb = std::max<Int>({pos.d, 1, ex.empty() ? 1 : *ex.rbegin() + 1});
    Int nb = std::max<Int>({neg.d, 1, ex.empty() ? 1 : -*ex.begin() + 1});
    Int pp = pos.empty() ? 1 : pos.p;
    Int np = neg.empty() ? 1 : neg.p;
    UPSet r = fromFn(fn, dom, pp, pb, np, nb);
    r.validate();
    return r;
  }

  /// Build the canonical form from a membership function that is known to be
  /// exactly posPeriod-periodic at or above posBound and exactly
  /// negPeriod-periodic (in -n) at or above negBound.
  static UPSet fromFn(const std::function<bool(Int)>& fn, Domain dom, Int posPeriod, Int posBound,
                      Int negPeriod, Int negBound) {
    UPSet r;
    r.dom_ = dom;
    posBound = std::max<Int>(posBound, 1);
    negBound = std::max<Int>(negBound, 1);
    r.pos_ = canonicalTail(fn, posPeriod, posBound);
    if (dom == Domain::Nat) {
      r.neg_ = Tail{};
    } else {
      r.neg_ = canonicalTail([&](Int m) { return fn(-m); }, negPeriod, negBound);
    }
    for (Int n = dom == Domain::Nat ? 0 : -negBound; n <= posBound; ++n) {
      if (!fn(n)) continue;
      if (n >= 0 && r.pos_.claims(n)) continue;
      if (n <= 0 && r.neg_.claims(-n)) continue;
      r.exc_.push_back(n);
    }
    return r;
  }

  /// Check the representation invariants; throws on violation.
  void validate() const {
    if (!std::is_sorted(exc_.begin(), exc_.end())) throw Error("exceptions not sorted");
    if (std::adjacent_find(exc_.begin(), exc_.end()) != exc_.end()) throw Error("duplicate exception");
    validateTail(pos_);
    validateTail(neg_);
    for (Int n : exc_) {
      if (n >= 0 && pos_.claims(n)) throw Error("exception explained by positive tail");
      if (n <= 0 && neg_.claims(-n)) throw Error("exception explained by negative tail");
    }
    if (dom_ == Domain::Nat) {
      if (!neg_.empty()) throw Error("negative tail in nat domain");
      if (!exc_.empty() && exc_.front() < 0) throw Error("negative exception in nat domain");
    }
    // Canonicity: re-deriving the canonical form must be the identity.
    UPSet re = fromFn([this](Int n) { return contains(n); }, dom_, pos_.empty() ? 1 : pos_.p,
                      posExactBound(), neg_.empty() ? 1 : neg_.p, negExactBound());
    if (!(re == *this)) throw Error("representation not canonical");
  }

  // --- set operations (all exact, all canonical) -----------------------

  friend UPSet upUnion(const UPSet& a, const UPSet& b) { return pointwise(a, b, false); }
  friend UPSet upIntersect(const UPSet& a, const UPSet& b) { return pointwise(a, b, true); }

  friend UPSet upComplement(const UPSet& s) {
    if (s.dom_ == Domain::Nat) {
      return fromFn([&](Int n) { return n >= 0 && !s.contains(n); }, Domain::Nat,
                    s.pos_.empty() ? 1 : s.pos_.p, s.posExactBound(), 1, 1);
    }
    return fromFn([&](Int n) { return !s.contains(n); }, Domain::Int, s.pos_.empty() ? 1 : s.pos_.p,
                  s.posExactBound(), s.neg_.empty() ? 1 : s.neg_.p, s.negExactBound());
  }

  friend UPSet upNegate(const UPSet& s) {
    if (s.dom_ == Domain::Nat) throw RegimeError("negation over naturals");
    return fromFn([&](Int n) { return s.contains(-n); }, Domain::Int,
                  s.neg_.empty() ? 1 : s.neg_.p, s.negExactBound(), s.pos_.empty() ? 1 : s.pos_.p,
                  s.posExactBound());
  }

  friend UPSet upAdd(const UPSet& a, const UPSet& b);
  friend UPSet upSubtract(const UPSet& a, const UPSet& b);
  friend UPSet upTruncSub(const UPSet& a, const UPSet& b);

  UPSet widenToInt() const {
    UPSet r = *this;
    r.dom_ = Domain::Int;
    return r;
  }

  UPSet restrictToNat() const {
    return fromFn([&](Int n) { return n >= 0 && contains(n); }, Domain::Nat,
                  pos_.empty() ? 1 : pos_.p, posExactBound(), 1, 1);
  }

  WindowSet enumerate(const Window& w) const {
    WindowSet r(w);
    for (Int n = w.lo; n <= w.hi; ++n)
      if (contains(n)) r.set(n);
    return r;  // horizon = full window: the representation is intensional
  }

  /// Smallest witness distinguishing two sets, if they differ.
  friend std::optional<Int> upFirstDifference(const UPSet& a, const UPSet& b) {
    if (a == b) return std::nullopt;
    Int pb = std::max(a.posExactBound(), b.posExactBound());
    Int nb = std::max(a.negExactBound(), b.negExactBound());
    Int pp = lcmInt(a.pos_.empty() ? 1 : a.pos_.p, b.pos_.empty() ? 1 : b.pos_.p);
    Int np = lcmInt(a.neg_.empty() ? 1 : a.neg_.p, b.neg_.empty() ? 1 : b.neg_.p);
    for (Int n = -(nb + np); n <= pb + pp; ++n)
      if (a.contains(n) != b.contains(n)) return n;
    return std::nullopt;  // unreachable for canonical forms
  }

  std::string toText() const;
  static UPSet parse(const std::string& text, Domain dom);

 private:
  static Int firstClaimed(const Tail& t) {
    for (Int m = t.d;; ++m)
      if (t.claims(m)) return m;
  }

  static void validateTail(const Tail& t) {
    if (t.p < 1) throw Error("tail period < 1");
    if (t.d < 0) throw Error("tail threshold < 0");
    if (!std::is_sorted(t.res.begin(), t.res.end())) throw Error("tail residues not sorted");
    for (Int r : t.res)
      if (r < 0 || r >= t.p) throw Error("tail residue out of range");
    if (t.res.empty() && (t.p != 1 || t.d != 0)) throw Error("empty tail not normalized");
  }

  /// Minimal-period, minimal-threshold tail for a membership function that is
  /// exactly `period`-periodic at or above `bound` (in the mirrored coordinate
  /// for negative tails).
  static Tail canonicalTail(const std::function<bool(Int)>& fn, Int period, Int bound) {
    // Residue pattern of the eventual behaviour.
    std::vector<bool> pat(static_cast<std::size_t>(period));
    for (Int r = 0; r < period; ++r) {
      Int n = bound + posMod(r - bound, period);
      pat[static_cast<std::size_t>(r)] = fn(n);
    }
    // Fold to the minimal divisor period.
    Int p = period;
    for (Int q = 1; q <= period; ++q) {
      if (period % q != 0) continue;
      bool ok = true;
      for (Int r = 0; r < period && ok; ++r)
        ok = pat[static_cast<std::size_t>(r)] == pat[static_cast<std::size_t>((r + q) % period)];
      if (ok) {
        p = q;
        break;
      }
    }
    Tail t;
    t.p = p;
    for (Int r = 0; r < p; ++r)
      if (pat[static_cast<std::size_t>(r)]) t.res.push_back(r);
    if (t.res.empty()) return Tail{};  // canonical empty tail
    // Minimal sound threshold: walk down while every new claim is true.
    Int d = bound;
    while (d > 0) {
      Int m = d - 1;
      if (std::binary_search(t.res.begin(), t.res.end(), posMod(m, p)) && !fn(m)) break;
      --d;
    }
    t.d = d;
    return t;
  }

  static UPSet pointwise(const UPSet& a, const UPSet& b, bool isIntersect) {
    Domain dom = (a.dom_ == Domain::Nat && b.dom_ == Domain::Nat) ? Domain::Nat : Domain::Int;
    const UPSet aw = a.dom_ == dom ? a : a.widenToInt();
    const UPSet bw = b.dom_ == dom ? b : b.widenToInt();
    auto fn = [&](Int n) {
      return isIntersect ? (aw.contains(n) && bw.contains(n)) : (aw.contains(n) || bw.contains(n));
    };
    Int pp = lcmInt(aw.pos_.empty() ? 1 : aw.pos_.p, bw.pos_.empty() ? 1 : bw.pos_.p);
    Int np = lcmInt(aw.neg_.empty() ? 1 : aw.neg_.p, bw.neg_.empty() ? 1 : bw.neg_.p);
    return fromFn(fn, dom, pp, std::max(aw.posExactBound(), bw.posExactBound()), np,
                  std::max(aw.negExactBound(), bw.negExactBound()));
  }

  Domain dom_ = Domain::Int;
  std::vector<Int> exc_;
  Tail pos_;
  Tail neg_;
};

// --- Minkowski sum ------------------------------------------------------
//
// Each operand splits into three claim pieces (finite exceptions, positive
// tail, negative tail); the nine pairwise sums are accumulated as raw pieces
// and re-canonicalized. Opposite-sign tail pairs cover whole residue classes;
// same-sign tail pairs get the conservative threshold d1 + d2 + 2*lcm with
// the low region enumerated explicitly.

namespace detail {

struct RawPieces {
  std::set<Int> finite;
  std::vector<Tail> up;    // claims {n >= d : n mod p in res}
  std::vector<Tail> down;  // claims {n <= -d cast via mirror}: stored like Tail over -n
  // A "full" progression contributes one up tail with d = 0 and one mirrored
  // down tail with d = 0.

  bool contains(Int n) const {
    if (finite.count(n)) return true;
    for (const auto& t : up)
      if (n >= t.d && std::binary_search(t.res.begin(), t.res.end(), posMod(n, t.p))) return true;
    for (const auto& t : down)
      if (-n >= t.d && std::binary_search(t.res.begin(), t.res.end(), posMod(-n, t.p))) return true;
    return false;
  }
};

inline std::vector<Int> liftResidues(const std::vector<Int>& res, Int p, Int P) {
  std::vector<Int> out;
  for (Int r : res)
    for (Int k = r; k < P; k += p) out.push_back(k);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Int> pairSumResidues(const std::vector<Int>& r1, const std::vector<Int>& r2, Int P) {
  std::vector<bool> seen(static_cast<std::size_t>(P), false);
  for (Int a : r1)
    for (Int b : r2) seen[static_cast<std::size_t>(posMod(a + b, P))] = true;
  std::vector<Int> out;
  for (Int r = 0; r < P; ++r)
    if (seen[static_cast<std::size_t>(r)]) out.push_back(r);
  return out;
}

// Sum of two same-direction tails in mirrored coordinates (both Tail structs
// claim {m >= d : m mod p in res}); emits the threshold tail plus the low part.
inline void sumSameSign(const Tail& t1, const Tail& t2, std::vector<Tail>& tails, std::set<Int>& low,
                        bool mirror) {
  if (t1.empty() || t2.empty()) return;
  Int P = lcmInt(t1.p, t2.p);
  if (P > 1'000'000) throw Error("tail period blow-up in addition");
  auto r1 = liftResidues(t1.res, t1.p, P);
  auto r2 = liftResidues(t2.res, t2.p, P);
  Tail out;
  out.p = P;
  out.res = pairSumResidues(r1, r2, P);
  out.d = checkedAdd(checkedAdd(t1.d, t2.d), checkedMul(2, P));
  tails.push_back(out);
  for (Int k1 = 0; k1 < 2 * P; ++k1) {
    Int m1 = t1.d + k1;
    if (!std::binary_search(t1.res.begin(), t1.res.end(), posMod(m1, t1.p))) continue;
    for (Int k2 = 0; k2 + k1 < 2 * P; ++k2) {
      Int m2 = t2.d + k2;
      if (!std::binary_search(t2.res.begin(), t2.res.end(), posMod(m2, t2.p))) continue;
      Int s = checkedAdd(m1, m2);
      if (s < out.d) low.insert(mirror ? -s : s);
    }
  }
}

// Positive tail + negative tail: every residue class of sums is fully covered.
inline void sumOppositeSign(const Tail& up, const Tail& down, RawPieces& out) {
  if (up.empty() || down.empty()) return;
  Int P = lcmInt(up.p, down.p);
  if (P > 1'000'000) throw Error("tail period blow-up in addition");
  auto r1 = liftResidues(up.res, up.p, P);
  // down tail claims values -m with m >= d, m mod p in res; as residues of n
  // itself the class of n = -m is (-m) mod P.
  std::vector<Int> r2;
  for (Int r : liftResidues(down.res, down.p, P)) r2.push_back(posMod(-r, P));
  std::sort(r2.begin(), r2.end());
  r2.erase(std::unique(r2.begin(), r2.end()), r2.end());
  Tail full;
  full.p = P;
  full.res = pairSumResidues(r1, r2, P);
  full.d = 0;
  out.up.push_back(full);
  Tail fullDown;
  fullDown.p = P;
  for (Int r : full.res) fullDown.res.push_back(posMod(-r, P));
  std::sort(fullDown.res.begin(), fullDown.res.end());
  fullDown.res.erase(std::unique(fullDown.res.begin(), fullDown.res.end()), fullDown.res.end());
  fullDown.d = 0;
  out.down.push_back(fullDown);
}

inline void sumFiniteTail(const std::set<Int>& fin, const Tail& t, bool tailIsDown, RawPieces& out) {
  if (t.empty() || fin.empty()) return;
  for (Int e : fin) {
    Tail s;
    s.p = t.p;
    // Shifting {m : m >= d, m ≡ r} by e (or by -e in mirrored coordinates).
    Int shift = tailIsDown ? -e : e;
    for (Int r : t.res) s.res.push_back(posMod(r + shift, t.p));
    std::sort(s.res.begin(), s.res.end());
    s.res.erase(std::unique(s.res.begin(), s.res.end()), s.res.end());
    Int start = checkedAdd(t.d, shift);  // claims from start on, in mirrored coords
    if (start < 0) {
      // The region crosses the origin: emit the crossing stretch explicitly.
      for (Int m = start; m < 0; ++m)
        if (std::binary_search(s.res.begin(), s.res.end(), posMod(m, s.p)))
          out.finite.insert(tailIsDown ? -m : m);
      start = 0;
    }
    s.d = start;
    (tailIsDown ? out.down : out.up).push_back(s);
  }
}

}  // namespace detail

inline UPSet upAdd(const UPSet& a, const UPSet& b) {
  Domain dom = (a.domain() == Domain::Nat && b.domain() == Domain::Nat) ? Domain::Nat : Domain::Int;
  if (a.empty() || b.empty()) {
    UPSet r;
    return dom == Domain::Nat ? r.restrictToNat() : r;
  }
  detail::RawPieces out;
  const std::set<Int> finA(a.exceptions().begin(), a.exceptions().end());
  const std::set<Int> finB(b.exceptions().begin(), b.exceptions().end());
  // finite + finite
  for (Int x : finA)
    for (Int y : finB) out.finite.insert(checkedAdd(x, y));
  // finite + tails
  detail::sumFiniteTail(finA, b.posTail(), false, out);
  detail::sumFiniteTail(finA, b.negTail(), true, out);
  detail::sumFiniteTail(finB, a.posTail(), false, out);
  detail::sumFiniteTail(finB, a.negTail(), true, out);
  // tail + tail
  {
    std::set<Int> lowPos, lowNeg;
    detail::sumSameSign(a.posTail(), b.posTail(), out.up, lowPos, false);
    detail::sumSameSign(a.negTail(), b.negTail(), out.down, lowNeg, true);
    for (Int v : lowPos) out.finite.insert(v);
    for (Int v : lowNeg) out.finite.insert(v);
    detail::sumOppositeSign(a.posTail(), b.negTail(), out);
    detail::sumOppositeSign(b.posTail(), a.negTail(), out);
  }
  Int posP = 1, negP = 1, posB = 1, negB = 1;
  for (const auto& t : out.up) {
    posP = lcmInt(posP, t.p);
    posB = std::max(posB, t.d);
  }
  for (const auto& t : out.down) {
    negP = lcmInt(negP, t.p);
    negB = std::max(negB, t.d);
  }
  if (!out.finite.empty()) {
    posB = std::max(posB, *out.finite.rbegin() + 1);
    negB = std::max(negB, -*out.finite.begin() + 1);
  }
  return UPSet::fromFn([&](Int n) { return out.contains(n); }, dom, posP, posB, negP, negB);
}

inline UPSet upSubtract(const UPSet& a, const UPSet& b) {
  return upAdd(a.widenToInt(), upNegate(b.widenToInt()));
}

inline UPSet upTruncSub(const UPSet& a, const UPSet& b) {
  return upSubtract(a, b).restrictToNat();
}

inline UPSet UPSet::affine(const UPSet& s, Int a, Int b) {
  if (a == 0) throw Error("affine scale must be nonzero");
  auto fn = [&, a, b](Int n) {
    Int t = checkedSub(n, b);
    if (posMod(t, a < 0 ? -a : a) != 0) return false;
    return s.contains(t / a);
  };
  Int pp = (s.posTail().empty() ? 1 : s.posTail().p);
  Int np = (s.negTail().empty() ? 1 : s.negTail().p);
  Int scale = a < 0 ? -a : a;
  Int period = checkedMul(scale, a > 0 ? pp : np);
  Int periodN = checkedMul(scale, a > 0 ? np : pp);
  Int bound = checkedAdd(checkedMul(scale, checkedAdd(std::max(s.posExactBound(), s.negExactBound()), 1)),
                         (b < 0 ? -b : b) + 1);
  Domain dom = s.domain();
  if (a < 0 || b < 0) dom = Domain::Int;
  return fromFn(fn, dom, period, bound, periodN, bound);
}

enum class UpOp { Union, Intersect, Add, Subtract, TruncSub };

inline UPSet upBinary(UpOp op, const UPSet& a, const UPSet& b) {
  switch (op) {
    case UpOp::Union: return upUnion(a, b);
    case UpOp::Intersect: return upIntersect(a, b);
    case UpOp::Add: return upAdd(a, b);
    case UpOp::Subtract: return upSubtract(a, b);
    case UpOp::TruncSub: return upTruncSub(a, b);
  }
  throw Error("bad op");
}

// --- textual form ---------------------------------------------------------
//
//   {e1,e2,...} ∪ pos(d,p;{r...}) ∪ neg(d,p;{r...})
//
// Empty pieces are omitted; the empty set prints as {}.

inline std::string UPSet::toText() const {
  std::ostringstream os;
  bool first = true;
  auto sep = [&]() {
    if (!first) os << " ∪ ";
    first = false;
  };
  auto list = [&](const std::vector<Int>& v) {
    os << "{";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) os << ",";
      os << v[i];
    }
    os << "}";
  };
  if (!exc_.empty()) {
    sep();
    list(exc_);
  }
  if (!pos_.empty()) {
    sep();
    os << "pos(" << pos_.d << "," << pos_.p << ";";
    list(pos_.res);
    os << ")";
  }
  if (!neg_.empty()) {
    sep();
    os << "neg(" << neg_.d << "," << neg_.p << ";";
    list(neg_.res);
    os << ")";
  }
  if (first) os << "{}";
  return os.str();
}

namespace detail {

class UpTextScanner {
 public:
  explicit UpTextScanner(const std::string& s) : s_(s) {}

  void ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t')) ++i_;
  }
  bool eof() {
    ws();
    return i_ >= s_.size();
  }
  bool tryLit(const std::string& lit) {
    ws();
    if (s_.compare(i_, lit.size(), lit) == 0) {
      i_ += lit.size();
      return true;
    }
    return false;
  }
  void expect(const std::string& lit) {
    if (!tryLit(lit)) throw ParseError("expected '" + lit + "' at offset " + std::to_string(i_) + " in set text");
  }
  Int number() {
    ws();
    std::size_t start = i_;
    if (i_ < s_.size() && (s_[i_] == '-' || s_[i_] == '+')) ++i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (i_ == start || (i_ == start + 1 && !std::isdigit(static_cast<unsigned char>(s_[start]))))
      throw ParseError("expected integer at offset " + std::to_string(start) + " in set text");
    return std::stoll(s_.substr(start, i_ - start));
  }
  std::vector<Int> numberList() {
    expect("{");
    std::vector<Int> v;
    if (!tryLit("}")) {
      v.push_back(number());
      while (tryLit(",")) v.push_back(number());
      expect("}");
    }
    return v;
  }

 private:
  const std::string& s_;
  std::size_t i_ = 0;
};

}  // namespace detail

inline UPSet UPSet::parse(const std::string& text, Domain dom) {
  detail::UpTextScanner sc(text);
  std::vector<Int> exc;
  Tail pos, neg;
  bool sawExc = false, sawPos = false, sawNeg = false;
  auto piece = [&]() {
    if (sc.tryLit("pos(")) {
      if (sawPos) throw ParseError("duplicate pos(...) piece");
      sawPos = true;
      pos.d = sc.number();
      sc.expect(",");
      pos.p = sc.number();
      sc.expect(";");
      pos.res = sc.numberList();
      sc.expect(")");
    } else if (sc.tryLit("neg(")) {
      if (sawNeg) throw ParseError("duplicate neg(...) piece");
      sawNeg = true;
      neg.d = sc.number();
      sc.expect(",");
      neg.p = sc.number();
      sc.expect(";");
      neg.res = sc.numberList();
      sc.expect(")");
    } else {
      if (sawExc) throw ParseError("duplicate exception list");
      sawExc = true;
      exc = sc.numberList();
    }
  };
  piece();
  while (sc.tryLit("∪") || sc.tryLit("u") || sc.tryLit("U")) piece();
  if (!sc.eof()) throw ParseError("trailing input in set text");
  if (pos.p < 1 || neg.p < 1) throw ParseError("tail period must be >= 1");
  for (Int r : pos.res)
    if (r < 0 || r >= pos.p) throw ParseError("pos residue out of range");
  for (Int r : neg.res)
    if (r < 0 || r >= neg.p) throw ParseError("neg residue out of range");
  if (pos.d < 0 || neg.d < 0) throw ParseError("tail threshold must be >= 0");
  if (dom == Domain::Nat) {
    if (!neg.res.empty()) throw ParseError("neg(...) piece in nat domain");
    for (Int e : exc)
      if (e < 0) throw ParseError("negative element in nat domain");
  }
  return fromRaw(exc, pos, neg, dom);
}

}  // namespace zeq
