#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

#include "zeq/upset.hpp"
#include "zeq/window.hpp"

namespace zeqtest {

using zeq::Domain;
using zeq::Int;
using zeq::Tail;
using zeq::UPSet;
using zeq::Window;
using zeq::WindowSet;

using Rng = std::mt19937_64;

inline Int pick(Rng& rng, Int lo, Int hi) {
  return std::uniform_int_distribution<Int>(lo, hi)(rng);
}

inline Tail randomTail(Rng& rng, Int maxPeriod) {
  Tail t;
  if (pick(rng, 0, 3) == 0) return t;  // empty tail
  t.p = pick(rng, 1, maxPeriod);
  t.d = pick(rng, 0, 12);
  for (Int r = 0; r < t.p; ++r)
    if (pick(rng, 0, 2) == 0) t.res.push_back(r);
  if (t.res.empty()) return Tail{};
  return t;
}

/// Random raw representation, canonicalized by the constructor.
inline UPSet randomUPSet(Rng& rng, Domain dom, Int maxPeriod = 9, Int excRange = 25) {
  std::vector<Int> exc;
  Int nExc = pick(rng, 0, 5);
  for (Int i = 0; i < nExc; ++i)
    exc.push_back(dom == Domain::Nat ? pick(rng, 0, excRange) : pick(rng, -excRange, excRange));
  std::sort(exc.begin(), exc.end());
  exc.erase(std::unique(exc.begin(), exc.end()), exc.end());
  Tail pos = randomTail(rng, maxPeriod);
  Tail neg = dom == Domain::Nat ? Tail{} : randomTail(rng, maxPeriod);
  return UPSet::fromRaw(exc, pos, neg, dom);
}

/// Dense membership table of a UPSet on [lo, hi].
inline std::vector<char> densify(const UPSet& s, Int lo, Int hi) {
  std::vector<char> v(static_cast<std::size_t>(hi - lo + 1));
  for (Int n = lo; n <= hi; ++n) v[static_cast<std::size_t>(n - lo)] = s.contains(n) ? 1 : 0;
  return v;
}

/// Element-wise reference computation of the five binary operations on a
/// result window, reading operands on an enlarged window. Independent of the
/// UPSet piece algebra and of the WindowSet convolution.
inline std::set<Int> elementwiseBinary(zeq::UpOp op, const UPSet& a, const UPSet& b, Int lo, Int hi,
                                       Int enlarge) {
  Int elo = lo - enlarge, ehi = hi + enlarge;
  std::vector<char> da = densify(a, elo, ehi), db = densify(b, elo, ehi);
  auto inA = [&](Int n) { return n >= elo && n <= ehi && da[static_cast<std::size_t>(n - elo)]; };
  auto inB = [&](Int n) { return n >= elo && n <= ehi && db[static_cast<std::size_t>(n - elo)]; };
  std::set<Int> out;
  for (Int r = lo; r <= hi; ++r) {
    bool member = false;
    switch (op) {
      case zeq::UpOp::Union: member = inA(r) || inB(r); break;
      case zeq::UpOp::Intersect: member = inA(r) && inB(r); break;
      case zeq::UpOp::Add:
        for (Int m = elo; m <= ehi && !member; ++m)
          if (da[static_cast<std::size_t>(m - elo)] && inB(r - m)) member = true;
        break;
      case zeq::UpOp::Subtract:
        for (Int m = elo; m <= ehi && !member; ++m)
          if (da[static_cast<std::size_t>(m - elo)] && inB(m - r)) member = true;
        break;
      case zeq::UpOp::TruncSub:
        if (r >= 0)
          for (Int m = elo; m <= ehi && !member; ++m)
            if (da[static_cast<std::size_t>(m - elo)] && inB(m - r)) member = true;
        break;
    }
    if (member) out.insert(r);
  }
  return out;
}

inline std::set<Int> enumerateSet(const UPSet& s, Int lo, Int hi) {
  std::set<Int> out;
  for (Int n = lo; n <= hi; ++n)
    if (s.contains(n)) out.insert(n);
  return out;
}

}  // namespace zeqtest
