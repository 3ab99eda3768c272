#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "zeq/common.hpp"
#include "zeq/digits.hpp"
#include "zeq/dsl.hpp"
#include "zeq/gadgets.hpp"
#include "zeq/window.hpp"

namespace zeq {

// --- desk-scale effective sigma-ring instances -----------------------------------
//
// Finite tables tau1, tau2 (injective, disjoint images) and f_k (finite,
// optionally with a default value and a totality flag) define the leaf sets
//   B_{tau1(k)} = N \ {k},  C_{tau1(k)} = {k}
// and the closure steps
//   B_{tau2(k)} = union of C_{f_k(n)},  C_{tau2(k)} = intersection of B_{f_k(n)}.

struct SigmaRingSpec {
  struct FTable {
    std::map<Int, Int> entries;
    std::optional<Int> defaultVal;  // value of every unlisted argument
    bool total = false;
  };

  std::map<Int, Int> tau1, tau2;
  std::map<Int, FTable> f;
  Int root = 0;

  std::map<Int, Int> tau1Inv, tau2Inv;  // index -> k

  void finalize() {
    tau1Inv.clear();
    tau2Inv.clear();
    for (auto& [k, v] : tau1)
      if (!tau1Inv.emplace(v, k).second) throw SpecError("tau1 is not injective");
    for (auto& [k, v] : tau2)
      if (!tau2Inv.emplace(v, k).second) throw SpecError("tau2 is not injective");
    for (auto& [v, k] : tau1Inv)
      if (tau2Inv.count(v)) throw SpecError("tau1 and tau2 images are not disjoint");
  }

  bool isLeafIndex(Int e) const { return tau1Inv.count(e) > 0; }
  bool isUnionIndex(Int e) const { return tau2Inv.count(e) > 0; }
  bool isInterpretable(Int e) const { return isLeafIndex(e) || isUnionIndex(e); }

  /// f_k applied to n; nullopt when the partial function is undefined there.
  /// A declared-total table with no matching entry is a spec defect.
  std::optional<Int> applyF(Int k, Int n) const {
    auto it = f.find(k);
    if (it == f.end()) return std::nullopt;
    auto e = it->second.entries.find(n);
    if (e != it->second.entries.end()) return e->second;
    if (it->second.defaultVal) return *it->second.defaultVal;
    if (it->second.total)
      throw SpecError("f_" + std::to_string(k) + " is declared total but has no entry for " +
                      std::to_string(n));
    return std::nullopt;
  }

  bool fTotal(Int k) const {
    auto it = f.find(k);
    return it != f.end() && it->second.total;
  }

  /// Distinct values f_k takes (entries plus the default, which is always
  /// realized since only finitely many arguments are listed).
  std::vector<Int> childValues(Int k) const {
    std::set<Int> vals;
    auto it = f.find(k);
    if (it != f.end()) {
      for (auto& [n, v] : it->second.entries) vals.insert(v);
      if (it->second.defaultVal) vals.insert(*it->second.defaultVal);
    }
    return {vals.begin(), vals.end()};
  }

  static SigmaRingSpec parse(const std::string& text);
  std::string toText() const;
};

// --- Resolve ---------------------------------------------------------------------

/// Resolve(<>) = root; Resolve(x1..xk) = f_{tau2^-1(Resolve(x1..x_{k-1}))}([[xk]]_2).
/// Undefined propagates (missing tau2-preimage or partial f).
inline std::optional<Int> resolvePath(const SigmaRingSpec& spec, const std::vector<std::string>& path) {
  Int cur = spec.root;
  for (const auto& x : path) {
    auto k = spec.tau2Inv.find(cur);
    if (k == spec.tau2Inv.end()) return std::nullopt;
    auto nxt = spec.applyF(k->second, BinaryWitness::value(x));
    if (!nxt) return std::nullopt;
    cur = *nxt;
  }
  return cur;
}

// --- well-foundedness -------------------------------------------------------------

struct WellFoundedResult {
  bool wellFounded = true;
  std::vector<Int> offendingPath;  // indices along a walk that closes a cycle
};

/// Depth-first search over the reachable index graph; any cycle realizable
/// within the finite universe is an infinite descent.
inline WellFoundedResult checkWellFounded(const SigmaRingSpec& spec) {
  enum Color { White, Gray, Black };
  std::map<Int, Color> color;
  std::vector<Int> stack;
  WellFoundedResult res;
  std::function<bool(Int)> dfs = [&](Int e) {
    color[e] = Gray;
    stack.push_back(e);
    if (spec.isUnionIndex(e)) {
      Int k = spec.tau2Inv.at(e);
      for (Int v : spec.childValues(k)) {
        auto c = color.count(v) ? color[v] : White;
        if (c == Gray) {
          stack.push_back(v);
          res.wellFounded = false;
          res.offendingPath = stack;
          return false;
        }
        if (c == White && !dfs(v)) return false;
      }
    }
    color[e] = Black;
    stack.pop_back();
    return true;
  };
  dfs(spec.root);
  return res;
}

// --- membership evaluation ----------------------------------------------------------

namespace detail {

struct RingEval {
  SigmaRingSpec spec;  // owned copy: membership closures may outlive the caller's spec
  std::map<std::pair<Int, Int>, bool> memoB, memoC;

  bool memberB(Int e, Int m) {
    if (m < 0) return false;
    if (spec.isLeafIndex(e)) return m != spec.tau1Inv.at(e);
    if (!spec.isUnionIndex(e)) throw SpecError("index " + std::to_string(e) + " has no definition");
    auto key = std::make_pair(e, m);
    auto it = memoB.find(key);
    if (it != memoB.end()) return it->second;
    Int k = spec.tau2Inv.at(e);
    if (!spec.fTotal(k)) throw SpecError("f_" + std::to_string(k) + " is not total");
    bool r = false;
    for (Int v : spec.childValues(k))
      if (memberC(v, m)) {
        r = true;
        break;
      }
    memoB[key] = r;
    return r;
  }

  bool memberC(Int e, Int m) {
    if (m < 0) return false;
    if (spec.isLeafIndex(e)) return m == spec.tau1Inv.at(e);
    if (!spec.isUnionIndex(e)) throw SpecError("index " + std::to_string(e) + " has no definition");
    auto key = std::make_pair(e, m);
    auto it = memoC.find(key);
    if (it != memoC.end()) return it->second;
    Int k = spec.tau2Inv.at(e);
    if (!spec.fTotal(k)) throw SpecError("f_" + std::to_string(k) + " is not total");
    bool r = true;
    for (Int v : spec.childValues(k))
      if (!memberB(v, m)) {
        r = false;
        break;
      }
    memoC[key] = r;
    return r;
  }
};

/// The <1 x_k 1 x_{k-1} ... x_1 1 0 w> shape: runs are returned in resolve
/// order (x_1 first), w is the digit suffix after the terminating 0.
struct PathForm {
  std::vector<std::string> path;  // x_1 .. x_k
  std::string w;
};

inline std::optional<PathForm> decodePathForm(Int n) {
  if (n <= 0) return std::nullopt;
  std::string d = rep7(n);
  if (d[0] != '1') return std::nullopt;
  std::size_t i = 1;
  std::vector<std::string> runs;  // x_k .. x_1 in reading order
  for (;;) {
    if (i < d.size() && d[i] == '0') {
      PathForm pf;
      pf.w = d.substr(i + 1);
      pf.path.assign(runs.rbegin(), runs.rend());
      return pf;
    }
    std::string run;
    while (i < d.size() && (d[i] == '3' || d[i] == '6')) run.push_back(d[i++]);
    if (i >= d.size() || d[i] != '1') return std::nullopt;
    runs.push_back(run);
    ++i;
  }
}

/// The Y/Ytilde shape <y 1 x_k ... x_1 1 0 w> with y ∈ {3,6}* (possibly empty).
inline std::optional<PathForm> decodeExtendedForm(Int n) {
  if (n <= 0) return std::nullopt;
  std::string d = rep7(n);
  std::size_t i = 0;
  while (i < d.size() && (d[i] == '3' || d[i] == '6')) ++i;
  if (i >= d.size() || d[i] != '1') return std::nullopt;
  return decodePathForm(val7(d.substr(i)));
}

}  // namespace detail

// --- the goal sets -------------------------------------------------------------------

/// The five sets of the construction on a window, together with their
/// intensional membership predicates (usable as oracle constants) and the
/// predicates for the lemma's stated Y, Ytilde, Z.
struct GoalBundle {
  WindowSet goal0, goal1, admissible, r0, r1;
  std::function<bool(Int)> goal0Fn, goal1Fn, admissibleFn, r0Fn, r1Fn, yFn, ytildeFn, zFn;
};

inline GoalBundle computeGoalBundle(const SigmaRingSpec& spec, const Window& w) {
  auto wf = checkWellFounded(spec);
  if (!wf.wellFounded) throw SpecError("sigma-ring spec is not well-founded");
  auto eval = std::make_shared<detail::RingEval>(detail::RingEval{spec, {}, {}});
  auto resolveOf = [spec](const detail::PathForm& pf) { return resolvePath(spec, pf.path); };

  auto goal0Fn = [eval, resolveOf](Int n) {
    auto pf = detail::decodePathForm(n);
    if (!pf) return false;
    auto e = resolveOf(*pf);
    if (!e || !eval->spec.isInterpretable(*e)) return false;
    return eval->memberB(*e, val7(pf->w));
  };
  auto goal1Fn = [eval, resolveOf](Int n) {
    auto pf = detail::decodePathForm(n);
    if (!pf) return false;
    auto e = resolveOf(*pf);
    if (!e || !eval->spec.isInterpretable(*e)) return false;
    return eval->memberC(*e, val7(pf->w));
  };
  auto admissibleFn = [eval, resolveOf](Int n) {
    auto pf = detail::decodePathForm(n);
    return pf && resolveOf(*pf).has_value();
  };
  auto r0Fn = [eval, resolveOf](Int n) {
    auto pf = detail::decodePathForm(n);
    if (!pf) return false;
    auto e = resolveOf(*pf);
    return e && eval->spec.isLeafIndex(*e) && eval->memberB(*e, val7(pf->w));
  };
  auto r1Fn = [eval, resolveOf](Int n) {
    auto pf = detail::decodePathForm(n);
    if (!pf) return false;
    auto e = resolveOf(*pf);
    return e && eval->spec.isLeafIndex(*e) && eval->memberC(*e, val7(pf->w));
  };
  auto zFn = [eval, resolveOf](Int n) {
    auto pf = detail::decodePathForm(n);
    if (!pf) return false;
    auto e = resolveOf(*pf);
    return e && eval->spec.isUnionIndex(*e) && eval->memberC(*e, val7(pf->w));
  };
  auto yFn = [eval, resolveOf](Int n) {
    auto pf = detail::decodeExtendedForm(n);
    if (!pf) return false;
    auto e = resolveOf(*pf);
    return e && eval->spec.isUnionIndex(*e) && eval->memberC(*e, val7(pf->w));
  };
  auto ytildeFn = [eval, resolveOf](Int n) {
    auto pf = detail::decodeExtendedForm(n);
    if (!pf) return false;
    auto e = resolveOf(*pf);
    return e && eval->spec.isUnionIndex(*e) && eval->memberB(*e, val7(pf->w));
  };

  auto materialize = [&](const std::function<bool(Int)>& fn) {
    WindowSet ws(w);
    for (Int n = std::max<Int>(w.lo, 0); n <= w.hi; ++n)
      if (fn(n)) ws.set(n);
    return ws;
  };
  GoalBundle b;
  b.goal0 = materialize(goal0Fn);
  b.goal1 = materialize(goal1Fn);
  b.admissible = materialize(admissibleFn);
  b.r0 = materialize(r0Fn);
  b.r1 = materialize(r1Fn);
  b.goal0Fn = goal0Fn;
  b.goal1Fn = goal1Fn;
  b.admissibleFn = admissibleFn;
  b.r0Fn = r0Fn;
  b.r1Fn = r1Fn;
  b.yFn = yFn;
  b.ytildeFn = ytildeFn;
  b.zFn = zFn;
  return b;
}

/// Direct recursive evaluation of the root set B_{i0} on a window.
inline WindowSet rootSetB(const SigmaRingSpec& spec, const Window& w) {
  auto wf = checkWellFounded(spec);
  if (!wf.wellFounded) throw SpecError("sigma-ring spec is not well-founded");
  detail::RingEval eval{spec, {}, {}};
  WindowSet ws(w);
  for (Int n = std::max<Int>(w.lo, 0); n <= w.hi; ++n)
    if (eval.memberB(spec.root, n)) ws.set(n);
  return ws;
}

// --- the eight-constraint system ------------------------------------------------------

/// Constraints (1)-(8) over X0, X1, Yt, Y, Z with Admissible, R0, R1 as
/// oracle constants:
///   (1) X0 = E(removeone(X1)) ∪ R0
///   (2) X1 = Z ∪ R1
///   (3) Yt = E(removeone(X1)) ∪ append36(Yt)
///   (4) Y  = Z ∪ append36(Y)
///   (5) Y ⊆ removeone(X0 ∩ Admissible) ⊆ Y ∪ Yt
///   (6) Z ⊆ <1 W+>
///   (7) X0 ∪ X1 ⊆ Admissible
///   (8) X0 ∩ R1 = X1 ∩ R0 = ∅
inline System buildHASystem(const SigmaRingSpec& spec) {
  auto wf = checkWellFounded(spec);
  if (!wf.wellFounded) throw SpecError("sigma-ring spec is not well-founded");
  // The oracle constants are intensional and window-independent.
  GoalBundle probe = computeGoalBundle(spec, Window::natDigits(1));
  System s;
  s.dom = Domain::Nat;
  for (const char* v : {"X0", "X1", "Yt", "Y", "Z"}) s.declareVar(v);
  ConstPool pool(s);
  Expr r0 = pool.oracle("R0", "ha.R0", probe.r0Fn);
  Expr r1 = pool.oracle("R1", "ha.R1", probe.r1Fn);
  Expr adm = pool.oracle("Admissible", "ha.Admissible", probe.admissibleFn);
  Expr empty = pool.up("EMPTY", UPSet().restrictToNat());
  Expr eStrip = buildEExpr(buildRemoveoneExpr(mkVar("X1"), pool), pool);
  s.constraints.push_back(Constraint::eq(mkVar("X0"), mkUnion(eStrip, r0)));
  s.constraints.push_back(Constraint::eq(mkVar("X1"), mkUnion(mkVar("Z"), r1)));
  s.constraints.push_back(Constraint::eq(
      mkVar("Yt"), mkUnion(buildEExpr(buildRemoveoneExpr(mkVar("X1"), pool), pool),
                           buildAppend36Expr(mkVar("Yt"), pool))));
  s.constraints.push_back(
      Constraint::eq(mkVar("Y"), mkUnion(mkVar("Z"), buildAppend36Expr(mkVar("Y"), pool))));
  Constraint c5;
  c5.kind = Constraint::Kind::Inc;
  c5.chain = {mkVar("Y"), buildRemoveoneExpr(mkIntersect(mkVar("X0"), adm), pool),
              mkUnion(mkVar("Y"), mkVar("Yt"))};
  s.constraints.push_back(std::move(c5));
  s.constraints.push_back(Constraint::inc(mkVar("Z"), pool.pattern("p1Wp", "1 W+")));
  s.constraints.push_back(Constraint::inc(mkUnion(mkVar("X0"), mkVar("X1")), adm));
  Constraint c8;
  c8.kind = Constraint::Kind::Eq;
  c8.chain = {mkIntersect(mkVar("X0"), r1), mkIntersect(mkVar("X1"), r0), empty};
  s.constraints.push_back(std::move(c8));
  return s;
}

/// The lemma's stated solution as a window assignment.
inline WindowAssignment goalAssignment(const SigmaRingSpec& spec, const Window& w) {
  GoalBundle b = computeGoalBundle(spec, w);
  WindowAssignment a;
  a.window = w;
  a.values["X0"] = b.goal0;
  a.values["X1"] = b.goal1;
  auto materialize = [&](const std::function<bool(Int)>& fn) {
    WindowSet ws(w);
    for (Int n = 0; n <= w.hi; ++n)
      if (fn(n)) ws.set(n);
    return ws;
  };
  a.values["Y"] = materialize(b.yFn);
  a.values["Yt"] = materialize(b.ytildeFn);
  a.values["Z"] = materialize(b.zFn);
  return a;
}

/// {<w> : <10w> ∈ goal0}: the leading "10" stripped by the adapted
/// digit-removal expression.
inline WindowSet extractTarget(const WindowSet& goal0) {
  return buildRemoveTen().evalOn(goal0);
}

// --- spec file format -------------------------------------------------------------------
//
//   root <i0>
//   tau1 <e> -> <v>
//   tau2 <e> -> <v>
//   f <e> <n> -> <v>
//   f <e> * -> <v>
//   f <e> total

inline SigmaRingSpec SigmaRingSpec::parse(const std::string& text) {
  SigmaRingSpec spec;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  bool rootSeen = false;
  auto fail = [&](const std::string& msg) -> void {
    throw ParseError("ring spec line " + std::to_string(lineNo) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineNo;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    auto arrow = [&]() {
      std::string a;
      if (!(ls >> a) || a != "->") fail("expected ->");
    };
    if (head == "root") {
      Int v;
      if (!(ls >> v)) fail("expected index");
      spec.root = v;
      rootSeen = true;
    } else if (head == "tau1" || head == "tau2") {
      Int e, v;
      if (!(ls >> e)) fail("expected argument");
      arrow();
      if (!(ls >> v)) fail("expected value");
      auto& m = head == "tau1" ? spec.tau1 : spec.tau2;
      if (!m.emplace(e, v).second) fail(head + " has a duplicate entry for " + std::to_string(e));
    } else if (head == "f") {
      Int e;
      if (!(ls >> e)) fail("expected function index");
      std::string tok;
      if (!(ls >> tok)) fail("expected argument, * or total");
      if (tok == "total") {
        spec.f[e].total = true;
      } else if (tok == "*") {
        arrow();
        Int v;
        if (!(ls >> v)) fail("expected value");
        if (spec.f[e].defaultVal) fail("duplicate default for f_" + std::to_string(e));
        spec.f[e].defaultVal = v;
      } else {
        Int n = std::stoll(tok);
        arrow();
        Int v;
        if (!(ls >> v)) fail("expected value");
        if (!spec.f[e].entries.emplace(n, v).second)
          fail("duplicate entry f_" + std::to_string(e) + "(" + std::to_string(n) + ")");
      }
    } else {
      fail("unknown directive '" + head + "'");
    }
  }
  if (!rootSeen) throw ParseError("ring spec lacks a root line");
  spec.finalize();
  return spec;
}

inline std::string SigmaRingSpec::toText() const {
  std::ostringstream os;
  os << "root " << root << "\n";
  for (auto& [e, v] : tau1) os << "tau1 " << e << " -> " << v << "\n";
  for (auto& [e, v] : tau2) os << "tau2 " << e << " -> " << v << "\n";
  for (auto& [e, t] : f) {
    for (auto& [n, v] : t.entries) os << "f " << e << " " << n << " -> " << v << "\n";
    if (t.defaultVal) os << "f " << e << " * -> " << *t.defaultVal << "\n";
    if (t.total) os << "f " << e << " total\n";
  }
  return os.str();
}

/// Oracle table for systems emitted by buildHASystem, so files referencing
/// ha.* constants can be re-bound after parsing.
inline OracleTable haOracleTable(const SigmaRingSpec& spec) {
  GoalBundle b = computeGoalBundle(spec, Window::natDigits(1));
  return OracleTable{
      {"ha.R0", b.r0Fn},
      {"ha.R1", b.r1Fn},
      {"ha.Admissible", b.admissibleFn},
      {"ha.Goal0", b.goal0Fn},
      {"ha.Goal1", b.goal1Fn},
  };
}

}  // namespace zeq
