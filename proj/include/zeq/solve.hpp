#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "zeq/eval.hpp"
#include "zeq/expr.hpp"

namespace zeq {

namespace detail {

inline std::optional<Int> firstDiffIn(const WindowSet& a, const WindowSet& b, const Iv& iv) {
  if (iv.empty()) return std::nullopt;
  for (Int n = iv.lo; n <= iv.hi; ++n)
    if (a.get(n) != b.get(n)) return n;
  return std::nullopt;
}

inline std::optional<Int> firstNotSubsetIn(const WindowSet& a, const WindowSet& b, const Iv& iv) {
  if (iv.empty()) return std::nullopt;
  for (Int n = iv.lo; n <= iv.hi; ++n)
    if (a.get(n) && !b.get(n)) return n;
  return std::nullopt;
}

}  // namespace detail

// --- solution checking -------------------------------------------------------

/// Check every constraint pointwise on the meet of both sides' horizons.
/// An empty overlap yields unknown-beyond-horizon, never a silent pass.
inline SolveReport checkSolution(const System& s, const WindowAssignment& a,
                                 const WEvalOptions& opt = {}) {
  SolveReport rep;
  rep.regime = Regime::Windowed;
  for (std::size_t i = 0; i < s.constraints.size(); ++i) {
    const Constraint& c = s.constraints[i];
    ConstraintVerdict v;
    v.index = i;
    v.status = Status::Satisfied;
    v.checkedOn = a.window.full();
    std::vector<WindowSet> vals;
    for (const auto& e : c.chain) vals.push_back(evaluateWindowed(e, a, opt));
    for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
      Iv iv = Iv::meet(vals[k].horizon(), vals[k + 1].horizon());
      v.checkedOn = Iv::meet(v.checkedOn, iv);
      if (iv.empty()) {
        if (v.status == Status::Satisfied) v.status = Status::Unknown;
        continue;
      }
      std::optional<Int> w =
          c.kind == Constraint::Kind::Eq
              ? detail::firstDiffIn(vals[k], vals[k + 1], iv)
              : detail::firstNotSubsetIn(vals[k], vals[k + 1], iv);
      if (w) {
        v.status = Status::Violated;
        v.witness = w;
        break;
      }
    }
    if (v.status == Status::Violated)
      rep.status = Status::Violated;
    else if (v.status == Status::Unknown && rep.status != Status::Violated)
      rep.status = Status::Unknown;
    rep.verdicts.push_back(std::move(v));
  }
  for (const auto& [name, ws] : a.values) rep.horizons[name] = ws.horizon();
  return rep;
}

/// Exact-regime check: equality of canonical forms, inclusions via union.
inline SolveReport checkSolutionExact(const System& s, const ExactAssignment& a) {
  SolveReport rep;
  rep.regime = Regime::Exact;
  for (std::size_t i = 0; i < s.constraints.size(); ++i) {
    const Constraint& c = s.constraints[i];
    ConstraintVerdict v;
    v.index = i;
    v.status = Status::Satisfied;
    std::vector<UPSet> vals;
    for (const auto& e : c.chain) vals.push_back(evaluateExact(e, a, s.dom));
    for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
      if (c.kind == Constraint::Kind::Eq) {
        if (auto w = upFirstDifference(vals[k], vals[k + 1])) {
          v.status = Status::Violated;
          v.witness = w;
          break;
        }
      } else {
        UPSet u = upUnion(vals[k], vals[k + 1]);
        if (auto w = upFirstDifference(u, vals[k + 1])) {
          v.status = Status::Violated;
          v.witness = w;
          break;
        }
      }
    }
    if (v.status == Status::Violated) rep.status = Status::Violated;
    rep.verdicts.push_back(std::move(v));
  }
  return rep;
}

// --- Kleene fixed points -------------------------------------------------------

enum class FixMode { Least, Greatest };

struct KleeneResult {
  WindowAssignment assignment;
  SolveReport report;
};

/// Least (from all-empty) or greatest (from all-full) fixed point of the
/// resolved part, computed digit stratum by digit stratum, then stabilized on
/// the full window. Remaining constraints are checked against the result.
inline KleeneResult kleeneSolve(const System& s, const Window& w, FixMode mode,
                                Regime regime = Regime::Windowed) {
  s.validate();
  auto defs = s.resolvedPart();
  if (!defs) throw RegimeError("system is not resolved: every variable needs exactly one defining equation");
  KleeneResult res;
  res.assignment.window = w;
  res.report.regime = regime;
  for (const auto& v : s.vars)
    res.assignment.values[v] = mode == FixMode::Least ? WindowSet(w) : WindowSet::fullSet(w);

  WEvalOptions opt;  // non-strict: horizons are recomputed after the fixpoint
  Int hardCap = w.size() * static_cast<Int>(s.vars.size()) + w.digitCap() + 8;
  Int totalIters = 0;

  auto pass = [&](Int clipLo, Int clipHi) {
    bool changed = false;
    for (const auto& v : s.vars) {
      WindowSet nv = evaluateWindowed(defs->at(v), res.assignment, opt);
      if (clipLo > w.lo || clipHi < w.hi) {
        WindowSet clipped(w);
        nv.forEach([&](Int n) {
          if (n >= clipLo && n <= clipHi) clipped.set(n);
        });
        nv = clipped;
      }
      if (!nv.sameBits(res.assignment.values[v])) {
        res.assignment.values[v] = nv;
        changed = true;
      }
    }
    return changed;
  };

  if (mode == FixMode::Least) {
    for (Int level = 1; level <= w.digitCap(); ++level) {
      Int hi = std::min(w.hi, pow7(level) - 1);
      Int lo = std::max(w.lo, -(pow7(level) - 1));
      Int iters = 0;
      while (pass(lo, hi)) {
        if (++totalIters > hardCap) throw Error("fixed-point iteration did not converge");
        ++iters;
      }
      res.report.iterations.push_back(iters);
    }
  }
  {
    Int iters = 0;
    while (pass(w.lo, w.hi)) {
      if (++totalIters > hardCap) throw Error("fixed-point iteration did not converge");
      ++iters;
    }
    res.report.iterations.push_back(iters);
  }

  // Horizon pass: iterate the horizon transfer from full-window until stable.
  for (auto& [v, ws] : res.assignment.values) ws.setHorizon(w.full());
  for (int round = 0; round < 50; ++round) {
    bool stable = true;
    std::map<std::string, Iv> nh;
    for (const auto& v : s.vars) {
      WindowSet r = evaluateWindowed(defs->at(v), res.assignment, opt);
      nh[v] = r.unsound() ? Iv{0, -1} : r.horizon();
    }
    for (const auto& v : s.vars) {
      if (!(res.assignment.values[v].horizon() == nh[v])) stable = false;
      res.assignment.values[v].setHorizon(nh[v]);
    }
    if (stable) break;
    if (round == 49) {
      res.report.note = "horizon iteration did not stabilize; reporting last bound";
      res.report.status = Status::Unknown;
    }
  }
  for (const auto& v : s.vars) res.report.horizons[v] = res.assignment.values[v].horizon();

  // Verify any constraints beyond the defining equations.
  std::set<const Constraint*> defining;
  {
    std::set<std::string> seen;
    for (const auto& c : s.constraints)
      if (c.kind == Constraint::Kind::Eq && c.chain.size() == 2 && c.chain[0]->op == ExprOp::Var &&
          seen.insert(c.chain[0]->var).second)
        defining.insert(&c);
  }
  System rest = s;
  rest.constraints.clear();
  for (const auto& c : s.constraints)
    if (!defining.count(&c)) rest.constraints.push_back(c);
  if (!rest.constraints.empty()) {
    SolveReport chk = checkSolution(rest, res.assignment, opt);
    for (auto& v : chk.verdicts) res.report.verdicts.push_back(v);
    if (chk.status == Status::Violated) res.report.status = Status::Violated;
    else if (chk.status == Status::Unknown && res.report.status == Status::Satisfied)
      res.report.status = Status::Unknown;
  }
  return res;
}

// --- exhaustive solving on a tiny universe -------------------------------------
//
// Truncating semantics: every operation is evaluated on the universe window
// and elements outside are discarded, identically to what the Kleene solver
// does on the same window.

namespace detail {

inline WindowSet evalTruncating(const Expr& e, const std::map<std::string, WindowSet>& a,
                                const Window& w) {
  switch (e->op) {
    case ExprOp::Var: return a.at(e->var);
    case ExprOp::Const: return e->cval->enumerate(w);
    case ExprOp::Union: return winUnion(evalTruncating(e->a, a, w), evalTruncating(e->b, a, w));
    case ExprOp::Intersect:
      return winIntersect(evalTruncating(e->a, a, w), evalTruncating(e->b, a, w));
    case ExprOp::Add: return winAdd(evalTruncating(e->a, a, w), evalTruncating(e->b, a, w));
    case ExprOp::Sub: return winSub(evalTruncating(e->a, a, w), evalTruncating(e->b, a, w));
    case ExprOp::TruncSub:
      return winTruncSub(evalTruncating(e->a, a, w), evalTruncating(e->b, a, w));
    case ExprOp::Negate: return winNegate(evalTruncating(e->a, a, w));
  }
  throw Error("bad expr");
}

}  // namespace detail

struct BruteResult {
  Window universe;
  std::vector<std::map<std::string, std::set<Int>>> solutions;  // deterministic order
};

/// All assignments over subsets of the universe satisfying every constraint
/// under truncating semantics. The universe is {0..u} in nat mode and
/// {-u..u} in int mode.
inline BruteResult bruteForceSolutions(const System& s, Int u) {
  s.validate();
  if (u < 0 || u > 16) throw Error("universe cap exceeded (u must be in 0..16)");
  if (s.vars.size() > 3) throw Error("universe cap exceeded (at most 3 variables)");
  Window w = s.dom == Domain::Nat ? Window(0, u) : Window(-u, u);
  Int span = w.size();
  if (span * static_cast<Int>(s.vars.size()) > 26) throw Error("universe cap exceeded (enumeration too large)");

  BruteResult out;
  out.universe = w;
  std::size_t nv = s.vars.size();
  std::vector<std::uint64_t> mask(nv, 0);
  std::uint64_t limit = std::uint64_t(1) << span;

  std::map<std::string, WindowSet> asg;
  auto rebuild = [&](std::size_t vi) {
    WindowSet ws(w);
    for (Int i = 0; i < span; ++i)
      if ((mask[vi] >> i) & 1) ws.set(w.lo + i);
    asg[s.vars[vi]] = ws;
  };

  std::function<void(std::size_t)> rec = [&](std::size_t vi) {
    if (vi == nv) {
      for (const auto& c : s.constraints) {
        std::vector<WindowSet> vals;
        for (const auto& e : c.chain) vals.push_back(detail::evalTruncating(e, asg, w));
        for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
          bool ok = c.kind == Constraint::Kind::Eq ? vals[k].sameBits(vals[k + 1])
                                                   : vals[k].subsetOf(vals[k + 1]);
          if (!ok) return;
        }
      }
      std::map<std::string, std::set<Int>> sol;
      for (const auto& v : s.vars) sol[v] = asg.at(v).valueSet();
      out.solutions.push_back(std::move(sol));
      return;
    }
    for (mask[vi] = 0; mask[vi] < limit; ++mask[vi]) {
      rebuild(vi);
      rec(vi + 1);
    }
  };
  if (nv == 0) throw Error("system has no variables");
  rec(0);
  return out;
}

}  // namespace zeq
