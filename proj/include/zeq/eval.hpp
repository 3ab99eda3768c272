#pragma once

#include <optional>
#include <string>

#include "zeq/expr.hpp"

namespace zeq {

// --- exact regime -----------------------------------------------------------

/// Exact denotation via ultimately periodic arithmetic. All constants must be
/// ultimately periodic; patterns and oracles have no exact finite form.
inline UPSet evaluateExact(const Expr& e, const ExactAssignment& a, Domain dom) {
  switch (e->op) {
    case ExprOp::Var: {
      auto it = a.find(e->var);
      if (it == a.end()) throw Error("unbound variable " + e->var);
      return it->second;
    }
    case ExprOp::Const:
      if (e->cval->kind != ConstVal::Kind::UP)
        throw RegimeError("non-periodic constant '" + e->constName + "' in exact evaluation");
      return e->cval->up;
    case ExprOp::Union: return upUnion(evaluateExact(e->a, a, dom), evaluateExact(e->b, a, dom));
    case ExprOp::Intersect:
      return upIntersect(evaluateExact(e->a, a, dom), evaluateExact(e->b, a, dom));
    case ExprOp::Add: return upAdd(evaluateExact(e->a, a, dom), evaluateExact(e->b, a, dom));
    case ExprOp::Sub:
      if (dom == Domain::Nat) throw RegimeError("subtraction over naturals");
      return upSubtract(evaluateExact(e->a, a, dom), evaluateExact(e->b, a, dom));
    case ExprOp::TruncSub:
      return upTruncSub(evaluateExact(e->a, a, dom), evaluateExact(e->b, a, dom));
    case ExprOp::Negate:
      if (dom == Domain::Nat) throw RegimeError("negation over naturals");
      return upNegate(evaluateExact(e->a, a, dom));
  }
  throw Error("bad expr");
}

// --- windowed regime ---------------------------------------------------------
//
// Results carry an exactness horizon. Rules, with h = operand horizons:
//   Const                -> full window (constants are intensional)
//   Var                  -> the assignment's horizon
//   Union / Intersect    -> meet of horizons
//   Add  (nat window)    -> [0, min hi]           (sums only look downward)
//   Add  (int window)    -> shift by a finite constant's support, else unsound
//   Sub  (int window)    -> via a finite constant's support, else unsound
//   TruncSub w/ constant -> finite support: shift; unbounded digit constant:
//                           one digit level off the minuend horizon (the
//                           guarded gadget contract); else unsound
//   Negate               -> mirrored horizon
// "Constant" means a variable-free subtree; variable-free all-UP subtrees are
// folded exactly first.

namespace detail {

/// Largest D with 7^D - 1 <= v (0 when v < 6).
inline Int digitLevel(Int v) {
  Int d = 0;
  while (pow7(d + 1) - 1 <= v) ++d;
  return d;
}

inline Iv shrinkOneDigit(const Iv& h) {
  if (h.empty()) return h;
  Int lvl = digitLevel(h.hi);
  if (lvl < 1) return Iv{0, -1};
  Int hi = pow7(lvl - 1) - 1;
  Int lo = h.lo;
  if (lo < 0) {
    Int nl = digitLevel(-lo);
    lo = nl < 1 ? 0 : -(pow7(nl - 1) - 1);
  }
  return Iv{lo, hi};
}

struct ConstInfo {
  bool varFree = false;
  std::optional<UPSet> exact;      // when the subtree is all-UP
  std::optional<Int> minSupport;   // of the exact value (finite sets only)
  std::optional<Int> maxSupport;
  bool unboundedAbove = false;
  bool unboundedBelow = false;
};

inline ConstInfo analyzeConst(const Expr& e, Domain dom) {
  ConstInfo info;
  if (exprUsesVars(e)) return info;
  info.varFree = true;
  bool allUP = true;
  forEachNode(e, [&](const ExprNode& n) {
    if (n.op == ExprOp::Const && n.cval->kind != ConstVal::Kind::UP) allUP = false;
  });
  if (allUP) {
    info.exact = evaluateExact(e, {}, dom);
    const UPSet& s = *info.exact;
    if (s.isFinite()) {
      info.minSupport = s.minElement();
      info.maxSupport = s.maxElement();
    } else {
      info.unboundedAbove = !s.posTail().empty();
      info.unboundedBelow = !s.negTail().empty();
      info.minSupport = s.minElement();
      info.maxSupport = s.maxElement();
    }
  } else {
    // pattern or oracle in the tree: values are naturals, unbounded above
    info.unboundedAbove = true;
    info.minSupport = 0;
  }
  return info;
}

}  // namespace detail

struct WEvalOptions {
  bool strict = false;  // throw instead of flagging horizon-unsound results
};

inline WindowSet evaluateWindowed(const Expr& e, const WindowAssignment& a,
                                  const WEvalOptions& opt = {}) {
  const Window& w = a.window;
  Domain dom = w.natMode() ? Domain::Nat : Domain::Int;
  auto unsoundResult = [&](WindowSet r, const std::string& why) {
    if (opt.strict) throw RegimeError("horizon-unsound node: " + why);
    r.markUnsound();
    return r;
  };
  switch (e->op) {
    case ExprOp::Var: {
      auto it = a.values.find(e->var);
      if (it == a.values.end()) throw Error("unbound variable " + e->var);
      return it->second;
    }
    case ExprOp::Const: {
      WindowSet r = e->cval->enumerate(w);
      r.setHorizon(w.full());
      return r;
    }
    case ExprOp::Union:
      return winUnion(evaluateWindowed(e->a, a, opt), evaluateWindowed(e->b, a, opt));
    case ExprOp::Intersect:
      return winIntersect(evaluateWindowed(e->a, a, opt), evaluateWindowed(e->b, a, opt));
    case ExprOp::Negate: {
      if (w.natMode()) throw RegimeError("negation over naturals");
      return winNegate(evaluateWindowed(e->a, a, opt));
    }
    case ExprOp::Add: {
      // Fold a variable-free all-UP side to its exact value for the horizon
      // analysis on int windows.
      detail::ConstInfo ca = detail::analyzeConst(e->a, dom);
      detail::ConstInfo cb = detail::analyzeConst(e->b, dom);
      WindowSet va = evaluateWindowed(e->a, a, opt);
      WindowSet vb = evaluateWindowed(e->b, a, opt);
      WindowSet r = winAdd(va, vb);
      if (w.natMode()) return r;  // winAdd already set [0, min hi]
      if (ca.varFree && cb.varFree && ca.exact && cb.exact) {
        // exact piece: compute via UP arithmetic instead
        UPSet s = upAdd(*ca.exact, *cb.exact);
        WindowSet rr = s.enumerate(w);
        rr.setHorizon(w.full());
        return rr;
      }
      const detail::ConstInfo* ci = nullptr;
      const WindowSet* other = nullptr;
      if (ca.varFree && ca.exact) {
        ci = &ca;
        other = &vb;
      } else if (cb.varFree && cb.exact) {
        ci = &cb;
        other = &va;
      }
      if (ci && !ci->unboundedAbove && !ci->unboundedBelow) {
        if (!ci->minSupport) {  // adding the empty set
          WindowSet rr(w);
          return rr;
        }
        Iv h = other->horizon();
        Iv nh{checkedAdd(h.lo, *ci->maxSupport), checkedAdd(h.hi, *ci->minSupport)};
        r.certify(nh);
        if (other->unsound()) r.markUnsound();
        return r;
      }
      return unsoundResult(r, "addition over an int window without a finite constant side");
    }
    case ExprOp::Sub: {
      if (w.natMode()) throw RegimeError("subtraction over naturals");
      detail::ConstInfo cb = detail::analyzeConst(e->b, dom);
      WindowSet va = evaluateWindowed(e->a, a, opt);
      WindowSet vb = evaluateWindowed(e->b, a, opt);
      WindowSet r = winSub(va, vb);
      if (cb.varFree && cb.exact && !cb.unboundedAbove && !cb.unboundedBelow) {
        if (!cb.minSupport) return WindowSet(w);
        Iv h = va.horizon();
        Iv nh{checkedSub(h.lo, *cb.minSupport), checkedSub(h.hi, *cb.maxSupport)};
        r.certify(nh);
        if (va.unsound()) r.markUnsound();
        return r;
      }
      return unsoundResult(r, "subtraction without a finite constant subtrahend");
    }
    case ExprOp::TruncSub: {
      if (!w.natMode()) throw RegimeError("truncated subtraction on an int window");
      detail::ConstInfo cb = detail::analyzeConst(e->b, dom);
      WindowSet va = evaluateWindowed(e->a, a, opt);
      WindowSet vb = evaluateWindowed(e->b, a, opt);
      WindowSet r = winTruncSub(va, vb);
      if (!cb.varFree) return unsoundResult(r, "truncated subtraction by a variable expression");
      if (cb.exact && !cb.unboundedAbove) {
        if (!cb.minSupport) return WindowSet(w);  // subtracting nothing of the empty set
        Iv h = va.horizon();
        r.certify(Iv{0, checkedSub(h.hi, *cb.maxSupport)});
        if (va.unsound() || vb.unsound()) r.markUnsound();
        return r;
      }
      // Unbounded digit constant: the guarded-gadget contract, one digit off.
      Iv h = Iv::meet(va.horizon(), vb.horizon());
      r.certify(detail::shrinkOneDigit(h));
      if (va.unsound() || vb.unsound()) r.markUnsound();
      return r;
    }
  }
  throw Error("bad expr");
}

}  // namespace zeq
