#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zeq/common.hpp"
#include "zeq/digits.hpp"
#include "zeq/upset.hpp"
#include "zeq/window.hpp"

namespace zeq {

/// Intensional constant given by a total membership predicate, decidable on
/// any window. The name identifies it in the DSL; the function may be absent
/// after parsing until a registry binds it.
struct OracleConst {
  std::string name;
  std::function<bool(Int)> fn;
};

/// A constant of an equation system.
struct ConstVal {
  enum class Kind { UP, Pattern, Oracle };
  Kind kind = Kind::UP;
  UPSet up;
  DigitPattern pattern;
  OracleConst oracle;

  static ConstVal ofUP(UPSet s) {
    ConstVal c;
    c.kind = Kind::UP;
    c.up = std::move(s);
    return c;
  }
  static ConstVal ofPattern(DigitPattern p) {
    ConstVal c;
    c.kind = Kind::Pattern;
    c.pattern = std::move(p);
    return c;
  }
  static ConstVal ofOracle(std::string name, std::function<bool(Int)> fn = nullptr) {
    ConstVal c;
    c.kind = Kind::Oracle;
    c.oracle = OracleConst{std::move(name), std::move(fn)};
    return c;
  }

  WindowSet enumerate(const Window& w) const {
    switch (kind) {
      case Kind::UP: return up.enumerate(w);
      case Kind::Pattern: {
        WindowSet r = pattern.enumerate(w);
        r.setHorizon(w.full());  // patterns denote subsets of N: exact everywhere in the window
        return r;
      }
      case Kind::Oracle: {
        if (!oracle.fn) throw RegimeError("oracle constant '" + oracle.name + "' is unresolved");
        WindowSet r(w);
        for (Int n = w.lo; n <= w.hi; ++n)
          if (oracle.fn(n)) r.set(n);
        return r;
      }
    }
    throw Error("bad const kind");
  }

  bool structurallyEqual(const ConstVal& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
      case Kind::UP: return up == o.up;
      case Kind::Pattern: return pattern == o.pattern;
      case Kind::Oracle: return oracle.name == o.oracle.name;
    }
    return false;
  }
};

enum class ExprOp { Var, Const, Union, Intersect, Add, Sub, TruncSub, Negate };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

/// Immutable expression tree over set variables and constants.
struct ExprNode {
  ExprOp op;
  std::string var;        // Var
  std::string constName;  // Const: name in the owning system's constant table
  std::shared_ptr<const ConstVal> cval;
  Expr a, b;
};

inline Expr mkVar(std::string name) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprOp::Var;
  n->var = std::move(name);
  return n;
}

inline Expr mkConst(std::string name, ConstVal v) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprOp::Const;
  n->constName = std::move(name);
  n->cval = std::make_shared<ConstVal>(std::move(v));
  return n;
}

inline Expr mkBinary(ExprOp op, Expr a, Expr b) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

inline Expr mkUnion(Expr a, Expr b) { return mkBinary(ExprOp::Union, std::move(a), std::move(b)); }
inline Expr mkIntersect(Expr a, Expr b) { return mkBinary(ExprOp::Intersect, std::move(a), std::move(b)); }
inline Expr mkAdd(Expr a, Expr b) { return mkBinary(ExprOp::Add, std::move(a), std::move(b)); }
inline Expr mkSub(Expr a, Expr b) { return mkBinary(ExprOp::Sub, std::move(a), std::move(b)); }
inline Expr mkTruncSub(Expr a, Expr b) { return mkBinary(ExprOp::TruncSub, std::move(a), std::move(b)); }
inline Expr mkNegate(Expr a) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprOp::Negate;
  n->a = std::move(a);
  return n;
}

inline Expr mkUnionAll(std::vector<Expr> es) {
  if (es.empty()) throw Error("empty union");
  Expr r = es.front();
  for (std::size_t i = 1; i < es.size(); ++i) r = mkUnion(r, es[i]);
  return r;
}

inline bool structurallyEqual(const Expr& x, const Expr& y) {
  if (x == y) return true;
  if (!x || !y || x->op != y->op) return false;
  switch (x->op) {
    case ExprOp::Var: return x->var == y->var;
    case ExprOp::Const:
      return x->constName == y->constName && x->cval->structurallyEqual(*y->cval);
    case ExprOp::Negate: return structurallyEqual(x->a, y->a);
    default: return structurallyEqual(x->a, y->a) && structurallyEqual(x->b, y->b);
  }
}

inline void forEachNode(const Expr& e, const std::function<void(const ExprNode&)>& f) {
  if (!e) return;
  f(*e);
  forEachNode(e->a, f);
  forEachNode(e->b, f);
}

inline bool exprUsesVars(const Expr& e) {
  bool any = false;
  forEachNode(e, [&](const ExprNode& n) { any = any || n.op == ExprOp::Var; });
  return any;
}

inline bool exprContainsOp(const Expr& e, ExprOp op) {
  bool any = false;
  forEachNode(e, [&](const ExprNode& n) { any = any || n.op == op; });
  return any;
}

/// Constraint of a system: an equality chain e1 = e2 = ... or an inclusion
/// chain e1 ⊆ e2 ⊆ ... (at least two members).
struct Constraint {
  enum class Kind { Eq, Inc };
  Kind kind = Kind::Eq;
  std::vector<Expr> chain;

  static Constraint eq(Expr a, Expr b) { return Constraint{Kind::Eq, {std::move(a), std::move(b)}}; }
  static Constraint inc(Expr a, Expr b) { return Constraint{Kind::Inc, {std::move(a), std::move(b)}}; }
};

/// System of constraints over named set variables.
struct System {
  Domain dom = Domain::Nat;
  std::vector<std::string> vars;
  std::vector<std::pair<std::string, ConstVal>> consts;  // declaration order
  std::vector<Constraint> constraints;

  bool hasVar(const std::string& v) const {
    return std::find(vars.begin(), vars.end(), v) != vars.end();
  }
  const ConstVal* findConst(const std::string& name) const {
    for (auto& [n, c] : consts)
      if (n == name) return &c;
    return nullptr;
  }
  void declareVar(const std::string& v) {
    if (!hasVar(v)) vars.push_back(v);
  }
  void declareConst(const std::string& n, ConstVal c) {
    if (findConst(n)) throw Error("constant redeclared: " + n);
    consts.emplace_back(n, std::move(c));
  }

  /// Constraints of the form Var = Expr, one per variable: the resolved part.
  /// Returns var -> rhs, or nullopt if some variable lacks a defining
  /// equation or is defined twice.
  std::optional<std::map<std::string, Expr>> resolvedPart() const {
    std::map<std::string, Expr> defs;
    for (const auto& c : constraints) {
      if (c.kind != Constraint::Kind::Eq || c.chain.size() != 2) continue;
      if (c.chain[0]->op != ExprOp::Var) continue;
      const std::string& v = c.chain[0]->var;
      if (defs.count(v)) return std::nullopt;  // doubly defined
      defs[v] = c.chain[1];
    }
    for (const auto& v : vars)
      if (!defs.count(v)) return std::nullopt;
    return defs;
  }

  void validate() const {
    if (constraints.empty()) throw Error("constraint list is empty");
    for (const auto& c : constraints) {
      if (c.chain.size() < 2) throw Error("constraint chain too short");
      for (const auto& e : c.chain) {
        forEachNode(e, [&](const ExprNode& n) {
          if (n.op == ExprOp::Var && !hasVar(n.var)) throw Error("undeclared variable " + n.var);
          if (dom == Domain::Nat && (n.op == ExprOp::Sub || n.op == ExprOp::Negate))
            throw RegimeError("subtraction/negation over naturals");
          if (dom == Domain::Int && n.op == ExprOp::TruncSub)
            throw RegimeError("truncated subtraction in integer mode");
          if (n.op == ExprOp::Const && n.cval->kind == ConstVal::Kind::UP) {
            if (dom == Domain::Nat && n.cval->up.domain() != Domain::Nat)
              throw RegimeError("integer constant in nat system");
          }
        });
      }
    }
  }
};

/// Exact variable binding.
using ExactAssignment = std::map<std::string, UPSet>;

/// Windowed variable binding; all values share one window.
struct WindowAssignment {
  Window window;
  std::map<std::string, WindowSet> values;
};

enum class Regime { Exact, Windowed, Truncating };

inline const char* regimeName(Regime r) {
  switch (r) {
    case Regime::Exact: return "exact";
    case Regime::Windowed: return "windowed";
    case Regime::Truncating: return "truncating";
  }
  return "?";
}

enum class Status { Satisfied, Violated, Unknown };

inline const char* statusName(Status s) {
  switch (s) {
    case Status::Satisfied: return "satisfied";
    case Status::Violated: return "violated";
    case Status::Unknown: return "unknown-beyond-horizon";
  }
  return "?";
}

struct ConstraintVerdict {
  std::size_t index = 0;
  Status status = Status::Satisfied;
  std::optional<Int> witness;  // a concrete differing integer, inside horizons
  Iv checkedOn;                // interval the verdict covers (windowed regime)
  std::string detail;
};

struct SolveReport {
  Status status = Status::Satisfied;
  Regime regime = Regime::Windowed;
  std::vector<ConstraintVerdict> verdicts;
  std::map<std::string, Iv> horizons;
  std::vector<Int> iterations;  // per stratum / pass
  std::string note;
};

}  // namespace zeq
