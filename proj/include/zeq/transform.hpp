#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "zeq/expr.hpp"

namespace zeq {

/// Replace every inclusion chain by the simulating equations:
/// each step φ ⊆ ψ becomes φ ∪ ψ = ψ. Solution sets are unchanged.
inline System inclusionToEquation(const System& s) {
  System out = s;
  out.constraints.clear();
  for (const auto& c : s.constraints) {
    if (c.kind == Constraint::Kind::Eq) {
      out.constraints.push_back(c);
      continue;
    }
    for (std::size_t k = 0; k + 1 < c.chain.size(); ++k)
      out.constraints.push_back(Constraint::eq(mkUnion(c.chain[k], c.chain[k + 1]), c.chain[k + 1]));
  }
  return out;
}

namespace detail {

inline Expr mapExpr(const Expr& e, const std::function<Expr(const ExprNode&)>& leaf) {
  switch (e->op) {
    case ExprOp::Var:
    case ExprOp::Const: return leaf(*e);
    case ExprOp::Negate: return mkNegate(mapExpr(e->a, leaf));
    default: return mkBinary(e->op, mapExpr(e->a, leaf), mapExpr(e->b, leaf));
  }
}

}  // namespace detail

/// Replace every constant C by -C. For systems over sets of integers built
/// from union and addition only, the solutions of the result are exactly the
/// negated solutions of the input.
inline System negateSystem(const System& s) {
  if (s.dom != Domain::Int) throw RegimeError("constant negation applies to int systems");
  for (const auto& c : s.constraints)
    for (const auto& e : c.chain)
      forEachNode(e, [](const ExprNode& n) {
        if (n.op != ExprOp::Var && n.op != ExprOp::Const && n.op != ExprOp::Union &&
            n.op != ExprOp::Add)
          throw RegimeError("constant negation requires union/addition systems");
        if (n.op == ExprOp::Const && n.cval->kind != ConstVal::Kind::UP)
          throw RegimeError("cannot negate a non-periodic constant");
      });
  System out = s;
  for (auto& [name, c] : out.consts) c.up = upNegate(c.up.widenToInt());
  // Expressions embed constant values: rebuild them against the new table.
  auto rebuild = [&](const Expr& e) {
    return detail::mapExpr(e, [&](const ExprNode& n) -> Expr {
      if (n.op == ExprOp::Var) return mkVar(n.var);
      return mkConst(n.constName, *out.findConst(n.constName));
    });
  };
  for (auto& c : out.constraints)
    for (auto& e : c.chain) e = rebuild(e);
  return out;
}

/// Join a system whose designated variable denotes S ∩ N with one denoting
/// (-S) ∩ N into a single int system whose fresh output variable denotes S.
/// Variables and constants of the inputs are prefixed (auto-renaming away any
/// collisions); the negative side goes through negateSystem.
struct AssembledSystem {
  System system;
  std::string outputVar;
};

inline AssembledSystem assemblePosNeg(const System& sPos, const std::string& posVar,
                                      const System& sNegPos, const std::string& negVar) {
  if (!sPos.hasVar(posVar)) throw Error("positive part lacks variable " + posVar);
  if (!sNegPos.hasVar(negVar)) throw Error("negative part lacks variable " + negVar);
  System neg = negateSystem(sNegPos);

  System out;
  out.dom = Domain::Int;
  auto import = [&](const System& src, const std::string& prefix) {
    std::map<std::string, std::string> vmap, cmap;
    for (const auto& v : src.vars) {
      vmap[v] = prefix + v;
      out.declareVar(prefix + v);
    }
    for (const auto& [n, c] : src.consts) {
      cmap[n] = prefix + n;
      out.declareConst(prefix + n, c);
    }
    for (const auto& c : src.constraints) {
      Constraint nc;
      nc.kind = c.kind;
      for (const auto& e : c.chain)
        nc.chain.push_back(detail::mapExpr(e, [&](const ExprNode& n) -> Expr {
          if (n.op == ExprOp::Var) return mkVar(vmap.at(n.var));
          return mkConst(cmap.at(n.constName), *n.cval);
        }));
      out.constraints.push_back(std::move(nc));
    }
    return vmap;
  };
  auto pm = import(sPos, "p_");
  auto nm = import(neg, "n_");
  std::string outVar = "X_asm";
  while (out.hasVar(outVar)) outVar += "_";
  out.declareVar(outVar);
  out.constraints.push_back(
      Constraint::eq(mkVar(outVar), mkUnion(mkVar(pm.at(posVar)), mkVar(nm.at(negVar)))));
  return AssembledSystem{std::move(out), outVar};
}

}  // namespace zeq
