#pragma once

#include <set>
#include <string>
#include <vector>

#include "zeq/eval.hpp"
#include "zeq/expr.hpp"
#include "zeq/solve.hpp"

namespace zeq {

/// Registers constants in a system's table while building expressions,
/// deduplicating by name.
class ConstPool {
 public:
  explicit ConstPool(System& sys) : sys_(sys) {}

  Expr up(const std::string& name, const UPSet& v) { return intern(name, ConstVal::ofUP(v)); }

  Expr pattern(const std::string& name, const std::string& src) {
    if (const ConstVal* c = sys_.findConst(name)) return mkConst(name, *c);
    return intern(name, ConstVal::ofPattern(DigitPattern::compile(src)));
  }

  Expr oracle(const std::string& name, const std::string& oracleName, std::function<bool(Int)> fn) {
    return intern(name, ConstVal::ofOracle(oracleName, std::move(fn)));
  }

  Expr intern(const std::string& name, ConstVal v) {
    if (const ConstVal* c = sys_.findConst(name)) {
      if (!c->structurallyEqual(v)) throw Error("constant name clash: " + name);
      return mkConst(name, *c);
    }
    sys_.declareConst(name, v);
    return mkConst(name, v);
  }

 private:
  System& sys_;
};

// --- expression builders ------------------------------------------------------
//
// The digit-level constructions: stripping a leading 1, the existential
// quantifier over {3,6}* prefixes, prepending {3,6} digits, and stripping a
// leading "10".

/// ((X -. {1}) ∩ {0})  ∪  ⋃_{i≠0,t} [(X ∩ <1 i W^t (WW)*>) -. <1 0*>] ∩ <i W^t (WW)*>
inline Expr buildRemoveoneExpr(const Expr& x, ConstPool& pool) {
  std::vector<Expr> parts;
  parts.push_back(mkIntersect(mkTruncSub(x, pool.up("one", UPSet::finite({1}, Domain::Nat))),
                              pool.up("zero", UPSet::finite({0}, Domain::Nat))));
  Expr sub = pool.pattern("p10s", "1 0*");
  for (int i = 1; i <= 6; ++i) {
    for (int t = 0; t <= 1; ++t) {
      std::string d(1, static_cast<char>('0' + i));
      std::string tail = t == 0 ? " (W W)*" : " W (W W)*";
      Expr gin = pool.pattern("rm_in_" + d + std::to_string(t), "1 " + d + tail);
      Expr gout = pool.pattern("rm_out_" + d + std::to_string(t), d + tail);
      parts.push_back(mkIntersect(mkTruncSub(mkIntersect(x, gin), sub), gout));
    }
  }
  return mkUnionAll(parts);
}

/// (X ∩ <1 W*>) ∪ ([(X ∩ <[36]+ 1 W*>) -. <[36]+ 0*>] ∩ <1 W*>)
inline Expr buildEExpr(const Expr& x, ConstPool& pool) {
  Expr p1w = pool.pattern("p1W", "1 W*");
  Expr pin = pool.pattern("p36_1W", "[36]+ 1 W*");
  Expr psub = pool.pattern("p36_0s", "[36]+ 0*");
  return mkUnion(mkIntersect(x, p1w), mkIntersect(mkTruncSub(mkIntersect(x, pin), psub), p1w));
}

/// The prepend-one-{3,6}-digit operator:
///   ⋃_{i,j∈{3,6}} [([(Y ∩ <j W*>) + <2 0*>] ∩ <2 j W*>) + <(i-2) 0*>] ∩ <i j W*>
/// ∪ ⋃_{i∈{3,6}}  [(Y ∩ <1 W*>) + <i 0*>] ∩ <i 1 W*>
inline Expr buildAppend36Expr(const Expr& y, ConstPool& pool) {
  std::vector<Expr> parts;
  Expr p20s = pool.pattern("p20s", "2 0*");
  for (char j : {'3', '6'}) {
    std::string js(1, j);
    Expr guardJ = pool.pattern("pj" + js, js + " W*");
    Expr step1 = mkIntersect(mkAdd(mkIntersect(y, guardJ), p20s),
                             pool.pattern("p2" + js, "2 " + js + " W*"));
    for (char i : {'3', '6'}) {
      std::string is(1, i);
      std::string shiftDigit(1, static_cast<char>(i - 2));  // 3 -> '1', 6 -> '4'
      Expr shift = pool.pattern("p" + shiftDigit + "0s", shiftDigit + " 0*");
      parts.push_back(
          mkIntersect(mkAdd(step1, shift), pool.pattern("p" + is + js, is + " " + js + " W*")));
    }
  }
  Expr p1w = pool.pattern("p1W", "1 W*");
  for (char i : {'3', '6'}) {
    std::string is(1, i);
    Expr shift = pool.pattern("p" + is + "0s", is + " 0*");
    parts.push_back(
        mkIntersect(mkAdd(mkIntersect(y, p1w), shift), pool.pattern("p" + is + "1", is + " 1 W*")));
  }
  return mkUnionAll(parts);
}

/// Strips a leading "10":
///   ((X -. {7}) ∩ {0}) ∪ ⋃_{i≠0,t} [(X ∩ <1 0 i W^t (WW)*>) -. <1 0 0*>] ∩ <i W^t (WW)*>
inline Expr buildRemoveTenExpr(const Expr& x, ConstPool& pool) {
  std::vector<Expr> parts;
  parts.push_back(mkIntersect(mkTruncSub(x, pool.up("seven", UPSet::finite({7}, Domain::Nat))),
                              pool.up("zero", UPSet::finite({0}, Domain::Nat))));
  Expr sub = pool.pattern("p100s", "1 0 0*");
  for (int i = 1; i <= 6; ++i) {
    for (int t = 0; t <= 1; ++t) {
      std::string d(1, static_cast<char>('0' + i));
      std::string tail = t == 0 ? " (W W)*" : " W (W W)*";
      Expr gin = pool.pattern("rt_in_" + d + std::to_string(t), "1 0 " + d + tail);
      Expr gout = pool.pattern("rm_out_" + d + std::to_string(t), d + tail);
      parts.push_back(mkIntersect(mkTruncSub(mkIntersect(x, gin), sub), gout));
    }
  }
  return mkUnionAll(parts);
}

/// A gadget expression over the single variable X, with the admissible input
/// domain and certified horizon shrink. Within the admissible domain the
/// expression equals its definitional oracle on the shrunken horizon.
struct GadgetExpr {
  System carrier;  // holds the constant table; single var "X"
  Expr expr;
  DigitPattern admissibleDomain;
  Int horizonShrinkDigits = 1;

  WindowSet evalOn(const WindowSet& input, const WEvalOptions& opt = {}) const {
    WindowAssignment a;
    a.window = input.window();
    a.values["X"] = input;
    return evaluateWindowed(expr, a, opt);
  }
};

inline GadgetExpr buildRemoveone() {
  GadgetExpr g;
  g.carrier.dom = Domain::Nat;
  g.carrier.declareVar("X");
  g.carrier.declareVar("OUT");
  ConstPool pool(g.carrier);
  g.expr = buildRemoveoneExpr(mkVar("X"), pool);
  g.carrier.constraints.push_back(Constraint::eq(mkVar("OUT"), g.expr));
  g.admissibleDomain = DigitPattern::compile("1 W* \\ 1 0 W*");
  g.horizonShrinkDigits = 1;
  return g;
}

inline GadgetExpr buildE() {
  GadgetExpr g;
  g.carrier.dom = Domain::Nat;
  g.carrier.declareVar("X");
  g.carrier.declareVar("OUT");
  ConstPool pool(g.carrier);
  g.expr = buildEExpr(mkVar("X"), pool);
  g.carrier.constraints.push_back(Constraint::eq(mkVar("OUT"), g.expr));
  g.admissibleDomain = DigitPattern::compile("[36]* 1 W*");
  g.horizonShrinkDigits = 1;
  return g;
}

inline GadgetExpr buildRemoveTen() {
  GadgetExpr g;
  g.carrier.dom = Domain::Nat;
  g.carrier.declareVar("X");
  g.carrier.declareVar("OUT");
  ConstPool pool(g.carrier);
  g.expr = buildRemoveTenExpr(mkVar("X"), pool);
  g.carrier.constraints.push_back(Constraint::eq(mkVar("OUT"), g.expr));
  g.admissibleDomain = DigitPattern::compile("1 0 W*");
  g.horizonShrinkDigits = 1;
  return g;
}

// --- systems -------------------------------------------------------------------

/// Y = X ∪ append36(Y) for a constant seed X ⊆ <1 W*>.
inline System buildAppend36System(const ConstVal& seed) {
  System s;
  s.dom = Domain::Nat;
  s.declareVar("Y");
  ConstPool pool(s);
  Expr x = pool.intern("SEED", seed);
  s.constraints.push_back(Constraint::eq(mkVar("Y"), mkUnion(x, buildAppend36Expr(mkVar("Y"), pool))));
  return s;
}

/// The universal-quantifier system over Y, Yt, Z for constants S, St:
///   Y = Z ∪ append36(Y)
///   Yt = E(St) ∪ append36(Yt)
///   Z ⊆ <1 W+>
///   Y ⊆ S ⊆ Y ∪ Yt
inline System buildASystem(const ConstVal& S, const ConstVal& St) {
  System s;
  s.dom = Domain::Nat;
  s.declareVar("Y");
  s.declareVar("Yt");
  s.declareVar("Z");
  ConstPool pool(s);
  Expr cs = pool.intern("S", S);
  Expr cst = pool.intern("St", St);
  s.constraints.push_back(
      Constraint::eq(mkVar("Y"), mkUnion(mkVar("Z"), buildAppend36Expr(mkVar("Y"), pool))));
  s.constraints.push_back(
      Constraint::eq(mkVar("Yt"), mkUnion(buildEExpr(cst, pool), buildAppend36Expr(mkVar("Yt"), pool))));
  s.constraints.push_back(Constraint::inc(mkVar("Z"), pool.pattern("p1Wp", "1 W+")));
  Constraint chain;
  chain.kind = Constraint::Kind::Inc;
  chain.chain = {mkVar("Y"), cs, mkUnion(mkVar("Y"), mkVar("Yt"))};
  s.constraints.push_back(std::move(chain));
  return s;
}

// --- definitional oracles -------------------------------------------------------

inline std::optional<std::string> stripLeadingThreeSixes(const std::string& w) {
  std::size_t i = 0;
  while (i < w.size() && (w[i] == '3' || w[i] == '6')) ++i;
  if (i >= w.size() || w[i] != '1') return std::nullopt;
  return w.substr(i);
}

/// {<w> : <1w> ∈ S}.
inline std::set<Int> oracleRemoveone(const std::set<Int>& S) {
  std::set<Int> out;
  for (Int m : S) {
    if (m <= 0) continue;
    std::string w = rep7(m);
    if (w[0] == '1') out.insert(val7(w.substr(1)));
  }
  return out;
}

/// {<w> : <10w> ∈ S}.
inline std::set<Int> oracleRemoveTen(const std::set<Int>& S) {
  std::set<Int> out;
  for (Int m : S) {
    if (m <= 0) continue;
    std::string w = rep7(m);
    if (w.size() >= 2 && w[0] == '1' && w[1] == '0') out.insert(val7(w.substr(2)));
  }
  return out;
}

/// E(S) = {<1w> : ∃x ∈ {3,6}*: <x1w> ∈ S}.
inline std::set<Int> oracleE(const std::set<Int>& S) {
  std::set<Int> out;
  for (Int m : S) {
    if (m <= 0) continue;
    if (auto rest = stripLeadingThreeSixes(rep7(m))) out.insert(val7(*rest));
  }
  return out;
}

/// {<x1w> : x ∈ {3,6}*, <1w> ∈ X} restricted to values <= maxValue.
inline std::set<Int> oracleAppend(const std::set<Int>& X, Int maxValue) {
  std::set<Int> out;
  std::vector<std::pair<Int, Int>> queue;  // (value, 7^length)
  for (Int m : X) {
    if (m <= 0 || m > maxValue) continue;
    std::string w = rep7(m);
    if (w[0] != '1') continue;
    out.insert(m);
    queue.emplace_back(m, pow7(static_cast<Int>(w.size())));
  }
  while (!queue.empty()) {
    auto [v, place] = queue.back();
    queue.pop_back();
    for (Int d : {Int(3), Int(6)}) {
      Int nv = checkedAdd(v, checkedMul(d, place));
      if (nv > maxValue) continue;
      if (out.insert(nv).second) queue.emplace_back(nv, checkedMul(place, 7));
    }
  }
  return out;
}

/// A(S) over window-representable witnesses: {<1w> ∈ S : every <x1w> with
/// value <= maxValue lies in S}.
inline std::set<Int> oracleA(const std::set<Int>& S, Int maxValue) {
  std::set<Int> out;
  for (Int m : S) {
    if (m <= 0) continue;
    std::string w = rep7(m);
    if (w[0] != '1') continue;
    bool all = true;
    std::vector<std::pair<Int, Int>> queue{{m, pow7(static_cast<Int>(w.size()))}};
    while (!queue.empty() && all) {
      auto [v, place] = queue.back();
      queue.pop_back();
      for (Int d : {Int(3), Int(6)}) {
        Int nv = checkedAdd(v, checkedMul(d, place));
        if (nv > maxValue) continue;
        if (!S.count(nv)) {
          all = false;
          break;
        }
        queue.emplace_back(nv, checkedMul(place, 7));
      }
    }
    if (all) out.insert(m);
  }
  return out;
}

/// The lemma's stated solution of the universal-quantifier system, computed
/// from the oracles (window-restricted).
struct ASolution {
  std::set<Int> Y, Yt, Z;
};

inline ASolution oracleASolution(const std::set<Int>& S, const std::set<Int>& St, Int maxValue) {
  ASolution sol;
  sol.Z = oracleA(S, maxValue);
  sol.Y = oracleAppend(sol.Z, maxValue);
  sol.Yt = oracleAppend(oracleE(St), maxValue);
  return sol;
}

// --- the quantifier-prefix pipeline ----------------------------------------------

struct ArithStageResult {
  char quantifier;          // 'E' or 'A'
  std::set<Int> input;      // the set fed to this stage
  std::set<Int> gadget;     // gadget-route value (after the quantifier, before strip)
  std::set<Int> oracle;     // definitional-oracle value
  std::set<Int> stripped;   // after removing the leading 1
};

struct ArithRun {
  std::vector<ArithStageResult> stages;  // innermost first
  std::set<Int> gadgetFinal;
  std::set<Int> oracleFinal;
};

/// Functional evaluation of a quantifier prefix over a decidable constant.
/// The gadget route evaluates the E expression / solves the appendthreesix
/// equation; the oracle route applies the definitional set functions. Both
/// are computed per stage for comparison.
inline ArithRun runArithPipeline(const ConstVal& R, const std::string& prefix, const Window& w) {
  if (prefix.empty()) throw Error("empty quantifier prefix");
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (prefix[i] != 'E' && prefix[i] != 'A') throw Error("prefix must consist of E and A");
    if (i > 0 && prefix[i] == prefix[i - 1]) throw Error("prefix must alternate E and A");
  }
  if (!w.natMode()) throw Error("pipeline runs on nat windows");
  DigitPattern domainPat = DigitPattern::compile("[36]* 1 W*");
  WindowSet domainWs = domainPat.enumerate(w);

  ArithRun run;
  std::set<Int> cur = R.enumerate(w).valueSet();
  GadgetExpr eGadget = buildE();
  GadgetExpr stripGadget = buildRemoveone();
  for (std::size_t qi = prefix.size(); qi-- > 0;) {
    ArithStageResult st;
    st.quantifier = prefix[qi];
    st.input = cur;
    if (st.quantifier == 'E') {
      st.oracle = oracleE(cur);
      st.gadget = eGadget.evalOn(WindowSet::fromValues(w, cur)).valueSet();
    } else {
      st.oracle = oracleA(cur, w.hi);
      // Gadget route: solve Yt = E(St) ∪ append36(Yt) with St the relative
      // complement within the admissible domain, then read Z off the
      // inclusion chain: Z = (S ∩ <1 W*>) \ Yt.
      WindowSet sWs = WindowSet::fromValues(w, cur);
      WindowSet stWs = winDiff(domainWs, sWs);
      System ysys;
      ysys.dom = Domain::Nat;
      ysys.declareVar("Yt");
      ConstPool pool(ysys);
      Expr stExpr = pool.intern("St", ConstVal::ofOracle("arith.Stilde", [vals = stWs.valueSet()](Int n) {
        return vals.count(n) > 0;
      }));
      ysys.constraints.push_back(Constraint::eq(
          mkVar("Yt"), mkUnion(buildEExpr(stExpr, pool), buildAppend36Expr(mkVar("Yt"), pool))));
      KleeneResult yres = kleeneSolve(ysys, w, FixMode::Least);
      DigitPattern p1w = DigitPattern::compile("1 W*");
      WindowSet onlyOne = winIntersect(sWs, p1w.enumerate(w));
      st.gadget = winDiff(onlyOne, yres.assignment.values.at("Yt")).valueSet();
    }
    st.stripped = oracleRemoveone(st.oracle);
    run.stages.push_back(st);
    if (qi > 0) {
      cur = stripGadget.evalOn(WindowSet::fromValues(w, run.stages.back().gadget)).valueSet();
      // keep the pipeline honest: the gadget route feeds the next stage
    } else {
      run.gadgetFinal = stripGadget.evalOn(WindowSet::fromValues(w, run.stages.back().gadget)).valueSet();
      run.oracleFinal = run.stages.back().stripped;
    }
  }
  return run;
}

/// Emit the composed system for a quantifier prefix: E stages are single
/// equations, A stages are the four-constraint subsystems with their derived
/// complement constants; a final strip produces the output variable.
struct ArithBuild {
  System system;
  std::string outputVar;
};

inline ArithBuild buildArithSystem(const ConstVal& R, const std::string& prefix, const Window& refWindow) {
  ArithRun run = runArithPipeline(R, prefix, refWindow);
  System s;
  s.dom = Domain::Nat;
  ConstPool pool(s);
  Expr input = pool.intern("R", R);
  std::size_t k = prefix.size();
  for (std::size_t qi = k; qi-- > 0;) {
    std::string tag = std::to_string(qi + 1);
    const ArithStageResult& st = run.stages[k - 1 - qi];
    if (prefix[qi] == 'E') {
      std::string v = "V" + tag;
      s.declareVar(v);
      s.constraints.push_back(Constraint::eq(mkVar(v), buildEExpr(input, pool)));
      input = buildRemoveoneExpr(mkVar(v), pool);
    } else {
      std::string y = "Y" + tag, yt = "Yt" + tag, z = "Z" + tag;
      s.declareVar(y);
      s.declareVar(yt);
      s.declareVar(z);
      std::set<Int> stilde;
      {
        DigitPattern domainPat = DigitPattern::compile("[36]* 1 W*");
        WindowSet dws = domainPat.enumerate(refWindow);
        stilde = winDiff(dws, WindowSet::fromValues(refWindow, st.input)).valueSet();
      }
      Expr stExpr = pool.oracle("St" + tag, "arith.s" + tag + ".Stilde",
                                [stilde](Int n) { return stilde.count(n) > 0; });
      s.constraints.push_back(
          Constraint::eq(mkVar(y), mkUnion(mkVar(z), buildAppend36Expr(mkVar(y), pool))));
      s.constraints.push_back(Constraint::eq(
          mkVar(yt), mkUnion(buildEExpr(stExpr, pool), buildAppend36Expr(mkVar(yt), pool))));
      s.constraints.push_back(Constraint::inc(mkVar(z), pool.pattern("p1Wp", "1 W+")));
      Constraint chain;
      chain.kind = Constraint::Kind::Inc;
      chain.chain = {mkVar(y), input, mkUnion(mkVar(y), mkVar(yt))};
      s.constraints.push_back(std::move(chain));
      input = buildRemoveoneExpr(mkVar(z), pool);
    }
  }
  std::string out = "OUT";
  s.declareVar(out);
  s.constraints.push_back(Constraint::eq(mkVar(out), input));
  return ArithBuild{std::move(s), out};
}

}  // namespace zeq
