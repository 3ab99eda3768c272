#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "zeq/eval.hpp"
#include "zeq/gadgets.hpp"

using namespace zeq;
using namespace zeqtest;

namespace {

Expr upc(const std::string& name, UPSet v) { return mkConst(name, ConstVal::ofUP(std::move(v))); }

}  // namespace

TEST_CASE("exact evaluation of simple expressions") {
  ExactAssignment a{{"X", UPSet::finite({5}, Domain::Nat)}};
  UPSet r = evaluateExact(mkAdd(mkVar("X"), upc("z", UPSet::finite({0}, Domain::Nat))), a, Domain::Nat);
  CHECK(r == UPSet::finite({5}, Domain::Nat));

  ExactAssignment b{{"X", UPSet::naturals()}};
  CHECK(evaluateExact(mkUnion(mkVar("X"), mkNegate(mkVar("X"))), b, Domain::Int) ==
        UPSet::allIntegers());
}

TEST_CASE("exact evaluation rejects non-periodic constants and nat negation") {
  Expr pat = mkConst("p", ConstVal::ofPattern(DigitPattern::compile("1 W*")));
  CHECK_THROWS_AS(evaluateExact(pat, {}, Domain::Nat), RegimeError);
  ExactAssignment a{{"X", UPSet::finite({1}, Domain::Nat)}};
  CHECK_THROWS_AS(evaluateExact(mkNegate(mkVar("X")), a, Domain::Nat), RegimeError);
  CHECK_THROWS_AS(evaluateExact(mkSub(mkVar("X"), mkVar("X")), a, Domain::Nat), RegimeError);
}

TEST_CASE("windowed horizons: constants, variables, boolean nodes") {
  Window w = Window::natDigits(4);
  WindowAssignment a;
  a.window = w;
  WindowSet xv = WindowSet::fromValues(w, {10, 20});
  xv.setHorizon(Iv{0, 100});
  a.values["X"] = xv;

  WindowSet c = evaluateWindowed(upc("c", UPSet::finite({1, 2}, Domain::Nat)), a);
  CHECK(c.horizon() == w.full());

  WindowSet u = evaluateWindowed(mkUnion(mkVar("X"), upc("c", UPSet::finite({1}, Domain::Nat))), a);
  CHECK(u.horizon() == Iv{0, 100});
  CHECK(u.valueSet() == std::set<Int>{1, 10, 20});
}

TEST_CASE("windowed addition on nat windows keeps the min horizon") {
  Window w = Window::natDigits(4);
  WindowAssignment a;
  a.window = w;
  WindowSet xv = WindowSet::fromValues(w, {3});
  xv.setHorizon(Iv{0, 500});
  a.values["X"] = xv;
  a.values["Y"] = WindowSet::fromValues(w, {4});

  WindowSet r = evaluateWindowed(mkAdd(mkVar("X"), mkVar("Y")), a);
  CHECK(r.valueSet() == std::set<Int>{7});
  CHECK(r.horizon() == Iv{0, 500});
  CHECK_FALSE(r.unsound());
}

TEST_CASE("truncated subtraction by a finite constant shifts the horizon") {
  Window w = Window::natDigits(4);
  WindowAssignment a;
  a.window = w;
  a.values["X"] = WindowSet::fromValues(w, {10, 11});
  WindowSet r = evaluateWindowed(mkTruncSub(mkVar("X"), upc("c", UPSet::finite({4, 7}, Domain::Nat))), a);
  CHECK(r.valueSet() == std::set<Int>{3, 4, 6, 7});
  CHECK(r.horizon() == Iv{0, w.hi - 7});
}

TEST_CASE("truncated subtraction by an unbounded digit constant shrinks one digit level") {
  Window w = Window::natDigits(6);
  WindowAssignment a;
  a.window = w;
  a.values["X"] = WindowSet::fromValues(w, {50});
  Expr tens = mkConst("p10s", ConstVal::ofPattern(DigitPattern::compile("1 0*")));
  WindowSet r = evaluateWindowed(mkTruncSub(mkVar("X"), tens), a);
  CHECK(r.horizon() == Iv{0, pow7(5) - 1});
}

TEST_CASE("truncated subtraction by a variable is horizon-unsound") {
  Window w = Window::natDigits(3);
  WindowAssignment a;
  a.window = w;
  a.values["X"] = WindowSet::fromValues(w, {10});
  a.values["Y"] = WindowSet::fromValues(w, {4});
  WindowSet r = evaluateWindowed(mkTruncSub(mkVar("X"), mkVar("Y")), a);
  CHECK(r.unsound());
  CHECK(r.horizon().empty());
  CHECK(r.get(6));  // the bits are still the window convolution
  WEvalOptions strict;
  strict.strict = true;
  CHECK_THROWS_AS(evaluateWindowed(mkTruncSub(mkVar("X"), mkVar("Y")), a, strict), RegimeError);
}

TEST_CASE("int-window addition needs a finite constant side") {
  Window w(-100, 100);
  WindowAssignment a;
  a.window = w;
  WindowSet xv = WindowSet::fromValues(w, {-5, 5});
  a.values["X"] = xv;
  WindowSet ok = evaluateWindowed(mkAdd(mkVar("X"), upc("c", UPSet::finite({2}, Domain::Int))), a);
  CHECK(ok.valueSet() == std::set<Int>{-3, 7});
  CHECK(ok.horizon() == Iv{-98, 100});
  CHECK_FALSE(ok.unsound());

  WindowSet bad = evaluateWindowed(mkAdd(mkVar("X"), mkVar("X")), a);
  CHECK(bad.unsound());

  WindowSet unbounded = evaluateWindowed(mkAdd(mkVar("X"), upc("n", UPSet::naturals())), a);
  CHECK(unbounded.unsound());
}

TEST_CASE("variable-free all-periodic subtrees are folded exactly") {
  Window w(-100, 100);
  WindowAssignment a;
  a.window = w;
  Expr e = mkAdd(upc("a", UPSet::finite({60}, Domain::Int)), upc("b", UPSet::finite({-30}, Domain::Int)));
  WindowSet r = evaluateWindowed(e, a);
  CHECK(r.valueSet() == std::set<Int>{30});
  CHECK(r.horizon() == w.full());
}

TEST_CASE("the leading-digit-removal expression on worked inputs") {
  GadgetExpr rm = buildRemoveone();
  Window w = Window::natDigits(6);
  WindowSet out = rm.evalOn(WindowSet::fromValues(w, {12}));
  CHECK(out.valueSet() == std::set<Int>{5});
  CHECK(out.horizon() == Iv{0, pow7(5) - 1});
  CHECK(rm.evalOn(WindowSet::fromValues(w, {7})).count() == 0);
  CHECK(rm.evalOn(WindowSet::fromValues(w, {1})).valueSet() == std::set<Int>{0});
}

TEST_CASE("the existential-quantifier expression on worked inputs") {
  GadgetExpr eg = buildE();
  Window w = Window::natDigits(6);
  CHECK(eg.evalOn(WindowSet::fromValues(w, {159})).valueSet() == std::set<Int>{12});
  CHECK(eg.evalOn(WindowSet::fromValues(w, {12})).valueSet() == std::set<Int>{12});
  CHECK(eg.evalOn(WindowSet::fromValues(w, {306, 159})).valueSet() == std::set<Int>{12});
}
