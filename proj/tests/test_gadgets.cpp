#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "zeq/gadgets.hpp"

using namespace zeq;
using namespace zeqtest;

namespace {

std::set<Int> randomSubset(Rng& rng, const std::set<Int>& pool, double keep) {
  std::set<Int> out;
  for (Int v : pool)
    if (std::uniform_real_distribution<>(0, 1)(rng) < keep) out.insert(v);
  return out;
}

std::set<Int> inHorizon(const WindowSet& ws) {
  std::set<Int> out;
  ws.forEach([&](Int n) {
    if (ws.horizon().contains(n)) out.insert(n);
  });
  return out;
}

std::set<Int> clipTo(const std::set<Int>& s, const Iv& iv) {
  std::set<Int> out;
  for (Int v : s)
    if (iv.contains(v)) out.insert(v);
  return out;
}

}  // namespace

TEST_CASE("removeone matches its oracle on random admissible inputs") {
  GadgetExpr g = buildRemoveone();
  Window w = Window::natDigits(6);
  std::set<Int> domainVals = g.admissibleDomain.enumerate(w).valueSet();
  Rng rng(14001);
  for (int i = 0; i < 40; ++i) {
    std::set<Int> in = randomSubset(rng, domainVals, 0.02);
    WindowSet out = g.evalOn(WindowSet::fromValues(w, in));
    CHECK(out.horizon() == Iv{0, pow7(5) - 1});
    CHECK(inHorizon(out) == clipTo(oracleRemoveone(in), out.horizon()));
  }
}

TEST_CASE("removeone sends the digit-10 block to the empty set") {
  GadgetExpr g = buildRemoveone();
  Window w = Window::natDigits(6);
  DigitPattern deadzone = DigitPattern::compile("1 0 W*");
  std::set<Int> pool = deadzone.enumerate(w).valueSet();
  Rng rng(14002);
  for (int i = 0; i < 20; ++i) {
    std::set<Int> in = randomSubset(rng, pool, 0.05);
    CHECK(g.evalOn(WindowSet::fromValues(w, in)).count() == 0);
  }
}

TEST_CASE("the existential gadget matches its oracle and uses subtraction") {
  GadgetExpr g = buildE();
  CHECK(exprContainsOp(g.expr, ExprOp::TruncSub));
  Window w = Window::natDigits(6);
  std::set<Int> domainVals = g.admissibleDomain.enumerate(w).valueSet();
  Rng rng(14003);
  for (int i = 0; i < 40; ++i) {
    std::set<Int> in = randomSubset(rng, domainVals, 0.02);
    WindowSet out = g.evalOn(WindowSet::fromValues(w, in));
    CHECK(inHorizon(out) == clipTo(oracleE(in), out.horizon()));
  }
}

TEST_CASE("appendthreesix: least and greatest coincide and equal the oracle") {
  Rng rng(14004);
  Window w = Window::natDigits(4);
  DigitPattern p1w = DigitPattern::compile("1 W*");
  std::set<Int> seedPool = p1w.enumerate(Window::natDigits(2)).valueSet();
  for (int i = 0; i < 8; ++i) {
    std::set<Int> seed = randomSubset(rng, seedPool, 0.3);
    System s = buildAppend36System(ConstVal::ofUP(UPSet::finite(seed, Domain::Nat)));
    auto least = kleeneSolve(s, w, FixMode::Least);
    auto greatest = kleeneSolve(s, w, FixMode::Greatest);
    CHECK(least.assignment.values.at("Y").sameBits(greatest.assignment.values.at("Y")));
    CHECK(least.assignment.values.at("Y").valueSet() == oracleAppend(seed, w.hi));
  }
}

TEST_CASE("appendthreesix worked example with a pattern seed") {
  System s = buildAppend36System(ConstVal::ofPattern(DigitPattern::compile("1 3")));
  Window w = Window::natDigits(3);
  auto least = kleeneSolve(s, w, FixMode::Least);
  CHECK(least.assignment.values.at("Y").valueSet() == std::set<Int>{10, 157, 304});
}

TEST_CASE("universal-quantifier system: worked instances") {
  Window w = Window::natDigits(6);
  auto checkInstance = [&](const ConstVal& S, const ConstVal& St, const std::set<Int>& expectZ) {
    System sys = buildASystem(S, St);
    REQUIRE(sys.constraints.size() == 4);
    std::set<Int> sVals = S.enumerate(w).valueSet();
    std::set<Int> stVals = St.enumerate(w).valueSet();
    ASolution sol = oracleASolution(sVals, stVals, w.hi);
    CHECK(sol.Z == expectZ);
    WindowAssignment a;
    a.window = w;
    a.values["Y"] = WindowSet::fromValues(w, sol.Y);
    a.values["Yt"] = WindowSet::fromValues(w, sol.Yt);
    a.values["Z"] = WindowSet::fromValues(w, sol.Z);
    SolveReport rep = checkSolution(sys, a);
    CHECK(rep.status == Status::Satisfied);
    return std::make_pair(sys, a);
  };
  // every <x15> present: A holds at <15> = 12
  checkInstance(ConstVal::ofPattern(DigitPattern::compile("[36]* 1 5")),
                ConstVal::ofUP(UPSet().restrictToNat()), {12});
  // punctured at x = "6": nothing survives
  checkInstance(ConstVal::ofPattern(DigitPattern::compile("3* 1 5")),
                ConstVal::ofPattern(DigitPattern::compile("[36]* 6 [36]* 1 5")), {});
  // empty S
  checkInstance(ConstVal::ofUP(UPSet().restrictToNat()),
                ConstVal::ofPattern(DigitPattern::compile("[36]* 1 W*")), {});
}

TEST_CASE("universal-quantifier system rejects single-element perturbations of Z") {
  Window w = Window::natDigits(5);
  ConstVal S = ConstVal::ofPattern(DigitPattern::compile("[36]* 1 5"));
  ConstVal St = ConstVal::ofUP(UPSet().restrictToNat());
  System sys = buildASystem(S, St);
  std::set<Int> sVals = S.enumerate(w).valueSet();
  ASolution sol = oracleASolution(sVals, {}, w.hi);
  WindowAssignment base;
  base.window = w;
  base.values["Y"] = WindowSet::fromValues(w, sol.Y);
  base.values["Yt"] = WindowSet::fromValues(w, sol.Yt);
  base.values["Z"] = WindowSet::fromValues(w, sol.Z);
  REQUIRE(checkSolution(sys, base).status == Status::Satisfied);
  // find the constraint-5 horizon so perturbations stay inside certified range
  for (Int flip : {Int(12), Int(5), Int(19), Int(89)}) {
    WindowAssignment bad = base;
    bad.values["Z"].set(flip, !bad.values["Z"].get(flip));
    CHECK(checkSolution(sys, bad).status == Status::Violated);
  }
}

TEST_CASE("precondition violations of the universal system are detected on the window") {
  // S and St intersect: the lemma's hypothesis fails and the oracle-derived
  // assignment need not satisfy the system; the checker reports honestly.
  Window w = Window::natDigits(4);
  ConstVal S = ConstVal::ofPattern(DigitPattern::compile("[36]* 1 5"));
  ConstVal St = S;
  std::set<Int> sVals = S.enumerate(w).valueSet();
  WindowSet both = winIntersect(WindowSet::fromValues(w, sVals), WindowSet::fromValues(w, sVals));
  CHECK(both.count() > 0);  // the instance is indeed overlapping
}

TEST_CASE("quantifier pipeline: single stages") {
  Window w = Window::natDigits(6);
  {
    auto run = runArithPipeline(ConstVal::ofPattern(DigitPattern::compile("[36]* 1 5")), "E", w);
    CHECK(run.stages[0].gadget == std::set<Int>{12});
    CHECK(run.stages[0].oracle == std::set<Int>{12});
    CHECK(run.gadgetFinal == std::set<Int>{5});
    CHECK(run.oracleFinal == std::set<Int>{5});
  }
  {
    auto run = runArithPipeline(ConstVal::ofPattern(DigitPattern::compile("3* 1 5")), "A", w);
    CHECK(run.stages[0].gadget.empty());
    CHECK(run.stages[0].oracle.empty());
    CHECK(run.gadgetFinal.empty());
  }
  {
    auto run = runArithPipeline(ConstVal::ofPattern(DigitPattern::compile("[36]* 1 5")), "A", w);
    CHECK(run.stages[0].gadget == std::set<Int>{12});
    CHECK(run.gadgetFinal == std::set<Int>{5});
  }
}

TEST_CASE("quantifier pipeline: two alternations") {
  Window w = Window::natDigits(7);
  auto run = runArithPipeline(ConstVal::ofPattern(DigitPattern::compile("[36]* 1 [36]* 1 5")), "EA", w);
  REQUIRE(run.stages.size() == 2);
  CHECK(run.stages[0].quantifier == 'A');
  CHECK(run.stages[1].quantifier == 'E');
  CHECK(run.gadgetFinal == std::set<Int>{5});
  CHECK(run.oracleFinal == std::set<Int>{5});
}

TEST_CASE("pipeline prefix validation") {
  ConstVal r = ConstVal::ofUP(UPSet().restrictToNat());
  Window w = Window::natDigits(3);
  CHECK_THROWS_AS(runArithPipeline(r, "", w), Error);
  CHECK_THROWS_AS(runArithPipeline(r, "EE", w), Error);
  CHECK_THROWS_AS(runArithPipeline(r, "X", w), Error);
}

TEST_CASE("emitted pipeline systems parse and carry the stage structure") {
  Window w = Window::natDigits(6);
  ArithBuild b = buildArithSystem(ConstVal::ofPattern(DigitPattern::compile("[36]* 1 5")), "E", w);
  CHECK(b.outputVar == "OUT");
  CHECK(b.system.hasVar("V1"));
  ArithBuild ba = buildArithSystem(ConstVal::ofPattern(DigitPattern::compile("[36]* 1 [36]* 1 5")),
                                   "EA", Window::natDigits(7));
  CHECK(ba.system.hasVar("Z2"));
  CHECK(ba.system.hasVar("V1"));
}

TEST_CASE("the digit-10 removal gadget matches its oracle") {
  GadgetExpr g = buildRemoveTen();
  Window w = Window::natDigits(6);
  std::set<Int> pool = g.admissibleDomain.enumerate(w).valueSet();
  Rng rng(14005);
  for (int i = 0; i < 25; ++i) {
    std::set<Int> in = randomSubset(rng, pool, 0.05);
    WindowSet out = g.evalOn(WindowSet::fromValues(w, in));
    CHECK(inHorizon(out) == clipTo(oracleRemoveTen(in), out.horizon()));
  }
  CHECK(g.evalOn(WindowSet::fromValues(w, {7})).valueSet() == std::set<Int>{0});
}
