#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "zeq/upset.hpp"

using namespace zeq;
using namespace zeqtest;

TEST_CASE("canonical forms of the basic sets") {
  CHECK(UPSet().toText() == "{}");
  CHECK(UPSet::naturals(Domain::Nat).toText() == "pos(0,1;{0})");
  CHECK(UPSet::negNaturals().toText() == "neg(0,1;{0})");
  CHECK(UPSet::allIntegers().toText() == "pos(0,1;{0}) ∪ neg(0,1;{0})");

  // The empty set has empty residue sets, period 1, thresholds 0.
  UPSet e;
  CHECK(e.posTail().p == 1);
  CHECK(e.posTail().d == 0);
  CHECK(e.negTail().p == 1);
  CHECK(e.negTail().d == 0);
}

TEST_CASE("exceptions live only where the tails do not explain membership") {
  // evens from 0 on, plus 3: the tail keeps threshold 0, the stray odd
  // element stays an exception
  UPSet s = UPSet::fromFn([](Int n) { return (n >= 0 && n % 2 == 0) || n == 3; }, Domain::Nat, 2, 5, 1, 1);
  CHECK(s.toText() == "{3} ∪ pos(0,2;{0})");
  s.validate();
}

TEST_CASE("minimal period is found by divisor scan") {
  // period-6 raw residues {0,2,4} fold to period 2
  UPSet s = UPSet::fromRaw({}, Tail{0, 6, {0, 2, 4}}, Tail{}, Domain::Nat);
  CHECK(s.posTail().p == 2);
  CHECK(s.toText() == "pos(0,2;{0})");
}

TEST_CASE("binary operation examples") {
  UPSet evens = UPSet::parse("pos(0,2;{0})", Domain::Nat);
  CHECK(upAdd(evens, UPSet::finite({0, 1}, Domain::Nat)) == UPSet::naturals(Domain::Nat));
  CHECK(upAdd(UPSet::naturals(), UPSet::negNaturals()) == UPSet::allIntegers());
  CHECK(upTruncSub(UPSet::finite({5}, Domain::Nat), UPSet::finite({2, 7}, Domain::Nat)) ==
        UPSet::finite({3}, Domain::Nat));
}

TEST_CASE("negation examples") {
  CHECK(upNegate(UPSet::naturals()) == UPSet::negNaturals());
  // {16n+13 : n >= 0} negated
  UPSet s = UPSet::fromFn([](Int n) { return n >= 13 && (n - 13) % 16 == 0; }, Domain::Int, 16, 30, 1, 1);
  UPSet n = upNegate(s);
  for (Int k = 0; k < 8; ++k) {
    CHECK(n.contains(-16 * k - 13));
    CHECK_FALSE(n.contains(16 * k + 13));
  }
  CHECK_THROWS_AS(upNegate(UPSet::naturals(Domain::Nat)), RegimeError);
}

TEST_CASE("negation is an involution") {
  Rng rng(7001);
  for (int i = 0; i < 100; ++i) {
    UPSet s = randomUPSet(rng, Domain::Int);
    CHECK(upNegate(upNegate(s)) == s);
  }
}

TEST_CASE("complement examples") {
  CHECK(upComplement(UPSet().restrictToNat()) == UPSet::naturals(Domain::Nat));
  Rng rng(7002);
  for (int i = 0; i < 50; ++i) {
    UPSet s = randomUPSet(rng, Domain::Int);
    CHECK(upComplement(upComplement(s)) == s);
  }
  // N minus {2}, the leaf-set shape
  UPSet b = upComplement(UPSet::finite({2}, Domain::Nat));
  CHECK(b.domain() == Domain::Nat);
  CHECK_FALSE(b.contains(2));
  CHECK(b.contains(0));
  CHECK(b.contains(3));
  CHECK_FALSE(b.contains(-1));
}

TEST_CASE("membership and enumeration") {
  CHECK_FALSE(UPSet::naturals(Domain::Nat).contains(-1));
  // 16Z + 6 contains -10
  UPSet t = UPSet::fromFn([](Int n) { return posMod(n, 16) == 6; }, Domain::Int, 16, 17, 16, 17);
  CHECK(t.contains(-10));
  WindowSet ws = UPSet::finite({0, 4, 11}, Domain::Nat).enumerate(Window::nat(15));
  CHECK(ws.valueSet() == std::set<Int>{0, 4, 11});
  CHECK(ws.horizon() == Iv{0, 15});
}

TEST_CASE("canonicalization preserves membership of raw representations") {
  Rng rng(7003);
  for (int i = 0; i < 150; ++i) {
    Domain dom = i % 2 ? Domain::Int : Domain::Nat;
    std::vector<Int> exc;
    for (Int k = pick(rng, 0, 4); k > 0; --k)
      exc.push_back(dom == Domain::Nat ? pick(rng, 0, 30) : pick(rng, -30, 30));
    std::sort(exc.begin(), exc.end());
    exc.erase(std::unique(exc.begin(), exc.end()), exc.end());
    Tail pos = randomTail(rng, 8);
    Tail neg = dom == Domain::Nat ? Tail{} : randomTail(rng, 8);
    UPSet s = UPSet::fromRaw(exc, pos, neg, dom);
    std::set<Int> excSet(exc.begin(), exc.end());
    for (Int n = -500; n <= 500; ++n) {
      bool raw = excSet.count(n) || (n >= 0 && pos.claims(n)) || (n <= 0 && neg.claims(-n));
      if (dom == Domain::Nat && n < 0) raw = false;
      REQUIRE(s.contains(n) == raw);
    }
  }
}

TEST_CASE("all five operations pass the invariant checker and the elementwise oracle") {
  Rng rng(7004);
  for (int i = 0; i < 60; ++i) {
    Domain dom = i % 3 == 0 ? Domain::Nat : Domain::Int;
    UPSet a = randomUPSet(rng, dom);
    UPSet b = randomUPSet(rng, dom);
    for (UpOp op : {UpOp::Union, UpOp::Intersect, UpOp::Add, UpOp::Subtract, UpOp::TruncSub}) {
      if (dom == Domain::Nat && op == UpOp::Subtract) continue;
      UPSet r = upBinary(op, a, b);
      r.validate();
      std::set<Int> expected = elementwiseBinary(op, a, b, -200, 200, 400);
      std::set<Int> got = enumerateSet(r, -200, 200);
      REQUIRE(got == expected);
    }
  }
}

TEST_CASE("addition is associative and commutative on canonical forms") {
  Rng rng(7005);
  for (int i = 0; i < 25; ++i) {
    UPSet a = randomUPSet(rng, Domain::Int, 6, 12);
    UPSet b = randomUPSet(rng, Domain::Int, 6, 12);
    UPSet c = randomUPSet(rng, Domain::Int, 6, 12);
    CHECK(upAdd(a, b) == upAdd(b, a));
    CHECK(upAdd(upAdd(a, b), c) == upAdd(a, upAdd(b, c)));
  }
}

TEST_CASE("textual form round-trips bit-exactly") {
  Rng rng(7006);
  for (int i = 0; i < 100; ++i) {
    Domain dom = i % 2 ? Domain::Int : Domain::Nat;
    UPSet s = randomUPSet(rng, dom);
    UPSet back = UPSet::parse(s.toText(), dom);
    REQUIRE(back == s);
    REQUIRE(back.toText() == s.toText());
  }
  CHECK(UPSet::parse("{}", Domain::Int) == UPSet());
  CHECK(UPSet::parse("{1 , 2}  u  pos(3,2;{1})", Domain::Nat).contains(5));
}

TEST_CASE("parse errors carry positions and reject bad pieces") {
  CHECK_THROWS_AS(UPSet::parse("pos(1,0;{0})", Domain::Int), ParseError);
  CHECK_THROWS_AS(UPSet::parse("{1,2} junk", Domain::Int), ParseError);
  CHECK_THROWS_AS(UPSet::parse("pos(1,2;{5})", Domain::Int), ParseError);
  CHECK_THROWS_AS(UPSet::parse("{-3}", Domain::Nat), ParseError);
  CHECK_THROWS_AS(UPSet::parse("neg(0,1;{0})", Domain::Nat), ParseError);
  CHECK_THROWS_AS(UPSet::parse("{1} u {2}", Domain::Int), ParseError);
}

TEST_CASE("support bounds") {
  CHECK(UPSet::finite({-3, 7}, Domain::Int).minElement() == -3);
  CHECK(UPSet::finite({-3, 7}, Domain::Int).maxElement() == 7);
  CHECK_FALSE(UPSet::naturals().maxElement().has_value());
  CHECK(UPSet::naturals().minElement() == 0);
  CHECK_FALSE(UPSet().minElement().has_value());
}

TEST_CASE("first difference witnesses") {
  UPSet a = UPSet::finite({1, 5}, Domain::Int);
  UPSet b = UPSet::finite({1, 6}, Domain::Int);
  CHECK(upFirstDifference(a, b) == 5);
  CHECK_FALSE(upFirstDifference(a, a).has_value());
  CHECK(upFirstDifference(UPSet::naturals(), UPSet::allIntegers()).has_value());
}

TEST_CASE("overflow is reported, never wrapped") {
  UPSet big = UPSet::finite({std::numeric_limits<Int>::max() - 1}, Domain::Int);
  CHECK_THROWS_AS(upAdd(big, big), OverflowError);
}
