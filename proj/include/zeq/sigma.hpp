#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "zeq/eval.hpp"
#include "zeq/expr.hpp"
#include "zeq/solve.hpp"

namespace zeq {

// --- tracks -----------------------------------------------------------------
//
// The i-th track of S is S ∩ {16n+i : n ∈ Z}. The sigma encodings place a
// payload on track 13 and fill tracks 6, 8, 9, 12 completely.

inline UPSet fullTrack(Int i) {
  return UPSet::fromFn([i](Int n) { return posMod(n, 16) == i; }, Domain::Int, 16, 17, 16, 17);
}

inline UPSet natTrack(Int i) {
  return UPSet::fromFn([i](Int n) { return n >= 0 && posMod(n, 16) == i; }, Domain::Nat, 16, 17, 1, 1);
}

/// {16n+i : n ∈ S} as a subset of Z.
inline UPSet embedTrack(Int i, const UPSet& s) { return UPSet::affine(s.widenToInt(), 16, i); }

/// S ∩ (16Z + i).
inline UPSet trackOf(const UPSet& s, Int i) { return upIntersect(s.widenToInt(), fullTrack(i)); }

/// {n : 16n+i ∈ S}.
inline UPSet unembedTrack(const UPSet& s, Int i) {
  Int p = s.posTail().empty() ? 1 : s.posTail().p;
  Int q = s.negTail().empty() ? 1 : s.negTail().p;
  Int bound = std::max(s.posExactBound(), s.negExactBound()) / 16 + 2;
  return UPSet::fromFn([&s, i](Int n) { return s.contains(checkedAdd(checkedMul(16, n), i)); },
                       Domain::Int, p, bound, q, bound);
}

/// A set refined with its sixteen tracks.
struct TrackSet {
  UPSet whole;
  std::array<UPSet, 16> track;

  static TrackSet of(const UPSet& s) {
    TrackSet t;
    t.whole = s.widenToInt();
    for (Int i = 0; i < 16; ++i) t.track[static_cast<std::size_t>(i)] = trackOf(s, i);
    return t;
  }
};

// --- the sigma encodings --------------------------------------------------------

enum class SigmaVariant { SigmaZ, Sigma0Nat };

/// σ(S) = {0} ∪ tracks 6,8,9,12 ∪ embed13(S) over Z; σ0 is the N variant
/// with N-restricted full tracks.
inline TrackSet sigmaEncode(const UPSet& shat, SigmaVariant v = SigmaVariant::SigmaZ) {
  if (v == SigmaVariant::Sigma0Nat && shat.domain() != Domain::Nat)
    throw RegimeError("sigma0 encodes subsets of N");
  UPSet acc = UPSet::finite({0}, v == SigmaVariant::SigmaZ ? Domain::Int : Domain::Nat);
  for (Int i : {Int(6), Int(8), Int(9), Int(12)})
    acc = upUnion(acc, v == SigmaVariant::SigmaZ ? fullTrack(i) : natTrack(i));
  acc = upUnion(acc, v == SigmaVariant::SigmaZ ? embedTrack(13, shat)
                                               : UPSet::affine(shat, 16, 13).restrictToNat());
  return TrackSet::of(acc);
}

/// Inverse of sigmaEncode; throws on a malformed encoding.
inline UPSet sigmaDecode(const TrackSet& s, SigmaVariant v = SigmaVariant::SigmaZ) {
  auto expectTrack = [&](Int i, const UPSet& want) {
    if (!(s.track[static_cast<std::size_t>(i)] == want))
      throw Error("malformed encoding: track " + std::to_string(i));
  };
  expectTrack(0, UPSet::finite({0}, Domain::Int));
  for (Int i : {Int(6), Int(8), Int(9), Int(12)})
    expectTrack(i, v == SigmaVariant::SigmaZ ? fullTrack(i) : natTrack(i).widenToInt());
  for (Int i : {Int(1), Int(2), Int(3), Int(4), Int(5), Int(7), Int(10), Int(11), Int(14), Int(15)})
    expectTrack(i, UPSet());
  UPSet shat = unembedTrack(s.track[13], 13);
  if (v == SigmaVariant::Sigma0Nat) {
    if (auto mn = shat.minElement(); !shat.empty() && (!mn || *mn < 0))
      throw Error("malformed encoding: negative payload under sigma0");
    return shat.restrictToNat();
  }
  return shat;
}

/// Right-hand side of the good-encoding equation:
/// tracks {0,1,3,4,6,7,8,9,10,12,13} of Z, plus {11}.
inline UPSet goodEncodingRhs() {
  UPSet acc = UPSet::finite({11}, Domain::Int);
  for (Int i : {Int(0), Int(1), Int(3), Int(4), Int(6), Int(7), Int(8), Int(9), Int(10), Int(12), Int(13)})
    acc = upUnion(acc, fullTrack(i));
  return acc;
}

/// Way 1: X + {0,4,11} equals the displayed right-hand side, by exact UP
/// arithmetic.
inline bool goodEncodingEquation(const UPSet& x) {
  UPSet lhs = upAdd(x.widenToInt(), UPSet::finite({0, 4, 11}, Domain::Int));
  return lhs == goodEncodingRhs();
}

/// Way 2: X = σ(X̂) for some X̂, structurally.
inline bool goodEncodingStructural(const UPSet& x) {
  TrackSet t = TrackSet::of(x);
  try {
    sigmaDecode(t, SigmaVariant::SigmaZ);
    return true;
  } catch (const Error&) {
    return false;
  }
}

// --- decomposition to normal form ---------------------------------------------------
//
// Fresh auxiliary variables per internal node turn a {∪,+} system into
// equations of the form X=Y+Z, X=Y∪Z or X=const. Auxiliary names are
// deterministic (traversal order), so compiled output is stable.

inline System decomposeSystem(const System& s) {
  for (const auto& c : s.constraints) {
    if (c.kind != Constraint::Kind::Eq)
      throw RegimeError("decomposition expects equations only (run inclusionToEquation first)");
    for (const auto& e : c.chain)
      forEachNode(e, [](const ExprNode& n) {
        if (n.op != ExprOp::Var && n.op != ExprOp::Const && n.op != ExprOp::Union &&
            n.op != ExprOp::Add)
          throw RegimeError("decomposition handles union/addition systems");
      });
  }
  System out;
  out.dom = s.dom;
  out.vars = s.vars;
  out.consts = s.consts;
  int counter = 0;
  auto fresh = [&]() { return "_a" + std::to_string(++counter); };

  // Returns an atom (Var) denoting the expression, emitting definitions.
  std::function<std::string(const Expr&)> flatten = [&](const Expr& e) -> std::string {
    switch (e->op) {
      case ExprOp::Var: return e->var;
      case ExprOp::Const: {
        std::string v = fresh();
        out.declareVar(v);
        out.constraints.push_back(Constraint::eq(mkVar(v), mkConst(e->constName, *e->cval)));
        return v;
      }
      default: {
        std::string a = flatten(e->a);
        std::string b = flatten(e->b);
        std::string v = fresh();
        out.declareVar(v);
        out.constraints.push_back(Constraint::eq(mkVar(v), mkBinary(e->op, mkVar(a), mkVar(b))));
        return v;
      }
    }
  };

  for (const auto& c : s.constraints) {
    for (std::size_t k = 0; k + 1 < c.chain.size(); ++k) {
      const Expr& lhs = c.chain[k];
      const Expr& rhs = c.chain[k + 1];
      // Prefer the direct form Var = op(atom, atom) / Var = const.
      if (lhs->op == ExprOp::Var) {
        if (rhs->op == ExprOp::Const) {
          out.constraints.push_back(Constraint::eq(lhs, rhs));
          continue;
        }
        if (rhs->op == ExprOp::Var) {
          out.constraints.push_back(Constraint::eq(lhs, mkUnion(rhs, rhs)));
          continue;
        }
        std::string a = flatten(rhs->a);
        std::string b = flatten(rhs->b);
        out.constraints.push_back(Constraint::eq(lhs, mkBinary(rhs->op, mkVar(a), mkVar(b))));
        continue;
      }
      std::string a = flatten(lhs);
      std::string b = flatten(rhs);
      out.constraints.push_back(Constraint::eq(mkVar(a), mkUnion(mkVar(b), mkVar(b))));
    }
  }
  return out;
}

inline bool isNormalForm(const System& s) {
  for (const auto& c : s.constraints) {
    if (c.kind != Constraint::Kind::Eq || c.chain.size() != 2) return false;
    if (c.chain[0]->op != ExprOp::Var) return false;
    const Expr& rhs = c.chain[1];
    if (rhs->op == ExprOp::Const) continue;
    if ((rhs->op == ExprOp::Union || rhs->op == ExprOp::Add) && rhs->a->op == ExprOp::Var &&
        rhs->b->op == ExprOp::Var)
      continue;
    return false;
  }
  return true;
}

// --- compilation to addition-only systems ---------------------------------------------
//
// Per equation of the normal form, one addition-only constraint over encoded
// variables; per variable, one good-encoding constraint:
//   X = Y+Z    ~>  σY + σZ + {0,1} = σX + σ{0} + {0,1}
//   X = Y∪Z    ~>  σY + σZ + {0,2} = σX + σX + {0,2}
//   X = C      ~>  σX = σ(C)
//   every X    ~>  σX + {0,4,11} = RHS

struct EncodedSystem {
  System system;
  std::map<std::string, std::pair<std::string, Int>> correspondence;  // orig -> (encoded var, track)
};

inline EncodedSystem compileAdditionOnly(const System& normal) {
  if (!isNormalForm(normal)) throw RegimeError("compilation expects a normal-form system");
  EncodedSystem out;
  out.system.dom = Domain::Int;
  ConstPool pool(out.system);
  auto enc = [&](const std::string& v) { return "s_" + v; };
  for (const auto& v : normal.vars) {
    out.system.declareVar(enc(v));
    out.correspondence[v] = {enc(v), 13};
  }
  Expr c01 = pool.up("C01", UPSet::finite({0, 1}, Domain::Int));
  Expr c02 = pool.up("C02", UPSet::finite({0, 2}, Domain::Int));
  Expr s0 = pool.up("S0", sigmaEncode(UPSet::finite({0}, Domain::Int)).whole);
  for (const auto& c : normal.constraints) {
    const std::string x = enc(c.chain[0]->var);
    const Expr& rhs = c.chain[1];
    if (rhs->op == ExprOp::Const) {
      if (rhs->cval->kind != ConstVal::Kind::UP)
        throw RegimeError("compilation requires ultimately periodic constants");
      Expr sc = pool.up("SIG_" + rhs->constName,
                        sigmaEncode(rhs->cval->up.widenToInt()).whole);
      out.system.constraints.push_back(Constraint::eq(mkVar(x), sc));
    } else if (rhs->op == ExprOp::Add) {
      Expr lhsE = mkAdd(mkAdd(mkVar(enc(rhs->a->var)), mkVar(enc(rhs->b->var))), c01);
      Expr rhsE = mkAdd(mkAdd(mkVar(x), s0), c01);
      out.system.constraints.push_back(Constraint::eq(lhsE, rhsE));
    } else {
      Expr lhsE = mkAdd(mkAdd(mkVar(enc(rhs->a->var)), mkVar(enc(rhs->b->var))), c02);
      Expr rhsE = mkAdd(mkAdd(mkVar(x), mkVar(x)), c02);
      out.system.constraints.push_back(Constraint::eq(lhsE, rhsE));
    }
  }
  Expr c0411 = pool.up("C0411", UPSet::finite({0, 4, 11}, Domain::Int));
  Expr good = pool.up("GOOD", goodEncodingRhs());
  for (const auto& v : normal.vars)
    out.system.constraints.push_back(Constraint::eq(mkAdd(mkVar(enc(v)), c0411), good));
  return out;
}

/// The sidecar table mapping original variables to encoded variables and the
/// track the original value is read back from.
inline std::string correspondenceText(const EncodedSystem& es) {
  std::string out;
  for (const auto& [orig, enc] : es.correspondence)
    out += orig + " -> " + enc.first + ", track " + std::to_string(enc.second) + "\n";
  return out;
}

struct CorrespondenceReport {
  bool ok = true;
  std::vector<std::string> failures;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      failures.push_back(what);
    }
  }
};

/// For sample exact solutions of the original system: the encoded assignment
/// solves the compiled system, and track-13 readback recovers the originals.
inline CorrespondenceReport verifyCorrespondence(const System& orig, const System& normal,
                                                 const EncodedSystem& es,
                                                 const std::vector<ExactAssignment>& samples) {
  CorrespondenceReport rep;
  for (std::size_t si = 0; si < samples.size(); ++si) {
    const ExactAssignment& sample = samples[si];
    std::string tag = "sample " + std::to_string(si);
    rep.expect(checkSolutionExact(orig, sample).status == Status::Satisfied,
               tag + ": not a solution of the original system");
    // Auxiliary variables are defined by their equations in creation order.
    ExactAssignment full = sample;
    for (const auto& c : normal.constraints) {
      const std::string& v = c.chain[0]->var;
      if (full.count(v)) continue;
      full[v] = evaluateExact(c.chain[1], full, normal.dom);
    }
    rep.expect(checkSolutionExact(normal, full).status == Status::Satisfied,
               tag + ": decomposition does not preserve the solution");
    ExactAssignment encoded;
    for (const auto& [v, val] : full)
      encoded[es.correspondence.at(v).first] = sigmaEncode(val.widenToInt()).whole;
    rep.expect(checkSolutionExact(es.system, encoded).status == Status::Satisfied,
               tag + ": encoded assignment violates the compiled system");
    for (const auto& [v, val] : full) {
      const auto& [ev, track] = es.correspondence.at(v);
      UPSet back = unembedTrack(trackOf(encoded.at(ev), track), track);
      rep.expect(back == val.widenToInt(), tag + ": readback of " + v + " differs");
    }
  }
  return rep;
}

}  // namespace zeq
