#pragma once

#include <cctype>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "zeq/expr.hpp"

namespace zeq {

// Line-based system format:
//
//   domain nat|int
//   var X Y Z
//   const C = up "{0,1} ∪ pos(0,2;{0})"
//   const P = pattern "1 W*"
//   const R = oracle ha.R0
//   eq <expr> = <expr> [= <expr> ...]
//   sub <expr> <= <expr> [<= <expr> ...]
//
// with expressions union(a,b) inter(a,b) add(a,b) tsub(a,b) sub(a,b) neg(a)
// over declared variable and constant names. '#' starts a comment.

namespace dsl {

class ExprScanner {
 public:
  ExprScanner(const std::string& s, int line) : s_(s), line_(line) {}

  void ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eof() {
    ws();
    return i_ >= s_.size();
  }
  char peek() {
    ws();
    return i_ < s_.size() ? s_[i_] : '\0';
  }
  bool tryLit(char c) {
    ws();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  bool tryLit(const std::string& lit) {
    ws();
    if (s_.compare(i_, lit.size(), lit) == 0) {
      i_ += lit.size();
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!tryLit(c)) fail(std::string("expected '") + c + "'");
  }
  std::string ident() {
    ws();
    std::size_t start = i_;
    while (i_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' || s_[i_] == '.'))
      ++i_;
    if (i_ == start) fail("expected identifier");
    return s_.substr(start, i_ - start);
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("line " + std::to_string(line_) + ", column " + std::to_string(i_ + 1) + ": " + msg);
  }
  std::string quotedString() {
    ws();
    if (i_ >= s_.size() || s_[i_] != '"') fail("expected quoted string");
    ++i_;
    std::string body;
    while (i_ < s_.size() && s_[i_] != '"') body.push_back(s_[i_++]);
    if (i_ >= s_.size()) fail("unterminated string");
    ++i_;
    return body;
  }

 private:
  const std::string& s_;
  std::size_t i_ = 0;
  int line_;
};

inline Expr parseExpr(ExprScanner& sc, const System& sys) {
  std::string name = sc.ident();
  auto binary = [&](ExprOp op) {
    sc.expect('(');
    Expr a = parseExpr(sc, sys);
    sc.expect(',');
    Expr b = parseExpr(sc, sys);
    sc.expect(')');
    return mkBinary(op, a, b);
  };
  if (name == "union") return binary(ExprOp::Union);
  if (name == "inter") return binary(ExprOp::Intersect);
  if (name == "add") return binary(ExprOp::Add);
  if (name == "tsub") return binary(ExprOp::TruncSub);
  if (name == "sub") return binary(ExprOp::Sub);
  if (name == "neg") {
    sc.expect('(');
    Expr a = parseExpr(sc, sys);
    sc.expect(')');
    return mkNegate(a);
  }
  if (sys.hasVar(name)) return mkVar(name);
  if (const ConstVal* c = sys.findConst(name)) return mkConst(name, *c);
  sc.fail("unknown name '" + name + "'");
}

}  // namespace dsl

inline System parseSystem(const std::string& text) {
  System sys;
  bool domainSeen = false;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    dsl::ExprScanner sc(line, lineNo);
    if (sc.eof()) continue;
    std::string head = sc.ident();
    if (head == "domain") {
      std::string d = sc.ident();
      if (d == "nat")
        sys.dom = Domain::Nat;
      else if (d == "int")
        sys.dom = Domain::Int;
      else
        sc.fail("domain must be nat or int");
      domainSeen = true;
    } else if (head == "var") {
      while (!sc.eof()) sys.declareVar(sc.ident());
    } else if (head == "const") {
      if (!domainSeen) sc.fail("domain line must precede constants");
      std::string name = sc.ident();
      sc.expect('=');
      std::string kind = sc.ident();
      if (kind == "up") {
        sys.declareConst(name, ConstVal::ofUP(UPSet::parse(sc.quotedString(), sys.dom)));
      } else if (kind == "pattern") {
        sys.declareConst(name, ConstVal::ofPattern(DigitPattern::compile(sc.quotedString())));
      } else if (kind == "oracle") {
        sys.declareConst(name, ConstVal::ofOracle(sc.ident()));
      } else {
        sc.fail("constant kind must be up, pattern or oracle");
      }
    } else if (head == "eq" || head == "sub") {
      if (!domainSeen) sc.fail("domain line must precede constraints");
      Constraint c;
      c.kind = head == "eq" ? Constraint::Kind::Eq : Constraint::Kind::Inc;
      c.chain.push_back(dsl::parseExpr(sc, sys));
      const char* sep = head == "eq" ? "=" : "<=";
      while (sc.tryLit(std::string(sep))) c.chain.push_back(dsl::parseExpr(sc, sys));
      if (!sc.eof()) sc.fail("trailing input after constraint");
      if (c.chain.size() < 2) sc.fail("constraint needs at least two sides");
      sys.constraints.push_back(std::move(c));
    } else {
      sc.fail("unknown directive '" + head + "'");
    }
  }
  if (sys.constraints.empty()) throw ParseError("system has no constraints");
  sys.validate();
  return sys;
}

inline std::string printExpr(const Expr& e) {
  switch (e->op) {
    case ExprOp::Var: return e->var;
    case ExprOp::Const: return e->constName;
    case ExprOp::Union: return "union(" + printExpr(e->a) + "," + printExpr(e->b) + ")";
    case ExprOp::Intersect: return "inter(" + printExpr(e->a) + "," + printExpr(e->b) + ")";
    case ExprOp::Add: return "add(" + printExpr(e->a) + "," + printExpr(e->b) + ")";
    case ExprOp::Sub: return "sub(" + printExpr(e->a) + "," + printExpr(e->b) + ")";
    case ExprOp::TruncSub: return "tsub(" + printExpr(e->a) + "," + printExpr(e->b) + ")";
    case ExprOp::Negate: return "neg(" + printExpr(e->a) + ")";
  }
  throw Error("bad expr");
}

inline std::string printSystem(const System& s) {
  std::ostringstream os;
  os << "domain " << domainName(s.dom) << "\n";
  if (!s.vars.empty()) {
    os << "var";
    for (const auto& v : s.vars) os << " " << v;
    os << "\n";
  }
  for (const auto& [name, c] : s.consts) {
    os << "const " << name << " = ";
    switch (c.kind) {
      case ConstVal::Kind::UP: os << "up \"" << c.up.toText() << "\""; break;
      case ConstVal::Kind::Pattern: os << "pattern \"" << c.pattern.source() << "\""; break;
      case ConstVal::Kind::Oracle: os << "oracle " << c.oracle.name; break;
    }
    os << "\n";
  }
  for (const auto& c : s.constraints) {
    os << (c.kind == Constraint::Kind::Eq ? "eq " : "sub ");
    for (std::size_t i = 0; i < c.chain.size(); ++i) {
      if (i) os << (c.kind == Constraint::Kind::Eq ? " = " : " <= ");
      os << printExpr(c.chain[i]);
    }
    os << "\n";
  }
  return os.str();
}

inline Expr rebindConsts(const Expr& e, const System& s) {
  switch (e->op) {
    case ExprOp::Var: return e;
    case ExprOp::Const: {
      const ConstVal* c = s.findConst(e->constName);
      if (!c) return e;
      return mkConst(e->constName, *c);
    }
    case ExprOp::Negate: return mkNegate(rebindConsts(e->a, s));
    default: return mkBinary(e->op, rebindConsts(e->a, s), rebindConsts(e->b, s));
  }
}

/// Bind oracle constants to their membership functions by name.
using OracleTable = std::map<std::string, std::function<bool(Int)>>;

inline void resolveOracles(System& s, const OracleTable& table) {
  for (auto& [name, c] : s.consts) {
    if (c.kind != ConstVal::Kind::Oracle) continue;
    auto it = table.find(c.oracle.name);
    if (it != table.end()) c.oracle.fn = it->second;
  }
  // Expression nodes embed constant values: rebind them to the new table.
  for (auto& c : s.constraints)
    for (auto& e : c.chain) e = rebindConsts(e, s);
}

}  // namespace zeq
