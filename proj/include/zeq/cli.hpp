#pragma once

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "zeq/dsl.hpp"
#include "zeq/gadgets.hpp"
#include "zeq/hyparith.hpp"
#include "zeq/sigma.hpp"
#include "zeq/solve.hpp"
#include "zeq/transform.hpp"

namespace zeq::cli {

// Exit codes: 0 success / constraint check satisfied; 1 check violated;
// 2 input parse error; 3 regime violation; 4 usage error.
constexpr int kOk = 0;
constexpr int kViolated = 1;
constexpr int kParseError = 2;
constexpr int kRegimeError = 3;
constexpr int kUsageError = 4;

struct Config {
  std::optional<Int> digits;
  std::optional<std::pair<Int, Int>> window;
  bool greatest = false;
  Int universe = 8;
  bool records = false;  // structured line-delimited output
  std::string ringFile;  // binds ha.* oracle constants
  std::string assignmentFile;
  std::string outFile;
};

inline std::string readFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void writeFile(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

inline Window windowFor(const System& s, const Config& cfg) {
  if (cfg.window) return Window(cfg.window->first, cfg.window->second);
  Int d = cfg.digits.value_or(4);
  return s.dom == Domain::Nat ? Window::natDigits(d) : Window::intDigits(d);
}

inline System loadSystem(const std::string& path, const Config& cfg) {
  System s = parseSystem(readFile(path));
  if (!cfg.ringFile.empty()) {
    SigmaRingSpec spec = SigmaRingSpec::parse(readFile(cfg.ringFile));
    resolveOracles(s, haOracleTable(spec));
  }
  return s;
}

inline std::vector<std::string> sortedVars(const System& s) {
  std::vector<std::string> v = s.vars;
  std::sort(v.begin(), v.end());
  return v;
}

inline std::string valueList(const WindowSet& ws) {
  std::ostringstream os;
  bool first = true;
  ws.forEach([&](Int n) {
    if (!first) os << ",";
    os << n;
    first = false;
  });
  return os.str();
}

inline void printWindowAssignment(std::ostream& out, const System& s, const WindowAssignment& a,
                                  bool records) {
  for (const auto& v : sortedVars(s)) {
    const WindowSet& ws = a.values.at(v);
    if (records) {
      out << "record=var name=" << v << " regime=windowed window=" << ws.window().lo << ":"
          << ws.window().hi << " horizon=" << ws.horizon().lo << ":" << ws.horizon().hi
          << " values=" << valueList(ws) << "\n";
    } else {
      out << v << " = {" << valueList(ws) << "}  exact on [" << ws.horizon().lo << ", "
          << ws.horizon().hi << "]\n";
    }
  }
}

inline void printReport(std::ostream& out, const SolveReport& rep, bool records) {
  if (records) {
    out << "record=status regime=" << regimeName(rep.regime) << " status=" << statusName(rep.status)
        << "\n";
    for (const auto& v : rep.verdicts) {
      out << "record=constraint index=" << v.index << " status=" << statusName(v.status);
      if (v.witness) out << " witness=" << *v.witness;
      out << "\n";
    }
  } else {
    out << "status: " << statusName(rep.status) << " (" << regimeName(rep.regime) << " regime)\n";
    for (const auto& v : rep.verdicts) {
      out << "  constraint " << v.index << ": " << statusName(v.status);
      if (v.witness) out << " at " << *v.witness;
      out << "\n";
    }
  }
}

inline ExactAssignment parseAssignmentFile(const std::string& text, Domain dom) {
  ExactAssignment a;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("assignment line " + std::to_string(lineNo) + ": expected <var> = <set>");
    std::string name = line.substr(0, eq);
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t") + 1);
    a[name] = UPSet::parse(line.substr(eq + 1), dom);
  }
  return a;
}

inline int cmdSolve(const std::string& file, const Config& cfg, std::ostream& out) {
  System s = loadSystem(file, cfg);
  Window w = windowFor(s, cfg);
  KleeneResult res = kleeneSolve(s, w, cfg.greatest ? FixMode::Greatest : FixMode::Least);
  printWindowAssignment(out, s, res.assignment, cfg.records);
  printReport(out, res.report, cfg.records);
  return res.report.status == Status::Violated ? kViolated : kOk;
}

inline int cmdCheck(const std::string& file, const Config& cfg, std::ostream& out) {
  if (cfg.assignmentFile.empty()) throw Error("check requires --assignment");
  System s = loadSystem(file, cfg);
  ExactAssignment exact = parseAssignmentFile(readFile(cfg.assignmentFile), s.dom);
  SolveReport rep;
  if (cfg.digits || cfg.window) {
    Window w = windowFor(s, cfg);
    WindowAssignment a;
    a.window = w;
    for (const auto& [v, val] : exact) a.values[v] = val.enumerate(w);
    rep = checkSolution(s, a);
  } else {
    rep = checkSolutionExact(s, exact);
  }
  printReport(out, rep, cfg.records);
  return rep.status == Status::Violated ? kViolated : kOk;
}

inline int cmdBrute(const std::string& file, const Config& cfg, std::ostream& out) {
  System s = loadSystem(file, cfg);
  BruteResult res = bruteForceSolutions(s, cfg.universe);
  if (cfg.records) {
    out << "record=brute universe=" << res.universe.lo << ":" << res.universe.hi
        << " count=" << res.solutions.size() << "\n";
  } else {
    out << res.solutions.size() << " solutions (truncating regime, universe [" << res.universe.lo
        << ", " << res.universe.hi << "])\n";
  }
  for (std::size_t i = 0; i < res.solutions.size(); ++i) {
    for (const auto& [v, vals] : res.solutions[i]) {
      std::ostringstream vs;
      bool first = true;
      for (Int n : vals) {
        if (!first) vs << ",";
        vs << n;
        first = false;
      }
      if (cfg.records)
        out << "record=solution index=" << i << " var=" << v << " values=" << vs.str() << "\n";
      else
        out << "  [" << i << "] " << v << " = {" << vs.str() << "}\n";
    }
  }
  return kOk;
}

inline int cmdMember(const std::string& file, const std::string& var, Int n, const Config& cfg,
                     std::ostream& out) {
  System s = loadSystem(file, cfg);
  bool result = false;
  if (!cfg.assignmentFile.empty()) {
    ExactAssignment a = parseAssignmentFile(readFile(cfg.assignmentFile), s.dom);
    if (!a.count(var)) throw Error("assignment lacks variable " + var);
    result = a.at(var).contains(n);
  } else {
    Window w = windowFor(s, cfg);
    KleeneResult res = kleeneSolve(s, w, cfg.greatest ? FixMode::Greatest : FixMode::Least);
    const WindowSet& ws = res.assignment.values.at(var);
    if (!ws.window().contains(n)) throw RegimeError("query outside window");
    if (!ws.horizon().contains(n))
      out << "note: " << n << " is outside the certified horizon\n";
    result = ws.get(n);
  }
  out << (cfg.records ? std::string("record=member value=") + (result ? "true" : "false")
                      : std::string(result ? "true" : "false"))
      << "\n";
  return kOk;
}

inline int cmdBuild(const std::string& gadget, const std::map<std::string, std::string>& params,
                    const Config& cfg, std::ostream& out) {
  auto param = [&](const std::string& k) -> std::optional<std::string> {
    auto it = params.find(k);
    if (it == params.end()) return std::nullopt;
    return it->second;
  };
  System built;
  if (gadget == "removeone") {
    built = buildRemoveone().carrier;
  } else if (gadget == "E") {
    built = buildE().carrier;
  } else if (gadget == "removeten") {
    built = buildRemoveTen().carrier;
  } else if (gadget == "appendthreesix") {
    ConstVal seed;
    if (auto p = param("seed-pattern"))
      seed = ConstVal::ofPattern(DigitPattern::compile(*p));
    else if (auto u = param("seed"))
      seed = ConstVal::ofUP(UPSet::parse(*u, Domain::Nat));
    else
      throw Error("appendthreesix requires --seed or --seed-pattern");
    built = buildAppend36System(seed);
  } else if (gadget == "A") {
    auto sp = param("s");
    auto st = param("stilde");
    if (!sp || !st) throw Error("A requires --s and --stilde patterns");
    built = buildASystem(ConstVal::ofPattern(DigitPattern::compile(*sp)),
                         ConstVal::ofPattern(DigitPattern::compile(*st)));
  } else if (gadget == "arith") {
    auto prefix = param("prefix");
    auto r = param("r");
    if (!prefix || !r) throw Error("arith requires --prefix and --r");
    Window w = Window::natDigits(cfg.digits.value_or(5));
    built = buildArithSystem(ConstVal::ofPattern(DigitPattern::compile(*r)), *prefix, w).system;
  } else if (gadget == "ha") {
    if (cfg.ringFile.empty()) throw Error("ha requires --ring");
    built = buildHASystem(SigmaRingSpec::parse(readFile(cfg.ringFile)));
  } else {
    throw Error("unknown gadget " + gadget +
                " (expected removeone|E|removeten|appendthreesix|A|arith|ha)");
  }
  std::string text = printSystem(built);
  if (!cfg.outFile.empty())
    writeFile(cfg.outFile, text);
  else
    out << text;
  return kOk;
}

inline int cmdSigmaCompile(const std::string& file, const Config& cfg, std::ostream& out) {
  System s = loadSystem(file, cfg);
  System eqOnly = inclusionToEquation(s);
  System normal = decomposeSystem(eqOnly);
  EncodedSystem es = compileAdditionOnly(normal);
  std::string text = printSystem(es.system);
  std::string sidecar = correspondenceText(es);
  if (!cfg.outFile.empty()) {
    writeFile(cfg.outFile, text);
    writeFile(cfg.outFile + ".map", sidecar);
  } else {
    out << text << "# correspondence\n" << sidecar;
  }
  return kOk;
}

inline int cmdSpecCheck(const std::string& file, const Config& cfg, std::ostream& out) {
  SigmaRingSpec spec = SigmaRingSpec::parse(readFile(file));
  WellFoundedResult wf = checkWellFounded(spec);
  if (cfg.records) {
    out << "record=spec-check well-founded=" << (wf.wellFounded ? "true" : "false");
    if (!wf.wellFounded) {
      out << " path=";
      for (std::size_t i = 0; i < wf.offendingPath.size(); ++i)
        out << (i ? ":" : "") << wf.offendingPath[i];
    }
    out << "\n";
  } else if (wf.wellFounded) {
    out << "well-founded\n";
  } else {
    out << "not well-founded; offending index path:";
    for (Int e : wf.offendingPath) out << " " << e;
    out << "\n";
  }
  return wf.wellFounded ? kOk : kViolated;
}

inline int usage(std::ostream& err) {
  err << "usage: zeq <solve|check|brute|build|sigma-compile|member|spec-check> [args]\n"
         "  solve <file.eq> [--digits D | --window LO:HI] [--mode least|greatest] [--format ...]\n"
         "  check <file.eq> --assignment <file.up> [--digits D | --window LO:HI]\n"
         "  brute <file.eq> --universe U\n"
         "  build <gadget> [--seed S | --s P --stilde P | --prefix EA --r P | --ring F] [-o out]\n"
         "  sigma-compile <file.eq> [-o out]\n"
         "  member <file.eq> <var> <n> [--assignment <file.up>]\n"
         "  spec-check <file.ring>\n"
         "flags: --digits D, --window LO:HI, --mode least|greatest, --universe U,\n"
         "       --format human|records, --ring <file.ring>, --assignment <file>, -o <file>\n";
  return kUsageError;
}

/// Entry point, also used in-process by the test suite.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  try {
    if (args.empty()) return usage(err);
    std::string cmd = args[0];
    Config cfg;
    std::vector<std::string> positional;
    std::map<std::string, std::string> buildParams;
    for (std::size_t i = 1; i < args.size(); ++i) {
      const std::string& a = args[i];
      auto next = [&]() -> std::string {
        if (i + 1 >= args.size()) throw Error("flag " + a + " needs a value");
        return args[++i];
      };
      if (a == "--digits") {
        cfg.digits = std::stoll(next());
      } else if (a == "--window") {
        std::string v = next();
        auto colon = v.find(':');
        if (colon == std::string::npos) throw Error("--window expects LO:HI");
        cfg.window = {std::stoll(v.substr(0, colon)), std::stoll(v.substr(colon + 1))};
      } else if (a == "--mode") {
        std::string m = next();
        if (m == "greatest")
          cfg.greatest = true;
        else if (m != "least")
          throw Error("--mode expects least or greatest");
      } else if (a == "--universe") {
        cfg.universe = std::stoll(next());
      } else if (a == "--format") {
        std::string f = next();
        if (f == "records")
          cfg.records = true;
        else if (f != "human")
          throw Error("--format expects human or records");
      } else if (a == "--ring") {
        cfg.ringFile = next();
      } else if (a == "--assignment") {
        cfg.assignmentFile = next();
      } else if (a == "-o" || a == "--out") {
        cfg.outFile = next();
      } else if (a.rfind("--", 0) == 0 && cmd == "build") {
        buildParams[a.substr(2)] = next();
      } else if (a.rfind("-", 0) == 0) {
        throw Error("unknown flag " + a);
      } else {
        positional.push_back(a);
      }
    }
    if (cmd == "solve" && positional.size() == 1) return cmdSolve(positional[0], cfg, out);
    if (cmd == "check" && positional.size() == 1) return cmdCheck(positional[0], cfg, out);
    if (cmd == "brute" && positional.size() == 1) return cmdBrute(positional[0], cfg, out);
    if (cmd == "member" && positional.size() == 3)
      return cmdMember(positional[0], positional[1], std::stoll(positional[2]), cfg, out);
    if (cmd == "build" && positional.size() == 1)
      return cmdBuild(positional[0], buildParams, cfg, out);
    if (cmd == "sigma-compile" && positional.size() == 1)
      return cmdSigmaCompile(positional[0], cfg, out);
    if (cmd == "spec-check" && positional.size() == 1) return cmdSpecCheck(positional[0], cfg, out);
    return usage(err);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const RegimeError& e) {
    err << "regime violation: " << e.what() << "\n";
    return kRegimeError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
}

}  // namespace zeq::cli
