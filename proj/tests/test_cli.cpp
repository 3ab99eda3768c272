#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "zeq/cli.hpp"

using namespace zeq;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = fs::path(ZEQ_SOURCE_DIR) / "corpus";

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int rc;
  std::string out, err;
};

CliResult runCli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int rc = cli::run(std::move(args), out, err);
  return {rc, out.str(), err.str()};
}

fs::path writeTemp(const std::string& name, const std::string& text) {
  fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("the entire corpus parses, prints and re-parses identically") {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(kCorpus)) {
    if (entry.path().extension() != ".eq") continue;
    ++count;
    INFO(entry.path().string());
    System s = parseSystem(slurp(entry.path()));
    std::string printed = printSystem(s);
    System back = parseSystem(printed);
    REQUIRE(printSystem(back) == printed);
  }
  CHECK(count >= 12);
}

TEST_CASE("solve output is deterministic and matches the worked appendthreesix run") {
  fs::path f = kCorpus / "sec3_append36.eq";
  auto a = runCli({"solve", f.string(), "--digits", "3"});
  auto b = runCli({"solve", f.string(), "--digits", "3"});
  CHECK(a.rc == cli::kOk);
  CHECK(a.out == b.out);
  CHECK(a.out.find("Y = {9,156,303}") != std::string::npos);
  auto g = runCli({"solve", f.string(), "--digits", "3", "--mode", "greatest"});
  CHECK(g.out == a.out);
}

TEST_CASE("records format emits stable line-delimited fields") {
  fs::path f = kCorpus / "kleene_evens.eq";
  auto r = runCli({"solve", f.string(), "--window", "0:10", "--format", "records"});
  CHECK(r.rc == cli::kOk);
  CHECK(r.out.find("record=var name=X") != std::string::npos);
  CHECK(r.out.find("values=0,2,4,6,8,10") != std::string::npos);
  CHECK(r.out.find("record=status") != std::string::npos);
}

TEST_CASE("exit codes are documented behaviour") {
  fs::path bad = writeTemp("zeq_bad.eq", "domain nat\nvar X\neq X = bogus(\n");
  CHECK(runCli({"solve", bad.string()}).rc == cli::kParseError);

  fs::path unresolved = writeTemp("zeq_unresolved.eq",
                                  "domain nat\nvar X\nconst C = up \"{1}\"\nsub X <= C\n");
  CHECK(runCli({"solve", unresolved.string()}).rc == cli::kRegimeError);

  CHECK(runCli({"nonsense"}).rc == cli::kUsageError);

  fs::path evens = kCorpus / "kleene_evens.eq";
  fs::path goodAsg = writeTemp("zeq_good.up", "X = pos(0,2;{0})\n");
  CHECK(runCli({"check", evens.string(), "--assignment", goodAsg.string()}).rc == cli::kOk);
  fs::path badAsg = writeTemp("zeq_badasg.up", "X = pos(0,2;{1})\n");
  CHECK(runCli({"check", evens.string(), "--assignment", badAsg.string()}).rc == cli::kViolated);
}

TEST_CASE("brute prints the solution count") {
  fs::path f = kCorpus / "brute_contradiction.eq";
  auto r = runCli({"brute", f.string(), "--universe", "6"});
  CHECK(r.rc == cli::kOk);
  CHECK(r.out.find("0 solutions") != std::string::npos);
  CHECK(r.out.find("truncating") != std::string::npos);
}

TEST_CASE("build emits files that re-parse to the library structures") {
  auto r = runCli({"build", "removeone"});
  REQUIRE(r.rc == cli::kOk);
  System fromCli = parseSystem(r.out);
  System direct = buildRemoveone().carrier;
  CHECK(printSystem(fromCli) == printSystem(direct));
  // the emitted expression carries the truncated subtraction of the lemma
  CHECK(exprContainsOp(fromCli.constraints[0].chain[1], ExprOp::TruncSub));
}

TEST_CASE("member answers from an assignment file for addition-only systems") {
  // compile X = {0}; the encoded X contains 13 iff 0 is in the decoded set
  fs::path src = writeTemp("zeq_small.eq", "domain nat\nvar X\nconst K = up \"{0}\"\neq X = K\n");
  fs::path outEq = fs::temp_directory_path() / "zeq_small_sigma.eq";
  auto rc = runCli({"sigma-compile", src.string(), "-o", outEq.string()});
  REQUIRE(rc.rc == cli::kOk);
  std::string sidecar = slurp(fs::path(outEq.string() + ".map"));
  CHECK(sidecar.find("X -> s_X, track 13") != std::string::npos);

  UPSet enc = sigmaEncode(UPSet::finite({0}, Domain::Int)).whole;
  fs::path asg = writeTemp("zeq_small_sigma.up", "s_X = " + enc.toText() + "\n");
  auto yes = runCli({"member", outEq.string(), "s_X", "13", "--assignment", asg.string()});
  CHECK(yes.rc == cli::kOk);
  CHECK(yes.out.find("true") != std::string::npos);

  UPSet encEmpty = sigmaEncode(UPSet()).whole;
  fs::path asg2 = writeTemp("zeq_small_sigma2.up", "s_X = " + encEmpty.toText() + "\n");
  auto no = runCli({"member", outEq.string(), "s_X", "13", "--assignment", asg2.string()});
  CHECK(no.out.find("false") != std::string::npos);
}

TEST_CASE("member solves resolved systems when no assignment is given") {
  fs::path f = kCorpus / "kleene_evens.eq";
  auto yes = runCli({"member", f.string(), "X", "8", "--digits", "2"});
  CHECK(yes.out.find("true") != std::string::npos);
  auto no = runCli({"member", f.string(), "X", "7", "--digits", "2"});
  CHECK(no.out.find("false") != std::string::npos);
}

TEST_CASE("spec-check validates ring files") {
  fs::path good = kCorpus / "sec4_ring.ring";
  auto ok = runCli({"spec-check", good.string()});
  CHECK(ok.rc == cli::kOk);
  CHECK(ok.out.find("well-founded") == 0);

  fs::path loop = writeTemp("zeq_loop.ring", "root 1\ntau2 0 -> 1\nf 0 * -> 1\nf 0 total\n");
  auto bad = runCli({"spec-check", loop.string()});
  CHECK(bad.rc == cli::kViolated);
  CHECK(bad.out.find("not well-founded") != std::string::npos);
  CHECK(bad.out.find("1") != std::string::npos);
}

TEST_CASE("solve binds ha oracles from a ring file") {
  fs::path sys = kCorpus / "sec4_ha_system.eq";
  fs::path ring = kCorpus / "sec4_ring.ring";
  // the HA system is not resolved; checking it with the goal assignment goes
  // through the check subcommand instead
  SigmaRingSpec spec = SigmaRingSpec::parse(slurp(ring));
  Window w = Window::natDigits(4);
  WindowAssignment ga = goalAssignment(spec, w);
  std::ostringstream asg;
  for (const auto& [v, ws] : ga.values) {
    asg << v << " = ";
    std::string sep = "{";
    std::ostringstream vals;
    vals << "{";
    bool first = true;
    ws.forEach([&](Int n) {
      if (!first) vals << ",";
      vals << n;
      first = false;
    });
    vals << "}";
    asg << vals.str() << "\n";
  }
  fs::path asgFile = writeTemp("zeq_ha.up", asg.str());
  auto r = runCli({"check", sys.string(), "--assignment", asgFile.string(), "--digits", "4",
                   "--ring", ring.string()});
  CHECK(r.rc == cli::kOk);
  CHECK(r.out.find("violated") == std::string::npos);
}
