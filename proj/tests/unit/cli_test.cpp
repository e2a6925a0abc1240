#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>

#include "corpus.hpp"
#include "cscv/cli/harness.hpp"

using namespace cscv;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cscv_run(const std::string& args) {
  std::string cmd = std::string(CSCV_BINARY) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("cscv-cli-" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& text) const {
    auto p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string corpus_args(const std::string& id) {
  return "--contract " + cscv::testing::corpus_path(id + ".mcl") + " --property " + cscv::testing::corpus_path(id + ".prop") +
         " --snapshot " + cscv::testing::corpus_path(id + ".json");
}

const char* kToggle = "contract T { state on: bool; external fn toggle() { on = !on; } }";
const char* kToggleSnap = R"({"block":0,"state":{"on":false},"actors":["0xA"],"attacker":"0xA"})";

}  // namespace

TEST(Cli, VulnerableEntryExitsOneWithReport) {
  TempDir d;
  auto e = cscv::testing::load_corpus().front();
  auto r = cscv_run("verify --contract " + e.entry.contract + " --property " + e.entry.property + " --snapshot " +
                    e.entry.snapshot + " --report " + d.file("r.json"));
  ASSERT_EQ(e.entry.expect_violation, true);
  EXPECT_EQ(r.code, 1);
  std::ifstream in(d.file("r.json"));
  auto j = nlohmann::ordered_json::parse(in);
  EXPECT_EQ(j["verdict"], "violated");
  EXPECT_FALSE(j["vector"].empty());
}

TEST(Cli, VerifiedExitsZero) {
  TempDir d;
  auto r = cscv_run("verify --contract " + d.write("t.mcl", kToggle) + " --property " +
                    d.write("t.prop", "always on || !on") + " --snapshot " + d.write("t.json", kToggleSnap));
  EXPECT_EQ(r.code, 0);
}

TEST(Cli, BudgetExhaustionExitsTwo) {
  TempDir d;
  auto r = cscv_run("verify --contract " + d.write("c.mcl", "contract C { state n: int; external fn inc(k: int) { n = n + k; } }") +
                    " --property " + d.write("c.prop", "always n >= 0") + " --snapshot " +
                    d.write("c.json", R"({"block":0,"state":{"n":0},"actors":["0xA"],"attacker":"0xA"})") +
                    " --diameter 2 --solver builtin --builtin-range 0..8");
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, MissingPropertyIsUsageError) {
  TempDir d;
  auto r = cscv_run("verify --contract " + d.write("t.mcl", kToggle) + " --snapshot " + d.write("t.json", kToggleSnap));
  EXPECT_EQ(r.code, 64);
}

TEST(Cli, UnknownSubcommandIsUsageError) { EXPECT_EQ(cscv_run("frobnicate").code, 64); }

TEST(Cli, UnreadableOrInvalidInputExitsSixtyFive) {
  TempDir d;
  auto missing = cscv_run("verify --contract " + d.file("nope.mcl") + " --property " +
                          d.write("t.prop", "always on") + " --snapshot " + d.write("t.json", kToggleSnap));
  EXPECT_EQ(missing.code, 65);
  auto bad = cscv_run("verify --contract " + d.write("bad.mcl", "contract {") + " --property " + d.file("t.prop") +
                      " --snapshot " + d.file("t.json"));
  EXPECT_EQ(bad.code, 65);
}

TEST(Cli, AnalyzeEmitsDependencies) {
  TempDir d;
  auto r = cscv_run("analyze --contract " + cscv::testing::corpus_path("re_vault.mcl") + " --emit-deps " + d.file("deps.json"));
  EXPECT_EQ(r.code, 0);
  std::ifstream in(d.file("deps.json"));
  nlohmann::json j;
  EXPECT_NO_THROW(j = nlohmann::json::parse(in));
}

TEST(Cli, ContextEmitsJson) {
  TempDir d;
  auto r = cscv_run("context " + corpus_args("re_vault") + " --emit " + d.file("ctx.json"));
  EXPECT_EQ(r.code, 0);
  std::ifstream in(d.file("ctx.json"));
  auto j = nlohmann::json::parse(in);
  EXPECT_TRUE(j.is_object());
}

TEST(Cli, EmptyManifestGivesEmptyRuns) {
  TempDir d;
  auto r = cscv_run("corpus --manifest " + d.write("m.json", R"({"entries":[]})") + " --proportions 0 --report " +
                    d.file("s.json"));
  EXPECT_EQ(r.code, 0);
  std::ifstream in(d.file("s.json"));
  auto j = nlohmann::json::parse(in);
  ASSERT_EQ(j["runs"].size(), 1u);
  EXPECT_TRUE(j["runs"][0]["entries"].empty());
  EXPECT_EQ(j["runs"][0]["detected"], 0);
}

// The process exit code always matches the report's verdict.
TEST(Cli, ExitCodeMatchesVerdictOnCorpus) {
  TempDir d;
  for (const auto& e : cscv::testing::load_corpus()) {
    auto r = cscv_run("verify --contract " + e.entry.contract + " --property " + e.entry.property + " --snapshot " +
                      e.entry.snapshot + " --report " + d.file(e.entry.id + ".json"));
    std::ifstream in(d.file(e.entry.id + ".json"));
    auto j = nlohmann::json::parse(in);
    std::string v = j["verdict"];
    int want = v == "violated" ? 1 : v == "verified" ? 0 : 2;
    EXPECT_EQ(r.code, want) << e.entry.id;
  }
}

TEST(Harness, ManifestFormsAndBudgets) {
  auto a = cli::parse_manifest(
      R"({"entries":[{"id":"x","class":"RE","contract":"x.mcl","property":"x.prop","snapshot":"x.json",
          "expected":"violated","budget":{"diameter":2}}]})",
      "/base");
  ASSERT_EQ(a.size(), 1u);
  EXPECT_TRUE(a[0].expect_violation);
  EXPECT_EQ(a[0].contract, "/base/x.mcl");
  EXPECT_EQ(cli::entry_budget(a[0], engine::Budget{}).diameter, 2);
  auto b = cli::parse_manifest(R"([])", "/base");
  EXPECT_TRUE(b.empty());
  EXPECT_ANY_THROW(cli::parse_manifest("{", "/base"));
}

TEST(Harness, SweepIsDeterministic) {
  cli::SweepOptions o;
  o.proportions = {optimization::Rational::parse("0"), optimization::Rational::parse("0.5")};
  o.seeds = {7};
  o.heuristic_base = cscv::testing::corpus_heuristics();
  o.solver.kind = cli::SolverKind::Builtin;
  o.solver.hi = 16;
  auto entries = cli::load_manifest(cscv::testing::corpus_path("manifest.json"));
  auto a = cli::sweep_json(cli::run_corpus(entries, o), false);
  auto b = cli::sweep_json(cli::run_corpus(entries, o), false);
  EXPECT_EQ(a, b);
}
