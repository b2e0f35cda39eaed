#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qlsforge/cli.hpp"

using namespace qlsforge;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
  nlohmann::json report() const { return nlohmann::json::parse(out); }
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_command(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

nlohmann::json stable(nlohmann::json j) {
  j.erase("timing");
  j.erase("toolVersion");
  return j;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("qlsforge_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                                       ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }
  fs::path dir;
};

}  // namespace

TEST_F(Cli, CatalogWritesTwelveSquares) {
  const auto r = run({"catalog", "--out-dir", path("cat")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = r.report();
  EXPECT_EQ(j["schema"], "report/1");
  EXPECT_EQ(j["command"], "catalog");
  EXPECT_EQ(j["verdict"], "pass");
  EXPECT_EQ(j["witness"]["squares"].size(), 12U);
  for (int i = 1; i <= 12; ++i) EXPECT_TRUE(fs::exists(dir / "cat" / ("catalog" + std::to_string(i) + ".ls")));
}

TEST_F(Cli, MateFailsForEveryCatalogSquare) {
  ASSERT_EQ(run({"catalog", "--out-dir", path("cat"), "--quiet"}).code, 0);
  for (int i = 1; i <= 12; ++i) {
    const auto r = run({"mate", path("cat/catalog" + std::to_string(i) + ".ls")});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.report()["verdict"], "fail");
  }
}

TEST_F(Cli, LatinSquareCommands) {
  write("c3.ls", "123\n231\n312\n");
  write("bad.ls", "12\n12\n");
  write("junk.ls", "12\n3\n");
  auto r = run({"validate-ls", path("c3.ls")});
  EXPECT_EQ(r.report()["verdict"], "pass");
  EXPECT_EQ(r.report()["inputs"][0]["sha256"].get<std::string>().size(), 64U);
  EXPECT_EQ(run({"validate-ls", path("bad.ls")}).report()["verdict"], "fail");
  EXPECT_EQ(run({"validate-ls", path("junk.ls")}).code, 2);
  EXPECT_EQ(run({"validate-ls", path("missing.ls")}).code, 2);
  r = run({"mate", path("c3.ls")});
  EXPECT_EQ(r.report()["verdict"], "pass");
  EXPECT_EQ(run({"transversals", path("c3.ls")}).report()["witness"]["count"], 3);
  EXPECT_EQ(run({"subsquares", path("c3.ls"), "--order", "1"}).report()["witness"]["subsquares"].size(), 9U);
  r = run({"ls-graph", path("c3.ls"), "--out", path("c3.graph")});
  EXPECT_EQ(r.report()["witness"]["vertices"], 9);
  EXPECT_EQ(r.report()["witness"]["cliqueNumber"], 3);
  EXPECT_EQ(SimpleGraph::parse(detail::read_file(path("c3.graph"))).edge_count(), 27U);
}

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"no-such-command"}).code, 1);
  EXPECT_EQ(run({"subsquares", "x.ls"}).code, 1);
  EXPECT_EQ(run({"lemma-scan", "pattern5"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, CheckQomReportIsDeterministicAndVerified) {
  ASSERT_EQ(run({"catalog", "--out-dir", path("cat"), "--quiet"}).code, 0);
  const auto a = run({"check-qom", path("cat/catalog7.ls"), "--threads", "1"});
  const auto b = run({"check-qom", path("cat/catalog7.ls"), "--threads", "2"});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  const auto ja = a.report();
  EXPECT_EQ(ja["verdict"], "refuted");
  EXPECT_EQ(ja["witness"]["traceVerified"], true);
  EXPECT_EQ(ja["witness"]["catalogIndex"], 7);
  EXPECT_EQ(stable(ja).dump(), stable(b.report()).dump());
}

TEST_F(Cli, CheckQomErrors) {
  ASSERT_EQ(run({"catalog", "--out-dir", path("cat"), "--quiet"}).code, 0);
  write("c5.ls", "12345\n23451\n34512\n45123\n51234\n");
  EXPECT_EQ(run({"check-qom", path("c5.ls")}).code, 2);
  EXPECT_EQ(run({"check-qom", path("cat/catalog1.ls"), "--budget", "3"}).code, 3);
  ::setenv("QLSFORGE_BUDGET", "3", 1);
  const int env_code = run({"check-qom", path("cat/catalog1.ls")}).code;
  ::setenv("QLSFORGE_BUDGET", "abc", 1);
  const int bad_env = run({"check-qom", path("cat/catalog1.ls")}).code;
  ::unsetenv("QLSFORGE_BUDGET");
  EXPECT_EQ(env_code, 3);
  EXPECT_EQ(bad_env, 2);
}

TEST_F(Cli, PatternAndLemmaCommands) {
  auto r = run({"pattern-search", "--squares", "2", "--order", "4"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.report()["verdict"], "pass");
  EXPECT_EQ(r.report()["witness"]["allClassical"], true);
  EXPECT_EQ(run({"pattern-search", "--squares", "2", "--order", "4", "--budget", "5"}).code, 3);
  r = run({"lemma-scan", "pattern3"});
  EXPECT_EQ(r.report()["verdict"], "pass");
  r = run({"lemma-scan", "pattern3", "--strict"});
  EXPECT_EQ(r.report()["verdict"], "fail");
  EXPECT_EQ(r.report()["witness"]["counterexamples"].size(), 2U);
}

TEST_F(Cli, NumericPipeline) {
  ASSERT_EQ(run({"fixtures", "order9", "--out", path("o9.json")}).code, 0);
  auto r = run({"validate-moqls", path("o9.json")});
  EXPECT_EQ(r.report()["verdict"], "pass");
  r = run({"standard-form", path("o9.json"), "--out", path("o9s.json")});
  EXPECT_EQ(r.report()["verdict"], "pass");
  EXPECT_EQ(run({"validate-moqls", path("o9s.json")}).report()["verdict"], "pass");

  ASSERT_EQ(run({"fixtures", "order4", "--out", path("o4.json")}).code, 0);
  EXPECT_EQ(run({"validate-qls", path("o4.json")}).report()["verdict"], "pass");
  r = run({"classicalize", path("o4.json"), "--out", path("o4c.json")});
  EXPECT_EQ(r.report()["verdict"], "pass");
  EXPECT_EQ(r.report()["witness"]["classical"], (nlohmann::json{"1234", "2143", "3412", "4321"}));
  EXPECT_EQ(run({"validate-qls", path("o4c.json")}).report()["verdict"], "pass");
  EXPECT_EQ(run({"validate-qls", path("o9.json")}).code, 2);

  const auto e = from_classical_mols(LatinSquare::from_rows({"123", "231", "312"}), LatinSquare::from_rows({"123", "312", "231"}));
  write("ent.json", to_json(e).dump());
  EXPECT_EQ(run({"check-entangled", path("ent.json")}).report()["verdict"], "pass");
  write("garbage.json", "{not json");
  EXPECT_EQ(run({"validate-qls", path("garbage.json")}).code, 2);
}

TEST_F(Cli, QuietSuppressesSummary) {
  EXPECT_FALSE(run({"catalog"}).err.empty());
  EXPECT_TRUE(run({"--quiet", "catalog"}).err.empty());
}

TEST_F(Cli, BinaryExitCodes) {
  const std::string bin = QLSFORGE_CLI_PATH;
  EXPECT_EQ(std::system((bin + " catalog --quiet > /dev/null").c_str()), 0);
  const int st = std::system((bin + " bogus > /dev/null 2>&1").c_str());
  EXPECT_TRUE(WIFEXITED(st));
  EXPECT_EQ(WEXITSTATUS(st), 1);
}
