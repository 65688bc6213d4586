#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "harnack/config.hpp"
#include "harnack/runner.hpp"

using namespace harnack;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  return Json::parse(in);
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("harnack_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, RoundTrip) {
  ExperimentConfig c;
  c.graph = "lattice:2:24";
  c.operation = "oi";
  c.center = "1,-1";
  c.radii = {2, 4, 8};
  c.k = 2.5;
  c.trials = 12345;
  c.seed = 99;
  c.cap = 1000;
  c.threads = 3;
  c.eps = 0.0625;
  c.out_dir = "some/dir";
  EXPECT_EQ(parse(serialize_config(c)), c);

  const auto d = parse("[graph]\nsource = lamplighter\n[run]\noperation = couple\nR = 4\ntrials = 500\n");
  EXPECT_EQ(parse(serialize_config(d)), d);
  EXPECT_EQ(d.radii, std::vector<int>{4});
  EXPECT_EQ(d.out_dir, "out");
}

TEST(Config, RejectsUnknownKeysAndSections) {
  EXPECT_THROW(parse("[graph]\nsource = path:4\n[run]\noperation = ehi\nR = 1\nradius = 2\n"), precondition_error);
  EXPECT_THROW(parse("[graph]\nsource = path:4\n[extra]\nx = 1\n[run]\noperation = ehi\nR = 1\n"),
               precondition_error);
  EXPECT_THROW(parse("[graph]\nsource = path:4\n[run]\noperation = ehi\nR = 1\nR = 2\n"), precondition_error);
}

TEST(Config, Validation) {
  EXPECT_THROW(parse("[run]\noperation = ehi\nR = 1\n"), precondition_error);
  EXPECT_THROW(parse("[graph]\nsource = path:4\n[run]\noperation = fly\nR = 1\n"), precondition_error);
  EXPECT_THROW(parse("[graph]\nsource = path:4\n[run]\noperation = ehi\n"), precondition_error);
  EXPECT_THROW(parse("[graph]\nsource = path:4\n[run]\noperation = ehi\nR = -1\n"), precondition_error);
  EXPECT_THROW(parse("[graph]\nsource = path:4\n[run]\noperation = ehi\nR = x\n"), precondition_error);
  EXPECT_THROW(parse("[graph]\nsource = path:40\n[run]\noperation = db\nR = 9\n"), precondition_error);
  EXPECT_THROW(parse("[graph]\nsource = path:40\n[run]\noperation = oi\nR = 2\nK = 1\n"), precondition_error);
  EXPECT_THROW(parse("[graph]\nsource = path:40\n[run]\noperation = hg\nR = 2\nD = 3R\n"), precondition_error);
  EXPECT_THROW(parse("[graph]\nsource = lamplighter\n[run]\noperation = couple\nR = 2\nK = 4\n"),
               precondition_error);
  EXPECT_THROW(parse("[graph]\nsource = lamplighter\n[run]\noperation = couple\nR = 2\neps = 0.2\n"),
               precondition_error);
  EXPECT_THROW(parse("[graph]\nsource = lamplighter\n[run]\noperation = osc-fail\nR = 3\nK = 3\n"),
               precondition_error);
  EXPECT_THROW(parse("[graph]\nsource = lamplighter\n[run]\noperation = osc-fail\nR = 3\ntrials = 10\n"),
               precondition_error);
  EXPECT_THROW(parse("[graph]\nsource = path:4\n[run]\noperation = ehi\nR = 1\nthreads = 0\n"),
               precondition_error);
  EXPECT_NO_THROW(parse("[graph]\nsource = path:4\n[run]\noperation = ehi\nR = 0\n"));
  EXPECT_THROW(load_config("/nonexistent/config.ini"), precondition_error);
}

TEST(Config, ReportNames) {
  EXPECT_EQ(report_name("ehi", 4), "ehi_R4.json");
  EXPECT_EQ(report_name("osc-fail", 12), "osc_fail_R12.json");
  EXPECT_EQ(report_name("gen", std::nullopt), "gen.json");
  EXPECT_EQ(report_name("db", 10, "csv"), "db_R10.csv");
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(precondition_error("x")), kExitPrecondition);
  EXPECT_EQ(exit_code_for(truncation_error("x")), kExitPrecondition);
  EXPECT_EQ(exit_code_for(numerical_error("x")), kExitNumerical);
  EXPECT_EQ(exit_code_for(cap_exceeded("x")), kExitCap);
  EXPECT_EQ(exit_code_for(std::runtime_error("x")), 1);
}

TEST(Runner, EhiBatchOnLattice) {
  const auto dir = scratch("ehi");
  auto c = parse("[graph]\nsource = lattice:2:24\n[run]\noperation = ehi\nR = 2,4\n");
  c.out_dir = dir.string();
  const auto res = run_experiment(c);
  EXPECT_EQ(res.exit_code, kExitOk);
  for (int r : {2, 4}) {
    const auto j = read_json((dir / report_name("ehi", r)).string());
    EXPECT_EQ(j["status"], "ok");
    EXPECT_EQ(j["params"]["R"], r);
    EXPECT_GE(j["result"]["constant"].get<double>(), 1.0);
    EXPECT_TRUE(j.contains("timings"));
  }
  fs::remove_all(dir);
}

TEST(Runner, ClippedBallReportsPrecondition) {
  const auto dir = scratch("clipped");
  auto c = parse("[graph]\nsource = lattice:2:5\n[run]\noperation = ehi\nR = 2,3\n");
  c.out_dir = dir.string();
  const auto res = run_experiment(c);
  EXPECT_EQ(res.exit_code, kExitPrecondition);
  ASSERT_FALSE(res.messages.empty());
  EXPECT_EQ(read_json((dir / "ehi_R2.json").string())["status"], "ok");
  const auto bad = read_json((dir / "ehi_R3.json").string());
  EXPECT_EQ(bad["status"], "error");
  EXPECT_EQ(bad["exit_code"], kExitPrecondition);
  EXPECT_NE(bad["error"]["message"].get<std::string>().find("margin"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Runner, BadGraphSourceWritesErrorReport) {
  const auto dir = scratch("badsrc");
  auto c = parse("[graph]\nsource = /nonexistent.tsv\n[run]\noperation = ehi\nR = 1\n");
  c.out_dir = dir.string();
  EXPECT_EQ(run_experiment(c).exit_code, kExitPrecondition);
  EXPECT_EQ(read_json((dir / "ehi.json").string())["status"], "error");
  fs::remove_all(dir);
}

TEST(Runner, OutDirEnvironmentOverride) {
  const auto dir = scratch("env");
  auto c = parse("[graph]\nsource = path:20\n[run]\noperation = gen\n[output]\ndir = ignored\n");
  ::setenv("HARNACK_LAB_OUT_DIR", dir.string().c_str(), 1);
  const auto res = run_experiment(c);
  ::unsetenv("HARNACK_LAB_OUT_DIR");
  EXPECT_EQ(res.exit_code, kExitOk);
  EXPECT_TRUE(fs::exists(dir / "gen.tsv"));
  EXPECT_EQ(read_json((dir / "gen.json").string())["result"]["vertices"], 21);
  EXPECT_FALSE(fs::exists("ignored"));
  fs::remove_all(dir);
}

TEST(Runner, LamplighterOnlyOperations) {
  const auto dir = scratch("lamp");
  auto c = parse("[graph]\nsource = lattice:2:10\n[run]\noperation = couple\nR = 2\ntrials = 100\n");
  c.out_dir = dir.string();
  EXPECT_EQ(run_experiment(c).exit_code, kExitPrecondition);
  fs::remove_all(dir);
}
