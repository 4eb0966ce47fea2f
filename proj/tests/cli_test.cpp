#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fgcore/cli.hpp"

namespace fgcore {
namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::dispatch(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("fgcore_cli_test_" + name);
}

TEST(Cli, RankPrintsNumber) {
  const CliResult r = run({"rank", "--gens", "aa,ab,bb"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "3\n");
  const CliResult j = run({"rank", "--gens", "aa,ab,bb", "--json"});
  EXPECT_EQ(j.code, 0);
  EXPECT_EQ(Json::parse(j.out)["rank"], 3);
}

TEST(Cli, Member) {
  EXPECT_EQ(run({"member", "--gens", "aa,ab,bb", "--word", "abab"}).out, "true\n");
  EXPECT_EQ(run({"member", "--gens", "aa,ab,bb", "--word", "a"}).out, "false\n");
}

TEST(Cli, IntersectCoprimeCycles) {
  const CliResult r = run({"intersect", "--h", "aa", "--k", "aaa"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("rank 1\n"), std::string::npos);
  EXPECT_NE(r.out.find("generators aaaaaa\n"), std::string::npos);
  const Json j = Json::parse(run({"intersect", "--h", "aa", "--k", "aaa", "--json"}).out);
  EXPECT_EQ(j["rank"], 1);
  EXPECT_EQ(j["generators"][0], "aaaaaa");
  EXPECT_EQ(canonical_form(graph_from_json(j["graph"])), canonical_form(from_generators({parse_word("aaaaaa", 2)}, 2)));
}

TEST(Cli, JoinTextAndJsonAgree) {
  const CliResult text = run({"join", "--h", "aa", "--k", "aaa"});
  const Json j = Json::parse(run({"join", "--h", "aa", "--k", "aaa", "--json"}).out);
  EXPECT_NE(text.out.find("rank " + j["rank"].dump() + "\n"), std::string::npos);
  EXPECT_EQ(j["rank"], 1);
  EXPECT_EQ(j["generators"][0], "a");
}

TEST(Cli, MatrixTextAndJsonAgree) {
  const std::vector<std::string> base{"matrix", "--h", "BAb,bbAA,aabA", "--k", "BAb,bbAA,aabA"};
  const CliResult text = run(base);
  auto with_json = base;
  with_json.push_back("--json");
  const Json j = Json::parse(run(with_json).out);
  EXPECT_EQ(text.code, 0);
  for (const char* key : {"l", "p", "q"}) {
    EXPECT_NE(text.out.find(std::string(key) + " " + j[key].dump() + "\n"), std::string::npos) << key;
  }
  EXPECT_NE(text.out.find("integral_bound " + j["bounds"]["integral"].dump()), std::string::npos);
  EXPECT_EQ(run({"matrix", "--h", "a", "--k", "ab,ba"}).code, cli::kExitUsage);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"rank"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"rank", "--gens", "ab", "--bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"rank", "--gens", "ax"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"rank", "--gens", "a,,b"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"search", "--mode", "sideways"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"gp-estimate", "--point", "0,0,-1"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, SearchCleanRun) {
  const CliResult r = run({"search", "--m", "3", "--mode", "random", "--samples", "200", "--seed", "7", "--json"});
  EXPECT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["violations"], 0);
  EXPECT_EQ(j["config"]["m"], 3);
  EXPECT_EQ(j["config"]["sample_count"], 200);
}

TEST(Cli, ConfigFileOverridesFlags) {
  const auto cfg = temp_path("search.cfg");
  const auto report = temp_path("report.json");
  {
    std::ofstream f(cfg);
    f << "m = 2\nsamples = 50\nseed = 3\n";
  }
  const CliResult r = run({"search", "--m", "3", "--samples", "999", "--config", cfg.string(), "--report", report.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  std::ifstream in(report);
  const Json j = Json::parse(in);
  EXPECT_EQ(j["config"]["m"], 2);
  EXPECT_EQ(j["config"]["sample_count"], 50);
  EXPECT_EQ(j["config"]["rng_seed"], 3);
  std::filesystem::remove(cfg);
  std::filesystem::remove(report);
}

TEST(Cli, IoErrors) {
  EXPECT_EQ(run({"search", "--config", "/nonexistent/fgcore.cfg"}).code, cli::kExitIo);
  EXPECT_EQ(run({"search", "--samples", "5", "--report", "/nonexistent/dir/report.json"}).code, cli::kExitIo);
  EXPECT_EQ(run({"gp-estimate", "--schottky", "/nonexistent/s.json"}).code, cli::kExitIo);
}

TEST(Cli, SchottkyAndGpEstimate) {
  const CliResult s = run({"schottky", "--k", "3", "--seed", "5", "--json"});
  EXPECT_EQ(s.code, 0);
  const Json cfg = Json::parse(s.out);
  EXPECT_EQ(cfg["k"], 3);
  EXPECT_EQ(cfg["generators"].size(), 3u);
  EXPECT_EQ(cfg["generators"][0]["class"], "loxodromic");
  EXPECT_NE(run({"schottky", "--k", "3", "--seed", "5"}).out.find("certified true"), std::string::npos);

  const auto path = temp_path("schottky.json");
  {
    std::ofstream f(path);
    f << s.out;
  }
  const CliResult from_file = run({"gp-estimate", "--schottky", path.string(), "--point", "0.1,0.2,1.5", "--json"});
  const CliResult sampled = run({"gp-estimate", "--k", "3", "--seed", "5", "--point", "0.1,0.2,1.5", "--json"});
  EXPECT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_EQ(from_file.out, sampled.out);
  const Json e = Json::parse(sampled.out);
  EXPECT_LE(e["rank_estimate"].get<long>(), 2);
  EXPECT_NEAR(e["lambda"].get<double>(), std::log(5.0), 1e-15);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace fgcore
