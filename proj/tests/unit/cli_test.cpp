// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"
#include "run_config.hpp"

#include <ace/trace.hpp>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ace::cli {
namespace {

const std::string kFixtures = ACE_FIXTURE_DIR;
const std::string kSmokeQuestion = "When was the director of Harbor Lights born?";

struct Invocation {
  int status;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int status = run(args, out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ace_cli_test_" + name);
}

std::vector<std::string> smoke_ask(std::vector<std::string> extra = {}) {
  std::vector<std::string> args{"ask", kSmokeQuestion, "--corpus", kFixtures + "/corpus.jsonl",
                                "--rules", kFixtures + "/smoke.rules"};
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

std::vector<std::string> bench_args(std::vector<std::string> extra) {
  std::vector<std::string> args{"bench", "--corpus", kFixtures + "/corpus.jsonl", "--rules",
                                kFixtures + "/bench.rules", "--dataset",
                                kFixtures + "/dataset10.jsonl"};
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

TEST(CliAsk, MatchesGolden) {
  const auto r = invoke(smoke_ask({"--n", "2"}));
  EXPECT_EQ(r.status, kExitOk) << r.err;
  EXPECT_EQ(r.out, slurp(kFixtures + "/smoke_ask.golden"));
}

TEST(CliAsk, ZeroRoundsHasNoActions) {
  const auto r = invoke(smoke_ask({"--n=0"}));
  EXPECT_EQ(r.status, kExitOk) << r.err;
  EXPECT_NE(r.out.find("rounds: (none)"), std::string::npos);
}

TEST(CliAsk, WritesAReplayableTrace) {
  const auto trace = temp_path("trace.jsonl");
  std::filesystem::remove(trace);
  ASSERT_EQ(invoke(smoke_ask({"--n", "3", "--trace-out", trace.string()})).status, kExitOk);
  std::ifstream in(trace);
  const auto episodes = read_trace(in);
  ASSERT_EQ(episodes.size(), 1u);
  EXPECT_EQ(episodes[0].rounds.size(), 3u);

  const auto replay = invoke({"replay", trace.string()});
  EXPECT_EQ(replay.status, kExitOk) << replay.err;
  EXPECT_NE(replay.out.find("episodes: 1"), std::string::npos);
  std::filesystem::remove(trace);
}

TEST(CliAsk, UsageErrorsExitTwo) {
  EXPECT_EQ(invoke(smoke_ask({"--n", "-1"})).status, kExitUsage);
  EXPECT_EQ(invoke(smoke_ask({"--k", "0"})).status, kExitUsage);
  EXPECT_EQ(invoke(smoke_ask({"--policy", "sometimes"})).status, kExitUsage);
  EXPECT_EQ(invoke(smoke_ask({"--bogus-flag"})).status, kExitUsage);
  EXPECT_EQ(invoke({"ask", "   ", "--corpus", kFixtures + "/corpus.jsonl", "--rules",
                    kFixtures + "/smoke.rules"})
                .status,
            kExitUsage);
  EXPECT_EQ(invoke({"frobnicate"}).status, kExitUsage);
  EXPECT_EQ(invoke({"ask", "Q?", "--corpus", "/nonexistent/corpus.jsonl", "--rules",
                    kFixtures + "/smoke.rules"})
                .status,
            kExitUsage);
}

TEST(CliAsk, BackendFailureExitsOne) {
  const auto rules = temp_path("fail.rules");
  {
    std::ofstream out(rules);
    out << "{\"tag\": \"FinalAnswer\", \"fail\": true}\n";
  }
  const auto r = invoke({"ask", "Q?", "--corpus", kFixtures + "/corpus.jsonl", "--rules",
                         rules.string(), "--n", "1"});
  EXPECT_EQ(r.status, kExitFailure);
  EXPECT_FALSE(r.err.empty());
  std::filesystem::remove(rules);
}

TEST(CliAsk, ConfigFileAndFlagPrecedence) {
  const auto config = temp_path("run.conf");
  {
    std::ofstream out(config);
    out << "# smoke settings\n"
        << "n = 3\n"
        << "policy = \"always-retrieve\"\n"
        << "corpus = " << kFixtures << "/corpus.jsonl\n"
        << "rules = " << kFixtures << "/smoke.rules\n";
  }
  const auto from_file = invoke({"ask", kSmokeQuestion, "--config", config.string()});
  EXPECT_EQ(from_file.status, kExitOk) << from_file.err;
  EXPECT_NE(from_file.out.find("rounds: RETRIEVE, RETRIEVE, RETRIEVE"), std::string::npos);

  const auto flag_wins =
      invoke({"ask", kSmokeQuestion, "--config", config.string(), "--n", "1"});
  EXPECT_NE(flag_wins.out.find("rounds: RETRIEVE\n"), std::string::npos) << flag_wins.out;
  std::filesystem::remove(config);
}

TEST(CliIndex, BuildsAndAsksFromIndex) {
  const auto index = temp_path("corpus.idx");
  const auto built = invoke({"index", "--corpus", kFixtures + "/corpus.jsonl", "--out",
                             index.string()});
  ASSERT_EQ(built.status, kExitOk) << built.err;
  const auto r = invoke({"ask", kSmokeQuestion, "--index", index.string(), "--rules",
                         kFixtures + "/smoke.rules", "--n", "2"});
  EXPECT_EQ(r.status, kExitOk) << r.err;
  EXPECT_EQ(r.out, slurp(kFixtures + "/smoke_ask.golden"));
  std::filesystem::remove(index);
}

TEST(CliBench, SweepThinkShares) {
  const auto r = invoke(bench_args({"--n-sweep", "1,2"}));
  ASSERT_EQ(r.status, kExitOk) << r.err;
  std::istringstream lines(r.out);
  std::vector<std::string> rows;
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("ace/", 0) == 0) rows.push_back(line);
  }
  ASSERT_EQ(rows.size(), 2u) << r.out;
  // Columns: method N acc tokens think n aborted.
  const auto think_of = [](const std::string& row) {
    std::istringstream in(row);
    std::string method;
    double n, acc, tokens, think;
    in >> method >> n >> acc >> tokens >> think;
    return think;
  };
  EXPECT_DOUBLE_EQ(think_of(rows[0]), 0.0);
  EXPECT_DOUBLE_EQ(think_of(rows[1]), 50.0);
}

TEST(CliBench, AlwaysRetrieveHasNoThinking) {
  const auto out = temp_path("report.jsonl");
  const auto r = invoke(bench_args({"--n", "4", "--policy", "always-retrieve", "--out",
                                    out.string()}));
  ASSERT_EQ(r.status, kExitOk) << r.err;
  const auto record = nlohmann::json::parse(slurp(out));
  EXPECT_EQ(record["think_percent"], 0.0);
  EXPECT_EQ(record["n_rounds"], 4);
  std::filesystem::remove(out);
}

TEST(CliBench, RepeatedRunsAreIdentical) {
  const auto a = invoke(bench_args({"--n", "3", "--concurrency", "4"}));
  const auto b = invoke(bench_args({"--n", "3", "--concurrency", "1"}));
  ASSERT_EQ(a.status, kExitOk);
  EXPECT_EQ(a.out, b.out);
}

TEST(CliBench, LimitTruncatesDataset) {
  const auto out = temp_path("limit.jsonl");
  ASSERT_EQ(invoke(bench_args({"--n", "1", "--limit", "3", "--out", out.string()})).status,
            kExitOk);
  EXPECT_EQ(nlohmann::json::parse(slurp(out))["n_questions"], 3);
  std::filesystem::remove(out);
}

TEST(RunConfig, SweepParsing) {
  EXPECT_EQ(parse_sweep("1..4"), (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(parse_sweep("0,2,5"), (std::vector<int>{0, 2, 5}));
  EXPECT_EQ(parse_sweep("1..3,6"), (std::vector<int>{1, 2, 3, 6}));
  EXPECT_THROW(parse_sweep("3..1"), UsageError);
  EXPECT_THROW(parse_sweep("x"), UsageError);
}

TEST(RunConfig, SetValueValidates) {
  RunConfig c;
  set_value(c, "k", "7");
  set_value(c, "metric", "exact");
  set_value(c, "early_stop", "yes");
  EXPECT_EQ(c.k, 7);
  EXPECT_EQ(c.metric, MatchMetric::Exact);
  EXPECT_TRUE(c.policy.early_stop);
  EXPECT_THROW(set_value(c, "nope", "1"), UsageError);
  EXPECT_THROW(set_value(c, "k", "many"), UsageError);
}

TEST(RunConfig, DigestTracksSettings) {
  RunConfig a;
  RunConfig b;
  EXPECT_EQ(config_digest(a, 2), config_digest(b, 2));
  EXPECT_NE(config_digest(a, 2), config_digest(a, 3));
  b.top_k = 3;
  EXPECT_NE(config_digest(a, 2), config_digest(b, 2));
}

TEST(RunConfig, EnvironmentFillsApiSettings) {
  ::setenv("ACE_MODEL", "env-model", 1);
  RunConfig c;
  apply_env(c);
  EXPECT_EQ(c.model, "env-model");
  ::unsetenv("ACE_MODEL");
}

}  // namespace
}  // namespace ace::cli
