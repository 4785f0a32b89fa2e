// SPDX-License-Identifier: Apache-2.0
#include <ace/errors.hpp>
#include <ace/evalkit.hpp>
#include <ace/scripted_backend.hpp>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "support/usage_tap.hpp"

#include <fstream>
#include <sstream>

namespace ace {
namespace {

const std::string kFixtures = ACE_FIXTURE_DIR;

TEST(NormalizeAnswer, Rules) {
  EXPECT_EQ(normalize_answer("  The   U.S.A.!  "), "usa");
  EXPECT_EQ(normalize_answer("An apple a day"), "apple a day");
  EXPECT_EQ(normalize_answer("Theory"), "theory");
  EXPECT_EQ(normalize_answer(""), "");
}

TEST(ScoreAnswer, HandLabeledCases) {
  std::ifstream in(kFixtures + "/answer_cases.jsonl");
  ASSERT_TRUE(in);
  int n = 0;
  for (std::string line; std::getline(in, line);) {
    const auto c = nlohmann::json::parse(line);
    const auto pred = c["prediction"].get<std::string>();
    const auto gold = c["gold"].get<std::vector<std::string>>();
    EXPECT_EQ(score_answer(pred, gold, MatchMetric::Contain), c["contain"].get<bool>()) << line;
    EXPECT_EQ(score_answer(pred, gold, MatchMetric::Exact), c["exact"].get<bool>()) << line;
    ++n;
  }
  EXPECT_EQ(n, 30);
}

TEST(ScoreAnswer, ExactImpliesContain) {
  std::ifstream in(kFixtures + "/answer_cases.jsonl");
  for (std::string line; std::getline(in, line);) {
    const auto c = nlohmann::json::parse(line);
    const auto pred = c["prediction"].get<std::string>();
    const auto gold = c["gold"].get<std::vector<std::string>>();
    if (score_answer(pred, gold, MatchMetric::Exact)) {
      EXPECT_TRUE(score_answer(pred, gold, MatchMetric::Contain)) << line;
    }
  }
}

TEST(MatchMetric, Names) {
  EXPECT_EQ(parse_match_metric("contain"), MatchMetric::Contain);
  EXPECT_EQ(parse_match_metric("EXACT"), MatchMetric::Exact);
  EXPECT_FALSE(parse_match_metric("f1").has_value());
  EXPECT_EQ(to_string(MatchMetric::Exact), "exact");
}

TEST(LoadDataset, ReadsAliases) {
  const auto items = load_dataset(kFixtures + "/dataset10.jsonl");
  ASSERT_EQ(items.size(), 10u);
  EXPECT_EQ(items[2].gold_answers,
            (std::vector<std::string>{"University of Leipzig", "Leipzig University"}));
}

TEST(LoadDataset, MalformedRecords) {
  std::istringstream missing("{\"id\": \"1\", \"question\": \"Q\", \"answer\": \"A\"}\n{\"id\": \"2\", \"question\": \"Q\"}\n");
  try {
    load_dataset(missing);
    FAIL();
  } catch (const MalformedRecordError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream bad_alias("{\"id\": \"1\", \"question\": \"Q\", \"answer\": \"A\", \"aliases\": [3]}\n");
  EXPECT_THROW(load_dataset(bad_alias), MalformedRecordError);
}

EpisodeResult fake_result(int think, int retrieve, std::int64_t tokens, bool failed = false) {
  EpisodeResult r;
  r.think_count = think;
  r.retrieve_count = retrieve;
  r.total_usage = {tokens, 0};
  if (failed) r.error = "boom";
  return r;
}

TEST(Aggregate, HandComputedReport) {
  const std::vector results{fake_result(1, 1, 100), fake_result(2, 0, 200),
                            fake_result(0, 2, 300, true), fake_result(0, 2, 400)};
  const auto r = aggregate(results, {true, false, false, true}, "m");
  EXPECT_DOUBLE_EQ(r.accuracy_percent, 50.0);
  EXPECT_DOUBLE_EQ(r.avg_tokens, 250.0);
  EXPECT_DOUBLE_EQ(r.think_percent, 100.0 * 3 / 8);
  EXPECT_EQ(r.n_questions, 4u);
  EXPECT_EQ(r.aborted, 1u);
  EXPECT_THROW(aggregate({}, {}, "m"), InvalidArgument);
  EXPECT_THROW(aggregate(results, {true}, "m"), InvalidArgument);
}

class BenchTest : public ::testing::Test {
protected:
  BenchTest()
      : retriever_(load_corpus(kFixtures + "/corpus.jsonl")),
        backend_(ScriptedRuleSet::load(kFixtures + "/bench.rules")),
        dataset_(load_dataset(kFixtures + "/dataset10.jsonl")) {
    deps_.backend = &backend_;
    deps_.retriever = &retriever_;
  }

  BenchRun bench(int rounds, std::size_t concurrency = 1, std::string policy = "vote") {
    BenchSettings s;
    s.rounds = rounds;
    s.committee = CommitteeConfig::of_size(5);
    s.policy = EpisodePolicy::parse(policy);
    s.concurrency = concurrency;
    return run_benchmark(dataset_, s, deps_);
  }

  Retriever retriever_;
  ScriptedBackend backend_;
  std::vector<QAItem> dataset_;
  EpisodeDeps deps_;
};

TEST_F(BenchTest, ReportMatchesEpisodes) {
  const auto run = bench(2);
  ASSERT_EQ(run.episodes.size(), 10u);
  int correct = 0;
  double tokens = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(run.episodes[i].question_id, dataset_[i].id);
    const bool ok = score_answer(run.episodes[i].answer.text, dataset_[i].gold_answers);
    EXPECT_EQ(run.scored[i], ok);
    correct += ok;
    tokens += static_cast<double>(run.episodes[i].total_usage.total());
  }
  EXPECT_DOUBLE_EQ(run.report.accuracy_percent, 10.0 * correct);
  EXPECT_DOUBLE_EQ(run.report.avg_tokens, tokens / 10);
  EXPECT_DOUBLE_EQ(run.report.think_percent, 50.0);
  EXPECT_EQ(run.report.method_label, "ace/vote");
}

TEST_F(BenchTest, ConcurrencyDoesNotChangeResults) {
  const auto a = bench(3, 1);
  const auto b = bench(3, 4);
  EXPECT_DOUBLE_EQ(a.report.accuracy_percent, b.report.accuracy_percent);
  EXPECT_DOUBLE_EQ(a.report.avg_tokens, b.report.avg_tokens);
  EXPECT_DOUBLE_EQ(a.report.think_percent, b.report.think_percent);
  for (std::size_t i = 0; i < a.episodes.size(); ++i) {
    EXPECT_EQ(a.episodes[i].answer.text, b.episodes[i].answer.text);
  }
}

TEST_F(BenchTest, TokensGrowWithRounds) {
  double prev = -1;
  for (int n = 0; n <= 4; ++n) {
    const auto run = bench(n);
    EXPECT_GT(run.report.avg_tokens, prev) << n;
    prev = run.report.avg_tokens;
  }
  EXPECT_EQ(bench(0).report.method_label, "vanilla");
}

TEST_F(BenchTest, AbortedEpisodesCountAsWrongWithTokens) {
  ScriptedRuleSet rules = ScriptedRuleSet::load(kFixtures + "/bench.rules");
  ScriptedRule failing;
  failing.tag = CallTag::SubAnswer;
  failing.match = "Copper Orchard";
  failing.fail = true;
  rules.rules.insert(rules.rules.begin(), failing);
  ScriptedBackend backend(rules);
  deps_.backend = &backend;
  const auto run = bench(2);
  EXPECT_EQ(run.report.aborted, 1u);
  const auto& failed = run.episodes[2];
  ASSERT_TRUE(failed.error.has_value());
  EXPECT_FALSE(run.scored[2]);
  EXPECT_GT(failed.total_usage.total(), 0);
}

TEST_F(BenchTest, BaselinesUseTheirOwnPaths) {
  testing::UsageTap tap(backend_);
  deps_.backend = &tap;
  const auto v = run_vanilla(dataset_[0].question, deps_);
  EXPECT_TRUE(v.rounds.empty());
  EXPECT_EQ(tap.calls(), 1u);
  EXPECT_EQ(retriever_.lookups(), 0u);

  const auto rag = run_single_step_rag(dataset_[0].question, deps_);
  EXPECT_EQ(rag.retrieve_count, 1);
  EXPECT_EQ(rag.think_count, 0);
  EXPECT_EQ(tap.calls(), 2u);
  EXPECT_EQ(retriever_.lookups(), 1u);
  EXPECT_GT(rag.final_memory.size(), 1u);
  EXPECT_EQ(rag.total_usage, rag.answer.usage);
}

TEST(ReportOutput, TableAndRecords) {
  Report r;
  r.method_label = "ace/vote";
  r.rounds = 2;
  r.accuracy_percent = 66.666;
  r.avg_tokens = 1234.56;
  r.think_percent = 50;
  r.n_questions = 3;
  std::ostringstream table;
  write_report_table(table, std::span<const Report>(&r, 1));
  EXPECT_NE(table.str().find("Acc. (%)"), std::string::npos);
  EXPECT_NE(table.str().find("66.7"), std::string::npos);
  EXPECT_NE(table.str().find("1234.6"), std::string::npos);
  std::ostringstream records;
  write_report_records(records, std::span<const Report>(&r, 1));
  const auto j = nlohmann::json::parse(records.str());
  EXPECT_EQ(j["n_rounds"], 2);
  EXPECT_EQ(j["metric"], "contain");
}

}  // namespace
}  // namespace ace
