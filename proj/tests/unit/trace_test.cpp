// SPDX-License-Identifier: Apache-2.0
#include <ace/errors.hpp>
#include <ace/orchestrator.hpp>
#include <ace/scripted_backend.hpp>
#include <ace/trace.hpp>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <sstream>

namespace ace {
namespace {

EpisodeResult smoke_episode(int rounds, std::string id = "q01") {
  static const Retriever retriever(load_corpus(std::string(ACE_FIXTURE_DIR) + "/corpus.jsonl"));
  ScriptedBackend backend(ScriptedRuleSet::load(std::string(ACE_FIXTURE_DIR) + "/smoke.rules"));
  EpisodeDeps deps;
  deps.backend = &backend;
  deps.retriever = &retriever;
  auto r = run_episode("When was the director of Harbor Lights born?", rounds,
                       CommitteeConfig::of_size(5), EpisodePolicy{}, deps);
  r.question_id = std::move(id);
  return r;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(Trace, OneRecordPerRoundPlusSummary) {
  const auto r = smoke_episode(3);
  std::ostringstream out;
  write_trace(r, out);
  const auto lines = lines_of(out.str());
  ASSERT_EQ(lines.size(), 4u);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto j = nlohmann::json::parse(lines[i]);
    EXPECT_EQ(j["schema"], "ace-trace/1");
    EXPECT_EQ(j["type"], "round");
    EXPECT_EQ(j["round"], i);
  }
  const auto summary = nlohmann::json::parse(lines[3]);
  EXPECT_EQ(summary["type"], "summary");
  EXPECT_EQ(summary["total_usage"]["total_tokens"], r.total_usage.total());
  EXPECT_TRUE(summary["error"].is_null());
}

TEST(Trace, RoundTripPreservesCountsAndTotals) {
  std::ostringstream out;
  const auto a = smoke_episode(2, "a");
  const auto b = smoke_episode(4, "b");
  write_trace(a, out);
  write_trace(b, out);
  std::istringstream in(out.str());
  const auto back = read_trace(in);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& orig = i == 0 ? a : b;
    EXPECT_EQ(back[i].question_id, orig.question_id);
    EXPECT_EQ(back[i].answer.text, orig.answer.text);
    EXPECT_EQ(back[i].total_usage, orig.total_usage);
    EXPECT_EQ(back[i].think_count, orig.think_count);
    EXPECT_EQ(back[i].retrieve_count, orig.retrieve_count);
    ASSERT_EQ(back[i].rounds.size(), orig.rounds.size());
    for (std::size_t k = 0; k < orig.rounds.size(); ++k) {
      EXPECT_EQ(back[i].rounds[k].action, orig.rounds[k].action);
      EXPECT_EQ(back[i].rounds[k].votes.size(), orig.rounds[k].votes.size());
      EXPECT_EQ(back[i].rounds[k].items_added, orig.rounds[k].items_added);
    }
  }
}

TEST(Trace, TamperedTotalsAreRejected) {
  std::ostringstream out;
  write_trace(smoke_episode(2), out);
  auto lines = lines_of(out.str());
  auto summary = nlohmann::json::parse(lines.back());
  summary["total_usage"]["prompt_tokens"] = summary["total_usage"]["prompt_tokens"].get<int>() + 1;
  summary["total_usage"]["total_tokens"] = summary["total_usage"]["total_tokens"].get<int>() + 1;
  lines.back() = summary.dump();
  std::string joined;
  for (const auto& l : lines) joined += l + "\n";
  std::istringstream in(joined);
  EXPECT_THROW(read_trace(in), FormatError);
}

TEST(Trace, MissingSummaryAndBadSchemaAreRejected) {
  std::ostringstream out;
  write_trace(smoke_episode(2), out);
  auto lines = lines_of(out.str());
  {
    std::istringstream in(lines[0] + "\n");
    EXPECT_THROW(read_trace(in), FormatError);
  }
  {
    auto j = nlohmann::json::parse(lines[0]);
    j["schema"] = "other/9";
    std::istringstream in(j.dump() + "\n" + lines[1] + "\n" + lines[2] + "\n");
    EXPECT_THROW(read_trace(in), FormatError);
  }
  {
    std::istringstream in("not json\n");
    EXPECT_THROW(read_trace(in), FormatError);
  }
}

TEST(Trace, AbortedEpisodeKeepsError) {
  EpisodeResult r;
  r.question_id = "x";
  r.question = "Q";
  r.error = "backend exploded";
  r.aborted_usage = {5, 1};
  r.total_usage = {5, 1};
  std::ostringstream out;
  write_trace(r, out);
  std::istringstream in(out.str());
  const auto back = read_trace(in);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].error, "backend exploded");
  EXPECT_EQ(back[0].total_usage.total(), 6);
}

}  // namespace
}  // namespace ace
