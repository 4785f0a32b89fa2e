// SPDX-License-Identifier: Apache-2.0
#include <ace/trace.hpp>

#include <ace/errors.hpp>
#include <ace/text.hpp>

#include <nlohmann/json.hpp>

#include <istream>
#include <ostream>

namespace ace {
namespace {

using ojson = nlohmann::ordered_json;
using json = nlohmann::json;

ojson usage_json(const TokenUsage& u) {
  return {{"prompt_tokens", u.prompt_tokens},
          {"completion_tokens", u.completion_tokens},
          {"total_tokens", u.total()}};
}

TokenUsage usage_from(const json& j) {
  TokenUsage u;
  u.prompt_tokens = j.at("prompt_tokens").get<std::int64_t>();
  u.completion_tokens = j.at("completion_tokens").get<std::int64_t>();
  if (j.contains("total_tokens") && j["total_tokens"].get<std::int64_t>() != u.total()) {
    throw FormatError("usage total_tokens does not equal prompt + completion");
  }
  return u;
}

Action action_from(const json& j) {
  const auto action = parse_action(j.get<std::string>());
  if (!action) throw FormatError("unknown action '" + j.get<std::string>() + "'");
  return *action;
}

}  // namespace

void write_trace(const EpisodeResult& result, std::ostream& sink) {
  for (const auto& round : result.rounds) {
    ojson votes = ojson::array();
    for (const auto& v : round.votes) {
      votes.push_back({{"agent_id", v.agent_id},
                       {"action", to_string(v.action)},
                       {"parsed", v.parsed},
                       {"raw_response", v.raw_response},
                       {"usage", usage_json(v.usage)}});
    }
    ojson record = {{"schema", kTraceSchema},
                    {"type", "round"},
                    {"question_id", result.question_id},
                    {"round", round.round},
                    {"action", to_string(round.action)},
                    {"votes", std::move(votes)},
                    {"search_query", round.search_query},
                    {"items_added", round.items_added},
                    {"memory_before", round.memory_before},
                    {"memory_after", round.memory_after},
                    {"usage", usage_json(round.usage)}};
    sink << record.dump() << '\n';
  }

  ojson summary = {{"schema", kTraceSchema},
                   {"type", "summary"},
                   {"question_id", result.question_id},
                   {"question", result.question},
                   {"answer", result.answer.text},
                   {"answer_usage", usage_json(result.answer.usage)},
                   {"rounds", result.rounds.size()},
                   {"think_count", result.think_count},
                   {"retrieve_count", result.retrieve_count},
                   {"think_percent", result.think_percent()},
                   {"aborted_usage", usage_json(result.aborted_usage)},
                   {"total_usage", usage_json(result.total_usage)},
                   {"error", result.error ? ojson(*result.error) : ojson(nullptr)}};
  sink << summary.dump() << '\n';
  if (!sink) throw Error("failed writing trace record");
}

std::vector<EpisodeResult> read_trace(std::istream& in) {
  std::vector<EpisodeResult> episodes;
  EpisodeResult current;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const auto record = json::parse(line);
      if (record.value("schema", std::string()) != kTraceSchema) {
        throw FormatError("unsupported trace schema");
      }
      const auto type = record.at("type").get<std::string>();

      if (type == "round") {
        RoundTrace round;
        round.round = record.at("round").get<int>();
        if (round.round != static_cast<int>(current.rounds.size())) {
          throw FormatError("round records out of order");
        }
        round.action = action_from(record.at("action"));
        for (const auto& v : record.at("votes")) {
          Vote vote;
          vote.agent_id = v.at("agent_id").get<int>();
          vote.action = action_from(v.at("action"));
          vote.parsed = v.at("parsed").get<bool>();
          vote.raw_response = v.at("raw_response").get<std::string>();
          vote.usage = usage_from(v.at("usage"));
          round.votes.push_back(std::move(vote));
        }
        round.search_query = record.value("search_query", std::string());
        round.items_added = record.at("items_added").get<std::vector<std::string>>();
        round.memory_before = record.at("memory_before").get<std::size_t>();
        round.memory_after = record.at("memory_after").get<std::size_t>();
        round.usage = usage_from(record.at("usage"));
        current.question_id = record.value("question_id", std::string());
        current.rounds.push_back(std::move(round));
        continue;
      }
      if (type != "summary") throw FormatError("unknown record type '" + type + "'");

      current.question_id = record.value("question_id", std::string());
      current.question = record.at("question").get<std::string>();
      current.answer.text = record.at("answer").get<std::string>();
      current.answer.usage = usage_from(record.at("answer_usage"));
      current.aborted_usage = usage_from(record.at("aborted_usage"));
      if (!record.at("error").is_null()) current.error = record["error"].get<std::string>();

      TokenUsage total = current.answer.usage + current.aborted_usage;
      for (const auto& r : current.rounds) {
        (r.action == Action::Think ? current.think_count : current.retrieve_count) += 1;
        total += r.usage;
      }
      current.total_usage = total;

      if (record.at("rounds").get<std::size_t>() != current.rounds.size() ||
          record.at("think_count").get<int>() != current.think_count ||
          record.at("retrieve_count").get<int>() != current.retrieve_count) {
        throw FormatError("summary counts disagree with the round records");
      }
      if (usage_from(record.at("total_usage")) != total) {
        throw FormatError("summary total_usage disagrees with the round records");
      }
      episodes.push_back(std::move(current));
      current = EpisodeResult{};
    } catch (const FormatError& e) {
      throw FormatError("trace line " + std::to_string(line_no) + ": " + e.what());
    } catch (const json::exception& e) {
      throw FormatError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!current.rounds.empty()) throw FormatError("trace ends without a summary record");
  return episodes;
}

}  // namespace ace
