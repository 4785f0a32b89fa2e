// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ace/orchestrator.hpp>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ace {

struct QAItem {
  std::string id;
  std::string question;
  std::vector<std::string> gold_answers;  // answer first, then aliases
};

/// Records with string fields id, question, answer and optional aliases
/// (list of strings). Throws MalformedRecordError with the line number.
std::vector<QAItem> load_dataset(std::istream& in);
std::vector<QAItem> load_dataset(const std::filesystem::path& path);

enum class MatchMetric { Contain, Exact };

std::string_view to_string(MatchMetric metric);
std::optional<MatchMetric> parse_match_metric(std::string_view name);

/// Casefold, drop punctuation, collapse whitespace, drop one leading
/// article (a, an, the).
std::string normalize_answer(std::string_view text);

/// Exact: normalized equality with any gold. Contain: additionally true if
/// a gold's normalized tokens occur contiguously in the prediction's.
bool score_answer(std::string_view prediction, std::span<const std::string> gold_answers,
                  MatchMetric metric = MatchMetric::Contain);

struct Report {
  std::string method_label;
  int rounds = 0;
  MatchMetric metric = MatchMetric::Contain;
  double accuracy_percent = 0.0;
  double avg_tokens = 0.0;
  double think_percent = 0.0;
  std::size_t n_questions = 0;
  std::size_t aborted = 0;
  std::string config_digest;
};

/// Acc = 100 * mean(scored); Avg. Tokens = mean total usage; Think% over
/// all action rounds of all episodes (0 when there are none).
Report aggregate(std::span<const EpisodeResult> results, const std::vector<bool>& scored,
                 std::string label);

/// Direct answer from M_0, no rounds and no retrieval.
EpisodeResult run_vanilla(std::string_view question, const EpisodeDeps& deps);

/// Retrieve once with the formulated query, then answer.
EpisodeResult run_single_step_rag(std::string_view question, const EpisodeDeps& deps);

struct BenchSettings {
  int rounds = 3;
  CommitteeConfig committee;
  EpisodePolicy policy;
  MatchMetric metric = MatchMetric::Contain;
  std::size_t concurrency = 1;
  std::string label;
};

struct BenchRun {
  Report report;
  std::vector<EpisodeResult> episodes;  // dataset order
  std::vector<bool> scored;
};

/// Runs every question (up to `concurrency` at a time), scores and
/// aggregates. Aborted episodes count as incorrect with their partial tokens.
BenchRun run_benchmark(std::span<const QAItem> dataset, const BenchSettings& settings,
                       const EpisodeDeps& deps);

/// Aligned text table with the columns N, Acc. (%), Avg. Tokens, Think (%).
void write_report_table(std::ostream& out, std::span<const Report> reports);

/// One JSON line per report.
void write_report_records(std::ostream& out, std::span<const Report> reports);

}  // namespace ace
