// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ace/evalkit.hpp>
#include <ace/orchestrator.hpp>
#include <ace/prompts.hpp>
#include <ace/retriever.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ace::cli {

/// A bad flag, config key or input file: exit status 2.
class UsageError : public Error {
public:
  using Error::Error;
};

enum class BackendKind { Auto, Http, Scripted };

/// Settings shared by ask and bench. Precedence when filled in by the CLI:
/// flags > config file > environment > these defaults.
struct RunConfig {
  int rounds = 3;
  int k = 5;
  std::size_t top_k = 5;
  EpisodePolicy policy;
  BackendKind backend = BackendKind::Auto;  // scripted if `rules` is set, else http
  double temperature = 0.7;                 // committee sampling
  double answer_temperature = 0.0;          // sub-query, sub-answer, final answer
  int max_tokens = 256;
  std::size_t concurrency = 4;
  std::size_t max_in_flight = 8;
  std::int64_t seed = 0;
  MatchMetric metric = MatchMetric::Contain;
  QueryMode query_mode = QueryMode::Deterministic;
  Bm25Params bm25;
  std::vector<int> n_sweep;
  std::size_t limit = 0;  // bench: first `limit` questions, 0 = all

  std::string corpus;
  std::string index;
  std::string dataset;
  std::string rules;
  std::string trace_out;
  std::string report_out;

  std::string api_base;
  std::string api_key;
  std::string model;

  PromptSet prompts = PromptSet::defaults();

  BackendKind resolved_backend() const;
};

/// Applies one `key = value` setting. Throws UsageError for unknown keys or
/// unparseable values.
void set_value(RunConfig& config, std::string_view key, std::string_view value);

/// Reads ACE_API_BASE, ACE_API_KEY and ACE_MODEL.
void apply_env(RunConfig& config);

/// Flat `key = value` lines; '#' starts a comment line; values may be
/// double-quoted and use \n, \t, \\ and \" escapes.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

/// "1..8", "1,2,5" or a mix such as "1..3,6".
std::vector<int> parse_sweep(std::string_view text);

/// Stable digest of every setting that influences results.
std::string config_digest(const RunConfig& config, int rounds);

/// Key listing for --help.
std::string config_keys_help();

}  // namespace ace::cli
