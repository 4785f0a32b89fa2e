// SPDX-License-Identifier: Apache-2.0
#include <ace/evalkit.hpp>

#include <ace/errors.hpp>
#include <ace/text.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

namespace ace {
namespace {

using json = nlohmann::json;

bool contains_token_run(std::span<const std::string_view> haystack,
                        std::span<const std::string_view> needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
         haystack.end();
}

std::string format_fixed(double value, int precision) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(precision) << value;
  return out.str();
}

}  // namespace

std::vector<QAItem> load_dataset(std::istream& in) {
  std::vector<QAItem> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;

    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw MalformedRecordError(line_no, e.what());
    }
    if (!record.is_object()) throw MalformedRecordError(line_no, "record is not an object");

    for (const char* key : {"id", "question", "answer"}) {
      if (!record.contains(key) || !record[key].is_string()) {
        throw MalformedRecordError(line_no, std::string("missing string field '") + key + "'");
      }
    }
    QAItem item;
    item.id = record["id"].get<std::string>();
    item.question = record["question"].get<std::string>();
    if (text::trim(item.question).empty()) throw MalformedRecordError(line_no, "empty question");
    item.gold_answers.push_back(record["answer"].get<std::string>());
    if (record.contains("aliases") && !record["aliases"].is_null()) {
      if (!record["aliases"].is_array()) {
        throw MalformedRecordError(line_no, "'aliases' must be a list of strings");
      }
      for (const auto& alias : record["aliases"]) {
        if (!alias.is_string()) {
          throw MalformedRecordError(line_no, "'aliases' must be a list of strings");
        }
        item.gold_answers.push_back(alias.get<std::string>());
      }
    }
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<QAItem> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset '" + path.string() + "'");
  return load_dataset(in);
}

std::string_view to_string(MatchMetric metric) {
  return metric == MatchMetric::Contain ? "contain" : "exact";
}

std::optional<MatchMetric> parse_match_metric(std::string_view name) {
  const auto folded = text::casefold(text::trim(name));
  if (folded == "contain" || folded == "contains") return MatchMetric::Contain;
  if (folded == "exact" || folded == "em") return MatchMetric::Exact;
  return std::nullopt;
}

std::string normalize_answer(std::string_view input) {
  std::string stripped;
  stripped.reserve(input.size());
  for (char c : text::casefold(input)) {
    if (std::ispunct(static_cast<unsigned char>(c)) == 0) stripped.push_back(c);
  }
  auto collapsed = text::collapse_whitespace(stripped);
  for (std::string_view article : {"a ", "an ", "the "}) {
    if (collapsed.rfind(article, 0) == 0) {
      collapsed.erase(0, article.size());
      break;
    }
  }
  return collapsed;
}

bool score_answer(std::string_view prediction, std::span<const std::string> gold_answers,
                  MatchMetric metric) {
  const auto pred = normalize_answer(prediction);
  const auto pred_tokens = text::split_whitespace(pred);
  for (const auto& gold : gold_answers) {
    const auto g = normalize_answer(gold);
    if (g.empty()) continue;
    if (g == pred) return true;
    if (metric == MatchMetric::Contain &&
        contains_token_run(pred_tokens, text::split_whitespace(g))) {
      return true;
    }
  }
  return false;
}

Report aggregate(std::span<const EpisodeResult> results, const std::vector<bool>& scored,
                 std::string label) {
  if (results.empty()) throw InvalidArgument("cannot aggregate an empty result set");
  if (results.size() != scored.size()) {
    throw InvalidArgument("results and scores differ in length");
  }
  Report report;
  report.method_label = std::move(label);
  report.n_questions = results.size();

  std::size_t correct = 0;
  double tokens = 0.0;
  std::int64_t think = 0;
  std::int64_t actions = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    correct += scored[i] ? 1 : 0;
    tokens += static_cast<double>(results[i].total_usage.total());
    think += results[i].think_count;
    actions += results[i].think_count + results[i].retrieve_count;
    report.aborted += results[i].error ? 1 : 0;
  }
  const auto n = static_cast<double>(results.size());
  report.accuracy_percent = 100.0 * static_cast<double>(correct) / n;
  report.avg_tokens = tokens / n;
  report.think_percent =
      actions == 0 ? 0.0 : 100.0 * static_cast<double>(think) / static_cast<double>(actions);
  return report;
}

EpisodeResult run_vanilla(std::string_view question, const EpisodeDeps& deps) {
  if (deps.backend == nullptr) throw InvalidArgument("episode has no backend");
  const auto memory = init_memory(question);
  EpisodeResult result;
  result.question = std::string(memory.question());
  try {
    result.answer = answer(*deps.backend, memory, result.question, deps.prompts, deps.generation,
                           deps.render);
  } catch (const std::exception& e) {
    result.error = e.what();
    result.final_memory = memory;
    throw EpisodeError(e.what(), result);
  }
  result.total_usage = result.answer.usage;
  result.final_memory = memory;
  return result;
}

EpisodeResult run_single_step_rag(std::string_view question, const EpisodeDeps& deps) {
  if (deps.backend == nullptr) throw InvalidArgument("episode has no backend");
  if (deps.retriever == nullptr) throw InvalidArgument("single-step RAG needs a retriever");
  auto memory = init_memory(question);
  EpisodeResult result;
  result.question = std::string(memory.question());

  try {
    RoundTrace round;
    round.action = Action::Retrieve;
    round.memory_before = memory.size();
    round.search_query = formulate_query(memory, result.question);
    std::vector<MemoryItem> items;
    for (auto& p : deps.retriever->search({round.search_query, deps.top_k})) {
      round.items_added.push_back("passage:" + p.doc_id);
      items.push_back(MemoryItem::passage(std::move(p), 1));
    }
    auto merged = union_insert(memory, items);
    memory = std::move(merged.memory);
    round.memory_after = memory.size();
    result.rounds.push_back(std::move(round));
    result.retrieve_count = 1;

    result.answer = answer(*deps.backend, memory, result.question, deps.prompts, deps.generation,
                           deps.render);
  } catch (const std::exception& e) {
    result.error = e.what();
    result.final_memory = memory;
    throw EpisodeError(e.what(), result);
  }
  result.total_usage = result.answer.usage;
  result.final_memory = std::move(memory);
  return result;
}

BenchRun run_benchmark(std::span<const QAItem> dataset, const BenchSettings& settings,
                       const EpisodeDeps& deps) {
  if (dataset.empty()) throw InvalidArgument("dataset is empty");
  if (settings.rounds < 0) throw InvalidArgument("round budget must be non-negative");
  if (settings.policy.mode == PolicyMode::Vote) settings.committee.validate();
  settings.policy.validate(settings.rounds);

  BenchRun run;
  run.episodes.resize(dataset.size());
  std::vector<char> scored(dataset.size(), 0);
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    for (auto i = next++; i < dataset.size(); i = next++) {
      const auto& item = dataset[i];
      EpisodeResult episode;
      try {
        episode = run_episode(item.question, settings.rounds, settings.committee, settings.policy,
                              deps);
      } catch (const EpisodeError& e) {
        episode = e.partial();
      } catch (const std::exception& e) {
        episode.question = item.question;
        episode.error = e.what();
      }
      episode.question_id = item.id;
      if (!episode.error) {
        scored[i] = score_answer(episode.answer.text, item.gold_answers, settings.metric) ? 1 : 0;
      }
      run.episodes[i] = std::move(episode);
    }
  };

  const auto threads = std::clamp<std::size_t>(settings.concurrency, 1, dataset.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  run.scored.assign(scored.begin(), scored.end());

  auto label = settings.label;
  if (label.empty()) label = settings.rounds == 0 ? "vanilla" : "ace/" + settings.policy.describe();
  run.report = aggregate(run.episodes, run.scored, std::move(label));
  run.report.rounds = settings.rounds;
  run.report.metric = settings.metric;
  return run;
}

void write_report_table(std::ostream& out, std::span<const Report> reports) {
  out << std::left << std::setw(24) << "Method" << std::right << std::setw(4) << "N"
      << std::setw(10) << "Acc. (%)" << std::setw(14) << "Avg. Tokens" << std::setw(18)
      << "Think/Reason (%)" << std::setw(6) << "n" << std::setw(9) << "aborted" << '\n';
  for (const auto& r : reports) {
    out << std::left << std::setw(24) << r.method_label << std::right << std::setw(4) << r.rounds
        << std::setw(10) << format_fixed(r.accuracy_percent, 1) << std::setw(14)
        << format_fixed(r.avg_tokens, 1) << std::setw(18) << format_fixed(r.think_percent, 1)
        << std::setw(6) << r.n_questions << std::setw(9) << r.aborted << '\n';
  }
}

void write_report_records(std::ostream& out, std::span<const Report> reports) {
  for (const auto& r : reports) {
    nlohmann::ordered_json record = {{"method", r.method_label},
                                     {"n_rounds", r.rounds},
                                     {"metric", to_string(r.metric)},
                                     {"accuracy_percent", r.accuracy_percent},
                                     {"avg_tokens", r.avg_tokens},
                                     {"think_percent", r.think_percent},
                                     {"n_questions", r.n_questions},
                                     {"aborted", r.aborted},
                                     {"config_digest", r.config_digest}};
    out << record.dump() << '\n';
  }
}

}  // namespace ace
