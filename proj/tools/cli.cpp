// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include "run_config.hpp"

#include <ace/evalkit.hpp>
#include <ace/http_backend.hpp>
#include <ace/scripted_backend.hpp>
#include <ace/trace.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

namespace ace::cli {
namespace {

// Flags that map one-to-one onto config keys.
struct FlagBinding {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr FlagBinding kRunFlags[] = {
    {"--corpus", "corpus", "Corpus file (JSON lines: doc_id, title?, text)"},
    {"--index", "index", "Index file written by `ace index` (instead of --corpus)"},
    {"--rules", "rules", "Scripted backend rule file; selects the scripted backend"},
    {"--backend", "backend", "auto | http | scripted"},
    {"--n", "n", "Rounds per episode (0 = answer directly)"},
    {"--k", "k", "Committee size"},
    {"--top-k", "top_k", "Passages per RETRIEVE round"},
    {"--policy", "policy", "vote | always-retrieve | always-think | schedule:R,T,..."},
    {"--temperature", "temperature", "Committee sampling temperature"},
    {"--answer-temperature", "answer_temperature", "Temperature for think/answer calls"},
    {"--max-tokens", "max_tokens", "Completion cap per call"},
    {"--seed", "seed", "Base seed; all randomness derives from it"},
    {"--metric", "metric", "contain | exact"},
    {"--query-mode", "query_mode", "deterministic | llm-rewrite"},
    {"--trace-out", "trace_out", "Write a JSON-lines trace here"},
    {"--concurrency", "concurrency", "Episodes run in parallel (bench)"},
};

struct RunFlags {
  std::string config_path;
  std::vector<std::pair<const FlagBinding*, CLI::Option*>> options;
  std::vector<std::string> values = std::vector<std::string>(std::size(kRunFlags));
  bool early_stop = false;
  bool no_force_first_retrieve = false;
};

void add_run_flags(CLI::App& cmd, RunFlags& flags) {
  cmd.add_option("--config", flags.config_path, "Flat key = value config file");
  for (std::size_t i = 0; i < std::size(kRunFlags); ++i) {
    auto* opt = cmd.add_option(kRunFlags[i].flag, flags.values[i], kRunFlags[i].help);
    flags.options.emplace_back(&kRunFlags[i], opt);
  }
  cmd.add_flag("--early-stop", flags.early_stop, "Stop after a round that adds nothing");
  cmd.add_flag("--no-force-first-retrieve", flags.no_force_first_retrieve,
               "Let the committee vote in round 0 too");
}

RunConfig resolve_config(RunFlags& flags,
                         const std::vector<std::pair<const char*, CLI::Option*>>& extra,
                         const std::vector<std::string*>& extra_values) {
  RunConfig config;
  apply_env(config);
  if (!flags.config_path.empty()) apply_config_file(config, flags.config_path);
  for (std::size_t i = 0; i < flags.options.size(); ++i) {
    if (flags.options[i].second->count() > 0) {
      set_value(config, flags.options[i].first->key, flags.values[i]);
    }
  }
  for (std::size_t i = 0; i < extra.size(); ++i) {
    if (extra[i].second->count() > 0) set_value(config, extra[i].first, *extra_values[i]);
  }
  if (flags.early_stop) config.policy.early_stop = true;
  if (flags.no_force_first_retrieve) config.policy.force_first_retrieve = false;

  if (config.rounds < 0) throw UsageError("--n must be >= 0");
  if (config.k < 1) throw UsageError("--k must be >= 1");
  if (config.top_k < 1) throw UsageError("--top-k must be >= 1");
  if (config.concurrency < 1) throw UsageError("--concurrency must be >= 1");
  if (config.max_tokens < 1) throw UsageError("--max-tokens must be >= 1");
  if (config.temperature < 0 || config.answer_temperature < 0) {
    throw UsageError("temperatures must be >= 0");
  }
  for (int n : config.n_sweep) {
    if (n < 0) throw UsageError("n_sweep values must be >= 0");
  }
  return config;
}

std::unique_ptr<LlmBackend> make_backend(const RunConfig& config) {
  if (config.resolved_backend() == BackendKind::Scripted) {
    if (config.rules.empty()) throw UsageError("the scripted backend requires --rules");
    try {
      return std::make_unique<ScriptedBackend>(ScriptedRuleSet::load(config.rules));
    } catch (const Error& e) {
      throw UsageError("rules '" + config.rules + "': " + e.what());
    }
  }
  if (config.api_base.empty() || config.model.empty()) {
    throw UsageError(
        "the HTTP backend needs ACE_API_BASE and ACE_MODEL (or api_base/model settings); "
        "use --rules for the scripted backend");
  }
  HttpBackendConfig http;
  http.api_base = config.api_base;
  http.api_key = config.api_key;
  http.model = config.model;
  http.max_in_flight = config.max_in_flight;
  try {
    return std::make_unique<HttpBackend>(std::move(http));
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

std::unique_ptr<Retriever> make_retriever(const RunConfig& config, bool required) {
  try {
    if (!config.index.empty()) return std::make_unique<Retriever>(load_index_bundle(config.index));
    if (!config.corpus.empty()) {
      return std::make_unique<Retriever>(load_corpus(config.corpus), config.bm25);
    }
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (required) throw UsageError("--corpus or --index is required when rounds > 0");
  return nullptr;
}

EpisodeDeps make_deps(const RunConfig& config, LlmBackend& backend, const Retriever* retriever) {
  EpisodeDeps deps;
  deps.backend = &backend;
  deps.retriever = retriever;
  deps.top_k = config.top_k;
  deps.prompts = config.prompts;
  deps.generation.temperature = config.answer_temperature;
  deps.generation.seed = config.seed;
  deps.generation.max_tokens = config.max_tokens;
  deps.query_mode = config.query_mode;
  return deps;
}

CommitteeConfig make_committee(const RunConfig& config) {
  auto committee = CommitteeConfig::of_size(config.k, config.seed);
  committee.sampling_temperature = config.temperature;
  committee.concurrent = config.resolved_backend() == BackendKind::Http;
  return committee;
}

std::ofstream open_output(const std::string& path, const char* what) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw UsageError(std::string("cannot write ") + what + " '" + path + "'");
  return out;
}

std::string action_summary(const EpisodeResult& result) {
  if (result.rounds.empty()) return "(none)";
  std::string out;
  for (std::size_t i = 0; i < result.rounds.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_string(result.rounds[i].action);
  }
  return out;
}

int cmd_index(const std::string& corpus_path, const std::string& out_path, const Bm25Params& bm25,
              std::ostream& out) {
  Corpus corpus;
  try {
    corpus = load_corpus(corpus_path);
  } catch (const DuplicateIdError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  Bm25Index index;
  try {
    index = build_index(corpus, bm25);
  } catch (const InvalidArgument& e) {
    throw UsageError(corpus_path + ": " + e.what());
  }
  save_index_bundle(out_path, corpus, index);
  out << "indexed " << corpus.size() << " documents (" << index.term_count() << " terms) -> "
      << out_path << '\n';
  return kExitOk;
}

int cmd_ask(const std::string& question, const RunConfig& config, std::ostream& out,
            std::ostream& err) {
  if (question.empty()) throw UsageError("a question is required");
  auto backend = make_backend(config);
  auto retriever = make_retriever(config, config.rounds > 0);
  const auto deps = make_deps(config, *backend, retriever.get());
  const auto committee = make_committee(config);

  std::optional<std::ofstream> trace;
  if (!config.trace_out.empty()) trace = open_output(config.trace_out, "trace");

  EpisodeResult result;
  try {
    result = run_episode(question, config.rounds, committee, config.policy, deps);
  } catch (const EpisodeError& e) {
    if (trace) write_trace(e.partial(), *trace);
    err << "error: episode aborted: " << e.what() << '\n';
    out << "rounds: " << action_summary(e.partial()) << '\n';
    return kExitFailure;
  }
  if (trace) write_trace(result, *trace);

  out << "answer: " << result.answer.text << '\n';
  out << "rounds: " << action_summary(result) << '\n';
  out << "tokens: " << result.total_usage.total() << '\n';
  return kExitOk;
}

int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.dataset.empty()) throw UsageError("--dataset is required");
  std::vector<QAItem> dataset;
  try {
    dataset = load_dataset(config.dataset);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (config.limit > 0 && dataset.size() > config.limit) dataset.resize(config.limit);
  if (dataset.empty()) throw UsageError("dataset '" + config.dataset + "' has no questions");

  const auto sweep = config.n_sweep.empty() ? std::vector<int>{config.rounds} : config.n_sweep;
  const int max_rounds = *std::max_element(sweep.begin(), sweep.end());

  auto backend = make_backend(config);
  auto retriever = make_retriever(config, max_rounds > 0);
  const auto deps = make_deps(config, *backend, retriever.get());

  std::optional<std::ofstream> trace;
  if (!config.trace_out.empty()) trace = open_output(config.trace_out, "trace");
  std::optional<std::ofstream> report_file;
  if (!config.report_out.empty()) report_file = open_output(config.report_out, "report");

  std::vector<Report> reports;
  std::size_t aborted = 0;
  std::size_t attempted = 0;
  for (int rounds : sweep) {
    BenchSettings settings;
    settings.rounds = rounds;
    settings.committee = make_committee(config);
    settings.policy = config.policy;
    if (settings.policy.mode == PolicyMode::FixedSchedule &&
        settings.policy.schedule.size() != static_cast<std::size_t>(rounds)) {
      throw UsageError("schedule length must equal N for every swept N");
    }
    settings.metric = config.metric;
    settings.concurrency = config.concurrency;

    auto run = run_benchmark(dataset, settings, deps);
    run.report.config_digest = config_digest(config, rounds);
    if (trace) {
      for (const auto& episode : run.episodes) write_trace(episode, *trace);
    }
    for (const auto& episode : run.episodes) {
      if (episode.error) err << "warning: " << episode.question_id << ": " << *episode.error << '\n';
    }
    aborted += run.report.aborted;
    attempted += run.report.n_questions;
    reports.push_back(std::move(run.report));
  }

  out << "metric: " << to_string(config.metric) << "\n";
  write_report_table(out, reports);
  if (report_file) write_report_records(*report_file, reports);
  return aborted == attempted ? kExitFailure : kExitOk;
}

int cmd_replay(const std::string& path, std::ostream& out) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open trace '" + path + "'");
  const auto episodes = read_trace(in);

  std::int64_t tokens = 0;
  int think = 0;
  int retrieve = 0;
  for (const auto& e : episodes) {
    out << (e.question_id.empty() ? "-" : e.question_id) << "  rounds: " << action_summary(e)
        << "  think=" << e.think_count << " retrieve=" << e.retrieve_count
        << " tokens=" << e.total_usage.total();
    if (e.error) out << "  error: " << *e.error;
    out << '\n';
    tokens += e.total_usage.total();
    think += e.think_count;
    retrieve += e.retrieve_count;
  }
  const int actions = think + retrieve;
  std::ostringstream pct;
  pct.setf(std::ios::fixed);
  pct.precision(1);
  pct << (actions == 0 ? 0.0 : 100.0 * think / actions);
  out << "episodes: " << episodes.size() << "  think=" << think << " retrieve=" << retrieve
      << "  think%=" << pct.str() << "  tokens=" << tokens << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ace - retrieve-or-think question answering over a lexical corpus", "ace"};
  app.require_subcommand(1);
  app.footer("Config precedence: flags > config file > environment > defaults.\n"
             "Environment: ACE_API_BASE, ACE_API_KEY, ACE_MODEL.\n\n" +
             config_keys_help());

  std::string index_corpus;
  std::string index_out;
  double k1 = Bm25Params{}.k1;
  double b = Bm25Params{}.b;
  auto* index_cmd = app.add_subcommand("index", "Build and persist a BM25 index of a corpus");
  index_cmd->add_option("--corpus", index_corpus, "Corpus file")->required();
  index_cmd->add_option("--out", index_out, "Index output path")->required();
  index_cmd->add_option("--k1", k1, "BM25 k1");
  index_cmd->add_option("--b", b, "BM25 b");

  RunFlags ask_flags;
  std::string question;
  auto* ask_cmd = app.add_subcommand("ask", "Answer one question and print the round summary");
  add_run_flags(*ask_cmd, ask_flags);
  ask_cmd->add_option("question", question, "The question")->required();

  RunFlags bench_flags;
  std::string dataset;
  std::string sweep;
  std::string report_out;
  std::string limit;
  auto* bench_cmd = app.add_subcommand("bench", "Score a dataset, one report row per N");
  add_run_flags(*bench_cmd, bench_flags);
  auto* dataset_opt = bench_cmd->add_option("--dataset", dataset, "QA dataset (JSON lines)");
  auto* sweep_opt = bench_cmd->add_option("--n-sweep", sweep, "Round budgets, e.g. 1..8 or 1,3");
  auto* out_opt = bench_cmd->add_option("--out", report_out, "Report records output path");
  auto* limit_opt = bench_cmd->add_option("--limit", limit, "Only the first N questions");

  std::string trace_path;
  auto* replay_cmd = app.add_subcommand("replay", "Re-read a trace and check its totals");
  replay_cmd->add_option("trace", trace_path, "Trace file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (index_cmd->parsed()) {
      if (!(k1 > 0.0) || !(b >= 0.0 && b <= 1.0)) throw UsageError("invalid BM25 parameters");
      return cmd_index(index_corpus, index_out, Bm25Params{k1, b}, out);
    }
    if (ask_cmd->parsed()) {
      const auto config = resolve_config(ask_flags, {}, {});
      return cmd_ask(question, config, out, err);
    }
    if (bench_cmd->parsed()) {
      const auto config = resolve_config(
          bench_flags,
          {{"dataset", dataset_opt}, {"n_sweep", sweep_opt}, {"report_out", out_opt},
           {"limit", limit_opt}},
          {&dataset, &sweep, &report_out, &limit});
      return cmd_bench(config, out, err);
    }
    if (replay_cmd->parsed()) return cmd_replay(trace_path, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const MalformedRecordError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DuplicateIdError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace ace::cli
