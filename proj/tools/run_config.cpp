// SPDX-License-Identifier: Apache-2.0
#include "run_config.hpp"

#include <ace/text.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ace::cli {
namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* begin = value.data();
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end) {
    throw UsageError("invalid value '" + std::string(value) + "' for '" + std::string(key) + "'");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  // std::from_chars for double is missing from older libstdc++.
  std::string s(value);
  char* end = nullptr;
  const double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw UsageError("invalid value '" + s + "' for '" + std::string(key) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  const auto v = text::casefold(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw UsageError("invalid boolean '" + std::string(value) + "' for '" + std::string(key) + "'");
}

std::string unquote(std::string_view raw) {
  auto value = text::trim(raw);
  if (value.size() < 2 || value.front() != '"' || value.back() != '"') return value;
  std::string out;
  for (std::size_t i = 1; i + 1 < value.size(); ++i) {
    char c = value[i];
    if (c == '\\' && i + 2 < value.size()) {
      const char e = value[++i];
      switch (e) {
        case 'n': c = '\n'; break;
        case 't': c = '\t'; break;
        default: c = e; break;
      }
    }
    out.push_back(c);
  }
  return out;
}

struct KeyDoc {
  std::string_view key;
  std::string_view doc;
};

constexpr KeyDoc kKeys[] = {
    {"n", "rounds per episode (default 3; 0 = vanilla)"},
    {"k", "committee size (default 5)"},
    {"top_k", "passages per RETRIEVE (default 5)"},
    {"policy", "vote | always-retrieve | always-think | schedule:R,T,..."},
    {"force_first_retrieve", "round 0 retrieves without voting (default true)"},
    {"early_stop", "stop after a round that adds nothing (default false)"},
    {"backend", "auto | http | scripted"},
    {"rules", "scripted rule file"},
    {"temperature", "committee sampling temperature (default 0.7)"},
    {"answer_temperature", "temperature for think/answer calls (default 0.0)"},
    {"max_tokens", "completion cap per call (default 256)"},
    {"concurrency", "parallel episodes in bench (default 4)"},
    {"max_in_flight", "HTTP backend in-flight call limit (default 8)"},
    {"seed", "base seed; agent j votes with seed + j (default 0)"},
    {"metric", "contain | exact"},
    {"query_mode", "deterministic | llm-rewrite"},
    {"bm25.k1", "BM25 k1 (default 1.2)"},
    {"bm25.b", "BM25 b (default 0.75)"},
    {"n_sweep", "bench round budgets, e.g. 1..8"},
    {"limit", "bench: only the first N questions"},
    {"corpus", "corpus file (JSON lines)"},
    {"index", "index file written by `ace index`"},
    {"dataset", "QA dataset file (JSON lines)"},
    {"trace_out", "trace output file"},
    {"report_out", "report output file"},
    {"api_base", "chat-completions base URL (env ACE_API_BASE)"},
    {"api_key", "API key (env ACE_API_KEY)"},
    {"model", "model name (env ACE_MODEL)"},
    {"prompts.decide", "decision prompt template"},
    {"prompts.sub_query", "sub-query prompt template"},
    {"prompts.sub_answer", "sub-answer prompt template"},
    {"prompts.final_answer", "answer prompt template"},
    {"prompts.query_rewrite", "query rewrite prompt template"},
};

}  // namespace

BackendKind RunConfig::resolved_backend() const {
  if (backend != BackendKind::Auto) return backend;
  return rules.empty() ? BackendKind::Http : BackendKind::Scripted;
}

void set_value(RunConfig& c, std::string_view key, std::string_view raw) {
  const auto value = unquote(raw);
  if (key == "n") {
    c.rounds = parse_number<int>(key, value);
  } else if (key == "k") {
    c.k = parse_number<int>(key, value);
  } else if (key == "top_k") {
    c.top_k = parse_number<std::size_t>(key, value);
  } else if (key == "policy") {
    const bool force = c.policy.force_first_retrieve;
    const bool early = c.policy.early_stop;
    try {
      c.policy = EpisodePolicy::parse(value);
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
    c.policy.force_first_retrieve = force;
    c.policy.early_stop = early;
  } else if (key == "force_first_retrieve") {
    c.policy.force_first_retrieve = parse_bool(key, value);
  } else if (key == "early_stop") {
    c.policy.early_stop = parse_bool(key, value);
  } else if (key == "backend") {
    const auto v = text::casefold(value);
    if (v == "auto") c.backend = BackendKind::Auto;
    else if (v == "http") c.backend = BackendKind::Http;
    else if (v == "scripted") c.backend = BackendKind::Scripted;
    else throw UsageError("unknown backend '" + value + "'");
  } else if (key == "rules") {
    c.rules = value;
  } else if (key == "temperature") {
    c.temperature = parse_real(key, value);
  } else if (key == "answer_temperature") {
    c.answer_temperature = parse_real(key, value);
  } else if (key == "max_tokens") {
    c.max_tokens = parse_number<int>(key, value);
  } else if (key == "concurrency") {
    c.concurrency = parse_number<std::size_t>(key, value);
  } else if (key == "max_in_flight") {
    c.max_in_flight = parse_number<std::size_t>(key, value);
  } else if (key == "seed") {
    c.seed = parse_number<std::int64_t>(key, value);
  } else if (key == "metric") {
    const auto metric = parse_match_metric(value);
    if (!metric) throw UsageError("unknown metric '" + value + "'");
    c.metric = *metric;
  } else if (key == "query_mode") {
    const auto v = text::casefold(value);
    if (v == "deterministic") c.query_mode = QueryMode::Deterministic;
    else if (v == "llm-rewrite") c.query_mode = QueryMode::LlmRewrite;
    else throw UsageError("unknown query_mode '" + value + "'");
  } else if (key == "bm25.k1") {
    c.bm25.k1 = parse_real(key, value);
  } else if (key == "bm25.b") {
    c.bm25.b = parse_real(key, value);
  } else if (key == "n_sweep") {
    c.n_sweep = parse_sweep(value);
  } else if (key == "limit") {
    c.limit = parse_number<std::size_t>(key, value);
  } else if (key == "corpus") {
    c.corpus = value;
  } else if (key == "index") {
    c.index = value;
  } else if (key == "dataset") {
    c.dataset = value;
  } else if (key == "trace_out") {
    c.trace_out = value;
  } else if (key == "report_out") {
    c.report_out = value;
  } else if (key == "api_base") {
    c.api_base = value;
  } else if (key == "api_key") {
    c.api_key = value;
  } else if (key == "model") {
    c.model = value;
  } else if (key == "prompts.decide") {
    c.prompts.decide = value;
  } else if (key == "prompts.sub_query") {
    c.prompts.sub_query = value;
  } else if (key == "prompts.sub_answer") {
    c.prompts.sub_answer = value;
  } else if (key == "prompts.final_answer") {
    c.prompts.final_answer = value;
  } else if (key == "prompts.query_rewrite") {
    c.prompts.query_rewrite = value;
  } else {
    throw UsageError("unknown config key '" + std::string(key) + "'");
  }
}

void apply_env(RunConfig& config) {
  if (const char* v = std::getenv("ACE_API_BASE")) config.api_base = v;
  if (const char* v = std::getenv("ACE_API_KEY")) config.api_key = v;
  if (const char* v = std::getenv("ACE_MODEL")) config.model = v;
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    try {
      set_value(config, text::trim(std::string_view(trimmed).substr(0, eq)),
                std::string_view(trimmed).substr(eq + 1));
    } catch (const UsageError& e) {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::vector<int> parse_sweep(std::string_view text) {
  std::vector<int> out;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto part = text::trim(rest.substr(0, comma));
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_number<int>("n_sweep", part));
    } else {
      const int lo = parse_number<int>("n_sweep", std::string_view(part).substr(0, dots));
      const int hi = parse_number<int>("n_sweep", std::string_view(part).substr(dots + 2));
      if (hi < lo) throw UsageError("empty range '" + part + "' in n_sweep");
      for (int n = lo; n <= hi; ++n) out.push_back(n);
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (out.empty()) throw UsageError("n_sweep is empty");
  return out;
}

std::string config_digest(const RunConfig& c, int rounds) {
  std::ostringstream s;
  s << "n=" << rounds << ";k=" << c.k << ";top_k=" << c.top_k << ";policy=" << c.policy.describe()
    << ";ffr=" << c.policy.force_first_retrieve << ";early=" << c.policy.early_stop
    << ";temp=" << c.temperature << ";atemp=" << c.answer_temperature
    << ";max_tokens=" << c.max_tokens << ";seed=" << c.seed << ";metric=" << to_string(c.metric)
    << ";qmode=" << static_cast<int>(c.query_mode) << ";k1=" << c.bm25.k1 << ";b=" << c.bm25.b
    << ";model=" << c.model << ";limit=" << c.limit;
  for (const auto* p : {&c.prompts.decide, &c.prompts.sub_query, &c.prompts.sub_answer,
                        &c.prompts.final_answer, &c.prompts.query_rewrite}) {
    s << ";prompt=" << text::to_hex(text::fnv1a64(*p));
  }
  return text::to_hex(text::fnv1a64(s.str()));
}

std::string config_keys_help() {
  std::ostringstream s;
  s << "Config file keys (key = value):\n";
  for (const auto& [key, doc] : kKeys) s << "  " << key << "  -  " << doc << '\n';
  return s.str();
}

}  // namespace ace::cli
