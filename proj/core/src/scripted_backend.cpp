// SPDX-License-Identifier: Apache-2.0
#include <ace/scripted_backend.hpp>

#include <ace/errors.hpp>
#include <ace/text.hpp>

#include <nlohmann/json.hpp>

#include <fstream>
#include <istream>

namespace ace {
namespace {

using json = nlohmann::json;

std::optional<std::int64_t> optional_int(const json& record, const char* key, std::size_t line) {
  if (!record.contains(key) || record[key].is_null()) return std::nullopt;
  if (!record[key].is_number_integer() || record[key].get<std::int64_t>() < 0) {
    throw MalformedRecordError(line, std::string("'") + key + "' must be a non-negative integer");
  }
  return record[key].get<std::int64_t>();
}

std::string required_string(const json& record, const char* key, std::size_t line) {
  if (!record.contains(key) || !record[key].is_string()) {
    throw MalformedRecordError(line, std::string("missing string field '") + key + "'");
  }
  return record[key].get<std::string>();
}

}  // namespace

bool ScriptedRule::matches(const CompletionRequest& request) const {
  if (tag && *tag != request.tag) return false;
  if (seed && *seed != request.seed) return false;
  if (match.empty()) return true;
  if (compiled) return std::regex_search(request.prompt, *compiled);
  return request.prompt.find(match) != std::string::npos;
}

ScriptedRuleSet& ScriptedRuleSet::add(ScriptedRule rule) {
  if (rule.regex) {
    try {
      rule.compiled = std::make_shared<const std::regex>(rule.match, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      throw InvalidArgument("invalid rule regex '" + rule.match + "': " + e.what());
    }
  }
  rules.push_back(std::move(rule));
  return *this;
}

ScriptedRuleSet ScriptedRuleSet::parse(std::istream& in) {
  ScriptedRuleSet set;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;

    json record;
    try {
      record = json::parse(trimmed);
    } catch (const json::parse_error& e) {
      throw MalformedRecordError(line_no, e.what());
    }
    if (!record.is_object()) throw MalformedRecordError(line_no, "record is not an object");

    if (record.contains("default_response")) {
      set.default_response = required_string(record, "default_response", line_no);
      continue;
    }

    ScriptedRule rule;
    if (record.contains("tag") && !record["tag"].is_null()) {
      const auto name = required_string(record, "tag", line_no);
      if (name != "*") {
        rule.tag = parse_call_tag(name);
        if (!rule.tag) throw MalformedRecordError(line_no, "unknown tag '" + name + "'");
      }
    }
    if (record.contains("match")) rule.match = required_string(record, "match", line_no);
    if (rule.match.rfind("re:", 0) == 0) {
      rule.match.erase(0, 3);
      rule.regex = true;
    }
    if (record.contains("seed") && !record["seed"].is_null()) {
      if (!record["seed"].is_number_integer()) {
        throw MalformedRecordError(line_no, "'seed' must be an integer");
      }
      rule.seed = record["seed"].get<std::int64_t>();
    }
    rule.fail = record.value("fail", false);
    if (!rule.fail) rule.response = required_string(record, "response", line_no);
    rule.prompt_tokens = optional_int(record, "prompt_tokens", line_no);
    rule.completion_tokens = optional_int(record, "completion_tokens", line_no);

    try {
      set.add(std::move(rule));
    } catch (const InvalidArgument& e) {
      throw MalformedRecordError(line_no, e.what());
    }
  }
  return set;
}

ScriptedRuleSet ScriptedRuleSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open rule set '" + path.string() + "'");
  return parse(in);
}

ScriptedBackend::ScriptedBackend(ScriptedRuleSet rules, bool record_requests)
    : rules_(std::move(rules)), record_(record_requests) {}

Completion ScriptedBackend::complete(const CompletionRequest& request) {
  validate(request);
  ++calls_;
  ++per_tag_[static_cast<std::size_t>(request.tag)];
  if (record_) {
    std::lock_guard lock(mutex_);
    recorded_.push_back(request);
  }

  const auto prompt_estimate = static_cast<std::int64_t>(count_tokens(request.prompt));
  for (const auto& rule : rules_.rules) {
    if (!rule.matches(request)) continue;
    if (rule.fail) {
      throw BackendError("scripted failure for " + std::string(to_string(request.tag)) + " call");
    }
    Completion out;
    out.text = rule.response;
    out.usage.prompt_tokens = rule.prompt_tokens.value_or(prompt_estimate);
    out.usage.completion_tokens =
        rule.completion_tokens.value_or(static_cast<std::int64_t>(count_tokens(rule.response)));
    return out;
  }

  Completion out;
  out.text = rules_.default_response;
  out.usage.prompt_tokens = prompt_estimate;
  out.usage.completion_tokens = static_cast<std::int64_t>(count_tokens(out.text));
  return out;
}

std::size_t ScriptedBackend::call_count(CallTag tag) const noexcept {
  return per_tag_[static_cast<std::size_t>(tag)].load();
}

std::vector<CompletionRequest> ScriptedBackend::recorded_requests() const {
  std::lock_guard lock(mutex_);
  return recorded_;
}

}  // namespace ace
