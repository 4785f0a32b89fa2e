// SPDX-License-Identifier: Apache-2.0
#include <ace/http_backend.hpp>

#include <ace/errors.hpp>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace ace {
namespace {

using json = nlohmann::json;

std::string env_or_empty(const char* name) {
  const char* value = std::getenv(name);
  return value ? std::string(value) : std::string();
}

bool is_transient(int status) {
  return status == 429 || status >= 500;
}

}  // namespace

// Holds one of the limited in-flight slots for the duration of a call.
class HttpBackend::Slot {
public:
  explicit Slot(HttpBackend& owner) : owner_(owner) {
    if (owner_.config_.max_in_flight == 0) return;
    std::unique_lock lock(owner_.gate_mutex_);
    owner_.gate_cv_.wait(lock, [this] { return owner_.in_flight_ < owner_.config_.max_in_flight; });
    ++owner_.in_flight_;
  }

  ~Slot() {
    if (owner_.config_.max_in_flight == 0) return;
    {
      std::lock_guard lock(owner_.gate_mutex_);
      --owner_.in_flight_;
    }
    owner_.gate_cv_.notify_one();
  }

  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;

private:
  HttpBackend& owner_;
};

std::chrono::milliseconds RetryPolicy::delay_before(int attempt) const {
  if (attempt <= 1) return std::chrono::milliseconds(0);
  const double scaled = static_cast<double>(initial_delay.count()) *
                        std::pow(backoff_factor, static_cast<double>(attempt - 2));
  const double capped = std::min(scaled, static_cast<double>(max_delay.count()));
  return std::chrono::milliseconds(static_cast<std::int64_t>(capped));
}

HttpBackendConfig HttpBackendConfig::from_env() {
  HttpBackendConfig config;
  config.api_base = env_or_empty("ACE_API_BASE");
  config.api_key = env_or_empty("ACE_API_KEY");
  config.model = env_or_empty("ACE_MODEL");
  return config;
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  if (config_.api_base.empty()) throw InvalidArgument("HTTP backend needs an API base URL");
  if (config_.model.empty()) throw InvalidArgument("HTTP backend needs a model name");
  if (config_.retry.max_attempts < 1) throw InvalidArgument("retry.max_attempts must be >= 1");

  const auto scheme_end = config_.api_base.find("://");
  if (scheme_end == std::string::npos) {
    throw InvalidArgument("API base '" + config_.api_base + "' has no scheme");
  }
  const auto path_start = config_.api_base.find('/', scheme_end + 3);
  scheme_host_port_ = config_.api_base.substr(0, path_start);
  if (path_start != std::string::npos) path_prefix_ = config_.api_base.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

Completion HttpBackend::complete(const CompletionRequest& request) {
  validate(request);
  Slot slot(*this);

  json body = {
      {"model", config_.model},
      {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.temperature},
      {"seed", request.seed},
      {"max_tokens", request.max_tokens},
  };
  const auto payload = body.dump();
  const auto path = path_prefix_ + "/chat/completions";

  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  std::string last_failure = "no attempt made";
  int last_status = 0;
  for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
    std::this_thread::sleep_for(config_.retry.delay_before(attempt));
    ++attempts_;

    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);

    auto response = client.Post(path, headers, payload, "application/json");
    if (!response) {
      last_failure = "transport error: " + httplib::to_string(response.error());
      last_status = 0;
      continue;
    }
    if (is_transient(response->status)) {
      last_failure = "provider returned HTTP " + std::to_string(response->status);
      last_status = response->status;
      continue;
    }
    if (response->status < 200 || response->status >= 300) {
      throw BackendError("provider returned HTTP " + std::to_string(response->status) + ": " +
                             response->body.substr(0, 256),
                         response->status);
    }

    Completion out;
    try {
      const auto reply = json::parse(response->body);
      const auto& message = reply.at("choices").at(0).at("message");
      if (message.contains("content") && message["content"].is_string()) {
        out.text = message["content"].get<std::string>();
      }
      if (reply.contains("usage") && reply["usage"].is_object()) {
        const auto& usage = reply["usage"];
        out.usage.prompt_tokens = usage.value("prompt_tokens", std::int64_t{0});
        out.usage.completion_tokens = usage.value("completion_tokens", std::int64_t{0});
      } else {
        out.usage.prompt_tokens = static_cast<std::int64_t>(count_tokens(request.prompt));
        out.usage.completion_tokens = static_cast<std::int64_t>(count_tokens(out.text));
      }
    } catch (const json::exception& e) {
      throw BackendError(std::string("malformed completion response: ") + e.what(),
                         response->status);
    }
    return out;
  }
  throw BackendError(last_failure + " after " + std::to_string(config_.retry.max_attempts) +
                         " attempts",
                     last_status);
}

}  // namespace ace
