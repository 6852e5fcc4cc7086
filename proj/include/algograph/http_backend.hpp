#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "algograph/backend.hpp"

namespace algograph {

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double backoff_factor = 2.0;
};

struct HttpBackendConfig {
  /// Full endpoint URL, e.g. "http://localhost:8000/v1/chat/completions".
  std::string url;
  std::string model;
  std::optional<std::string> api_key;  // sent as a bearer token
  RetryPolicy retry;
  std::optional<double> temperature;  // used when a node sets none
  std::size_t max_in_flight = 4;
  std::chrono::seconds timeout{120};
};

/// Reads ALGOGRAPH_API_KEY, if set.
std::optional<std::string> api_key_from_env();

/// OpenAI-style chat-completion client. The "#task:" tag line is stripped
/// before sending; latency is wall-clock time of the successful attempt.
class HttpBackend final : public LlmBackend {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit HttpBackend(HttpBackendConfig config, Sleeper sleeper = {});
  ~HttpBackend() override;

  ChatExchange chat(std::string_view prompt, const GenerationParams& params,
                    std::uint64_t seed) const override;

  /// Request body for one call (exposed for tests).
  std::string request_body(std::string_view prompt, const GenerationParams& params,
                           std::uint64_t seed) const;

 private:
  struct Impl;
  HttpBackendConfig config_;
  Sleeper sleeper_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace algograph
