#include "algograph/http_backend.hpp"

#include <cstdlib>
#include <semaphore>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "algograph/errors.hpp"
#include "algograph/prompts.hpp"

namespace algograph {

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError(fmt::format("bad endpoint URL '{}'", url));
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::optional<std::string> api_key_from_env() {
  if (const char* key = std::getenv("ALGOGRAPH_API_KEY"); key && *key) return std::string(key);
  return std::nullopt;
}

struct HttpBackend::Impl {
  explicit Impl(std::size_t ceiling) : slots(static_cast<std::ptrdiff_t>(ceiling)) {}
  std::counting_semaphore<1024> slots;
  ParsedUrl url;
};

HttpBackend::HttpBackend(HttpBackendConfig config, Sleeper sleeper)
    : config_(std::move(config)), sleeper_(std::move(sleeper)) {
  if (config_.max_in_flight == 0 || config_.max_in_flight > 1024)
    throw ConfigError("max_in_flight must be in [1, 1024]");
  if (config_.retry.max_attempts < 1) throw ConfigError("retry attempts must be >= 1");
  impl_ = std::make_unique<Impl>(config_.max_in_flight);
  impl_->url = split_url(config_.url);
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::request_body(std::string_view prompt, const GenerationParams& params,
                                      std::uint64_t seed) const {
  nlohmann::json body;
  body["model"] = config_.model;
  body["messages"] = nlohmann::json::array(
      {{{"role", "user"}, {"content", std::string(prompts::strip_tag(prompt))}}});
  const auto temperature = params.temperature ? params.temperature : config_.temperature;
  if (temperature) body["temperature"] = *temperature;
  if (params.max_tokens) body["max_tokens"] = *params.max_tokens;
  // Providers accept signed 64-bit seeds.
  body["seed"] = static_cast<std::int64_t>(seed >> 1);
  return body.dump();
}

ChatExchange HttpBackend::chat(std::string_view prompt, const GenerationParams& params,
                               std::uint64_t seed) const {
  const std::string body = request_body(prompt, params, seed);
  httplib::Headers headers;
  if (config_.api_key) headers.emplace("Authorization", "Bearer " + *config_.api_key);

  impl_->slots.acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{impl_->slots};

  std::string last_error;
  auto backoff = config_.retry.initial_backoff;
  for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
    if (attempt > 1) {
      sleeper_(backoff);
      backoff = std::chrono::milliseconds(
          static_cast<std::int64_t>(static_cast<double>(backoff.count()) * config_.retry.backoff_factor));
    }
    httplib::Client client(impl_->url.origin);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    const auto started = std::chrono::steady_clock::now();
    auto res = client.Post(impl_->url.path, headers, body, "application/json");
    const auto elapsed = std::chrono::steady_clock::now() - started;
    if (!res) {
      last_error = fmt::format("transport error: {}", httplib::to_string(res.error()));
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_error = fmt::format("HTTP status {}", res->status);
      continue;
    }
    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      last_error = fmt::format("malformed response body: {}", e.what());
      continue;
    }
    const auto content = reply.value(nlohmann::json::json_pointer("/choices/0/message/content"),
                                     nlohmann::json());
    if (!content.is_string()) {
      last_error = "response has no choices[0].message.content";
      continue;
    }
    ChatExchange ex;
    ex.prompt_text = std::string(prompt);
    ex.response_text = content.get<std::string>();
    const auto usage = reply.value("usage", nlohmann::json::object());
    auto count = [&](const char* key) -> std::optional<std::uint64_t> {
      if (!usage.is_object() || !usage.contains(key) || !usage[key].is_number_unsigned())
        return std::nullopt;
      return usage[key].get<std::uint64_t>();
    };
    ex.prompt_tokens = count("prompt_tokens").value_or(estimate_tokens(prompts::strip_tag(prompt)));
    ex.completion_tokens = count("completion_tokens").value_or(estimate_tokens(ex.response_text));
    ex.latency_ms = std::chrono::duration<double, std::milli>(elapsed).count();
    return ex;
  }
  throw BackendError(fmt::format("{} failed after {} attempts: {}", config_.url,
                                 config_.retry.max_attempts, last_error));
}

}  // namespace algograph
