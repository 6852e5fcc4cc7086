#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace algograph {

struct NodeId {
  std::uint32_t value = 0;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

/// One LLM call: request, response, token accounting and latency.
struct ChatExchange {
  std::string prompt_text;
  std::string response_text;
  std::uint64_t prompt_tokens = 0;
  std::uint64_t completion_tokens = 0;
  double latency_ms = 0.0;
  NodeId node_id{};
  std::string stage;

  friend bool operator==(const ChatExchange&, const ChatExchange&) = default;
};

struct GenerationParams {
  std::optional<double> temperature;
  std::optional<std::uint32_t> max_tokens;
};

/// ceil(chars / 4). Deterministic, monotone, and zero on empty text.
std::uint64_t estimate_tokens(std::string_view text) noexcept;

/// A chat-completion service. Implementations must be safe to call from
/// several threads at once.
class LlmBackend {
 public:
  virtual ~LlmBackend() = default;

  /// Sends one prompt. Fills every ChatExchange field except node_id/stage.
  /// Throws BackendError on transport failure and ConfigError on a request
  /// the backend cannot interpret.
  virtual ChatExchange chat(std::string_view prompt, const GenerationParams& params,
                            std::uint64_t seed) const = 0;

  /// True when identical (prompt, seed) always yield identical exchanges.
  virtual bool deterministic() const { return false; }
};

}  // namespace algograph
