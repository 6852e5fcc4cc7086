#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "algograph/backend.hpp"
#include "algograph/value.hpp"

namespace algograph {

enum class ParseFallback { fail_execution, substitute_default };

/// prompter -> one LLM call -> parser.
struct LlmNode {
  std::function<std::string(std::span<const Value>)> prompter;
  /// Returns nullopt when the response cannot be understood.
  std::function<std::optional<Value>(std::string_view)> parser;
  ParseFallback fallback = ParseFallback::substitute_default;
  Value default_value;
  GenerationParams params;
};

/// Symbolic computation, no model call.
struct NonLlmNode {
  std::function<Value(std::span<const Value>)> compute;
};

using NodeKind = std::variant<LlmNode, NonLlmNode>;

struct Node {
  NodeId id;
  NodeKind kind;
  std::size_t arity = 0;
  std::string stage;  // decomposition stage, e.g. "subtask"
  std::string name;
};

struct Edge {
  NodeId source;
  NodeId target;
  std::size_t slot = 0;
};

/// Graph input i feeds (target, slot).
struct InputBinding {
  NodeId target;
  std::size_t slot = 0;
};

/// DAG of LLM and non-LLM nodes. Node ids are dense and assigned in
/// insertion order. Immutable once handed to execute().
class ComputationGraph {
 public:
  NodeId add_node(NodeKind kind, std::size_t arity, std::string stage = {},
                  std::string name = {});
  void add_edge(NodeId source, NodeId target, std::size_t slot);
  /// Returns the index of the new graph input.
  std::size_t bind_input(NodeId target, std::size_t slot);
  void mark_output(NodeId node);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<InputBinding>& inputs() const { return inputs_; }
  const std::vector<NodeId>& outputs() const { return outputs_; }
  const Node& node(NodeId id) const { return nodes_.at(id.value); }
  bool contains(NodeId id) const { return id.value < nodes_.size(); }
  std::size_t llm_node_count() const;

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<InputBinding> inputs_;
  std::vector<NodeId> outputs_;
};

struct Violation {
  enum class Kind { cycle, dangling_slot, overconnected_slot, bad_edge, unreachable, no_outputs };
  Kind kind;
  std::optional<NodeId> node;
  std::string message;
};

/// Every structural problem in the graph; empty means valid.
std::vector<Violation> validate(const ComputationGraph& graph);

/// Divide -> k independent subtasks -> aggregate. The divide node reads graph
/// input 0; subtask i reads the divide output; the aggregate reads all k
/// subtask outputs in index order and is the only output.
ComputationGraph build_parallel_decomposition(
    std::size_t k, NonLlmNode divide, const std::function<NodeKind(std::size_t)>& subtask,
    NodeKind aggregate);

struct ParseFailure {
  NodeId node;
  std::string response_text;
};

struct ExecutionTrace {
  std::vector<ChatExchange> exchanges;        // sorted by node id
  std::vector<std::optional<Value>> values;   // indexed by node id
  std::vector<ParseFailure> parse_failures;   // sorted by node id

  std::uint64_t prompt_tokens_total() const;
  std::uint64_t completion_tokens_total() const;
  /// Values of every node in `stage`, in node-id order.
  std::vector<Value> stage_values(const ComputationGraph& graph, std::string_view stage) const;
};

struct ExecutionResult {
  std::vector<Value> outputs;
  ExecutionTrace trace;
};

struct ExecuteOptions {
  /// Maximum number of ready nodes evaluated concurrently.
  std::size_t workers = 1;
};

/// Seed handed to the backend for one LLM node.
std::uint64_t node_seed(std::uint64_t global_seed, NodeId id) noexcept;

/// Evaluates the graph in topological order, smallest ready id first.
/// Throws ConfigError for an invalid graph or input arity mismatch and
/// ExecutionError for backend failures or fail_execution parse errors.
ExecutionResult execute(const ComputationGraph& graph, std::span<const Value> inputs,
                        const LlmBackend& backend, std::uint64_t seed,
                        const ExecuteOptions& options = {});

}  // namespace algograph
