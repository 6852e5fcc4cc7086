#include "algograph/graph.hpp"

#include <algorithm>
#include <exception>
#include <queue>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "algograph/errors.hpp"
#include "algograph/seed.hpp"

namespace algograph {

NodeId ComputationGraph::add_node(NodeKind kind, std::size_t arity, std::string stage,
                                  std::string name) {
  NodeId id{static_cast<std::uint32_t>(nodes_.size())};
  nodes_.push_back(Node{id, std::move(kind), arity, std::move(stage), std::move(name)});
  return id;
}

void ComputationGraph::add_edge(NodeId source, NodeId target, std::size_t slot) {
  edges_.push_back(Edge{source, target, slot});
}

std::size_t ComputationGraph::bind_input(NodeId target, std::size_t slot) {
  inputs_.push_back(InputBinding{target, slot});
  return inputs_.size() - 1;
}

void ComputationGraph::mark_output(NodeId node) { outputs_.push_back(node); }

std::size_t ComputationGraph::llm_node_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) {
    return std::holds_alternative<LlmNode>(n.kind);
  }));
}

namespace {

std::string node_label(const Node& n) {
  return n.name.empty() ? fmt::format("node {}", n.id.value)
                        : fmt::format("node {} ({})", n.id.value, n.name);
}

bool edge_ok(const ComputationGraph& g, const Edge& e) {
  return g.contains(e.source) && g.contains(e.target) && e.slot < g.node(e.target).arity;
}

}  // namespace

std::vector<Violation> validate(const ComputationGraph& graph) {
  std::vector<Violation> out;
  const auto& nodes = graph.nodes();
  const std::size_t count = nodes.size();

  if (graph.outputs().empty()) {
    out.push_back({Violation::Kind::no_outputs, std::nullopt, "graph has no output nodes"});
  }
  for (NodeId o : graph.outputs()) {
    if (!graph.contains(o)) {
      out.push_back({Violation::Kind::bad_edge, o, fmt::format("output {} does not exist", o.value)});
    }
  }

  std::vector<std::vector<int>> slot_uses(count);
  for (const Node& n : nodes) slot_uses[n.id.value].assign(n.arity, 0);

  for (const Edge& e : graph.edges()) {
    if (!edge_ok(graph, e)) {
      out.push_back({Violation::Kind::bad_edge, e.target,
                     fmt::format("edge {} -> {} slot {} is invalid", e.source.value, e.target.value,
                                 e.slot)});
      continue;
    }
    ++slot_uses[e.target.value][e.slot];
  }
  for (const InputBinding& b : graph.inputs()) {
    if (!graph.contains(b.target) || b.slot >= graph.node(b.target).arity) {
      out.push_back({Violation::Kind::bad_edge, b.target,
                     fmt::format("input binding to {} slot {} is invalid", b.target.value, b.slot)});
      continue;
    }
    ++slot_uses[b.target.value][b.slot];
  }
  for (const Node& n : nodes) {
    for (std::size_t s = 0; s < n.arity; ++s) {
      const int uses = slot_uses[n.id.value][s];
      if (uses == 0) {
        out.push_back({Violation::Kind::dangling_slot, n.id,
                       fmt::format("{} input slot {} is not connected", node_label(n), s)});
      } else if (uses > 1) {
        out.push_back({Violation::Kind::overconnected_slot, n.id,
                       fmt::format("{} input slot {} has {} producers", node_label(n), s, uses)});
      }
    }
  }

  // Cycle detection (Kahn) over the well-formed edges.
  std::vector<std::vector<std::uint32_t>> succ(count);
  std::vector<std::size_t> indeg(count, 0);
  for (const Edge& e : graph.edges()) {
    if (!edge_ok(graph, e)) continue;
    succ[e.source.value].push_back(e.target.value);
    ++indeg[e.target.value];
  }
  std::vector<std::uint32_t> stack;
  for (std::uint32_t i = 0; i < count; ++i)
    if (indeg[i] == 0) stack.push_back(i);
  std::size_t visited = 0;
  while (!stack.empty()) {
    const std::uint32_t v = stack.back();
    stack.pop_back();
    ++visited;
    for (std::uint32_t w : succ[v])
      if (--indeg[w] == 0) stack.push_back(w);
  }
  if (visited != count) {
    std::vector<std::uint32_t> stuck;
    for (std::uint32_t i = 0; i < count; ++i)
      if (indeg[i] != 0) stuck.push_back(i);
    out.push_back({Violation::Kind::cycle, NodeId{stuck.front()},
                   fmt::format("cycle through nodes {}", fmt::join(stuck, ","))});
  }

  // Reachability from sources: bound inputs and zero-arity nodes.
  std::vector<bool> seen(count, false);
  std::vector<std::uint32_t> frontier;
  auto seed_node = [&](std::uint32_t i) {
    if (i < count && !seen[i]) {
      seen[i] = true;
      frontier.push_back(i);
    }
  };
  for (const InputBinding& b : graph.inputs()) seed_node(b.target.value);
  for (const Node& n : nodes)
    if (n.arity == 0) seed_node(n.id.value);
  while (!frontier.empty()) {
    const std::uint32_t v = frontier.back();
    frontier.pop_back();
    for (std::uint32_t w : succ[v]) seed_node(w);
  }
  for (const Node& n : nodes) {
    if (!seen[n.id.value]) {
      out.push_back({Violation::Kind::unreachable, n.id,
                     fmt::format("{} is not reachable from any input", node_label(n))});
    }
  }
  return out;
}

ComputationGraph build_parallel_decomposition(
    std::size_t k, NonLlmNode divide, const std::function<NodeKind(std::size_t)>& subtask,
    NodeKind aggregate) {
  if (k == 0) throw ConfigError("parallel decomposition needs k >= 1");
  ComputationGraph g;
  const NodeId div = g.add_node(std::move(divide), 1, "divide", "divide");
  g.bind_input(div, 0);
  std::vector<NodeId> subs;
  subs.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    subs.push_back(g.add_node(subtask(i), 1, "subtask", fmt::format("subtask-{}", i)));
    g.add_edge(div, subs.back(), 0);
  }
  const NodeId agg = g.add_node(std::move(aggregate), k, "aggregate", "aggregate");
  for (std::size_t i = 0; i < k; ++i) g.add_edge(subs[i], agg, i);
  g.mark_output(agg);
  return g;
}

std::uint64_t ExecutionTrace::prompt_tokens_total() const {
  std::uint64_t total = 0;
  for (const auto& e : exchanges) total += e.prompt_tokens;
  return total;
}

std::uint64_t ExecutionTrace::completion_tokens_total() const {
  std::uint64_t total = 0;
  for (const auto& e : exchanges) total += e.completion_tokens;
  return total;
}

std::vector<Value> ExecutionTrace::stage_values(const ComputationGraph& graph,
                                                std::string_view stage) const {
  std::vector<Value> out;
  for (const Node& n : graph.nodes()) {
    if (n.stage == stage && n.id.value < values.size() && values[n.id.value]) {
      out.push_back(*values[n.id.value]);
    }
  }
  return out;
}

std::uint64_t node_seed(std::uint64_t global_seed, NodeId id) noexcept {
  return mix64(global_seed ^ mix64(0x5eed0000ULL + id.value));
}

namespace {

struct NodeOutcome {
  Value value;
  std::optional<ChatExchange> exchange;
  std::optional<ParseFailure> failure;
};

NodeOutcome evaluate(const Node& node, std::span<const Value> args, const LlmBackend& backend,
                     std::uint64_t seed) {
  if (const auto* plain = std::get_if<NonLlmNode>(&node.kind)) {
    try {
      return {plain->compute(args), std::nullopt, std::nullopt};
    } catch (const std::exception& ex) {
      throw ExecutionError(fmt::format("{} failed: {}", node_label(node), ex.what()));
    }
  }
  const auto& llm = std::get<LlmNode>(node.kind);
  const std::string prompt = llm.prompter(args);
  ChatExchange ex;
  try {
    ex = backend.chat(prompt, llm.params, node_seed(seed, node.id));
  } catch (const BackendError& err) {
    throw ExecutionError(fmt::format("{}: backend error: {}", node_label(node), err.what()));
  } catch (const ConfigError& err) {
    throw ConfigError(fmt::format("{}: {}", node_label(node), err.what()));
  }
  ex.node_id = node.id;
  ex.stage = node.stage;
  NodeOutcome out;
  if (auto parsed = llm.parser(ex.response_text)) {
    out.value = std::move(*parsed);
  } else {
    if (llm.fallback == ParseFallback::fail_execution) {
      throw ExecutionError(fmt::format("{}: unparseable response '{}'", node_label(node),
                                       ex.response_text));
    }
    out.failure = ParseFailure{node.id, ex.response_text};
    out.value = llm.default_value;
  }
  out.exchange = std::move(ex);
  return out;
}

}  // namespace

ExecutionResult execute(const ComputationGraph& graph, std::span<const Value> inputs,
                        const LlmBackend& backend, std::uint64_t seed,
                        const ExecuteOptions& options) {
  if (auto violations = validate(graph); !violations.empty()) {
    std::string msg = "invalid graph:";
    for (const auto& v : violations) msg += " " + v.message + ";";
    throw ConfigError(msg);
  }
  if (inputs.size() != graph.inputs().size()) {
    throw ConfigError(fmt::format("graph expects {} inputs, got {}", graph.inputs().size(),
                                  inputs.size()));
  }

  const auto& nodes = graph.nodes();
  const std::size_t count = nodes.size();
  std::vector<std::vector<std::optional<Value>>> args(count);
  for (const Node& n : nodes) args[n.id.value].resize(n.arity);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& b = graph.inputs()[i];
    args[b.target.value][b.slot] = inputs[i];
  }

  std::vector<std::vector<const Edge*>> out_edges(count);
  std::vector<std::size_t> pending(count, 0);
  for (const Edge& e : graph.edges()) {
    out_edges[e.source.value].push_back(&e);
    ++pending[e.target.value];
  }

  std::set<std::uint32_t> ready;
  for (std::uint32_t i = 0; i < count; ++i)
    if (pending[i] == 0) ready.insert(i);

  std::vector<std::optional<NodeOutcome>> outcomes(count);
  const std::size_t workers = std::max<std::size_t>(1, options.workers);

  auto run_one = [&](std::uint32_t id) {
    std::vector<Value> a;
    a.reserve(args[id].size());
    for (auto& slot : args[id]) a.push_back(*slot);
    outcomes[id] = evaluate(nodes[id], a, backend, seed);
  };

  while (!ready.empty()) {
    std::vector<std::uint32_t> batch;
    if (workers == 1) {
      batch.push_back(*ready.begin());
      ready.erase(ready.begin());
      run_one(batch.front());
    } else {
      batch.assign(ready.begin(), ready.end());
      ready.clear();
      for (std::size_t start = 0; start < batch.size(); start += workers) {
        const std::size_t end = std::min(batch.size(), start + workers);
        std::vector<std::exception_ptr> errors(end - start);
        {
          std::vector<std::jthread> threads;
          for (std::size_t j = start; j < end; ++j) {
            threads.emplace_back([&, j] {
              try {
                run_one(batch[j]);
              } catch (...) {
                errors[j - start] = std::current_exception();
              }
            });
          }
        }
        for (auto& err : errors)
          if (err) std::rethrow_exception(err);
      }
    }
    for (std::uint32_t id : batch) {
      for (const Edge* e : out_edges[id]) {
        args[e->target.value][e->slot] = outcomes[id]->value;
        if (--pending[e->target.value] == 0) ready.insert(e->target.value);
      }
    }
  }

  ExecutionResult result;
  result.trace.values.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    auto& o = outcomes[i];
    if (!o) continue;
    if (o->exchange) result.trace.exchanges.push_back(std::move(*o->exchange));
    if (o->failure) result.trace.parse_failures.push_back(std::move(*o->failure));
    result.trace.values[i] = std::move(o->value);
  }
  for (NodeId out : graph.outputs()) result.outputs.push_back(*result.trace.values[out.value]);
  return result;
}

}  // namespace algograph
