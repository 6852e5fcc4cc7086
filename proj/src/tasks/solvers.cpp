#include <algorithm>
#include <map>

#include "algograph/errors.hpp"
#include "algograph/prompts.hpp"
#include "algograph/tasks.hpp"

namespace algograph::tasks {

namespace {

NonLlmNode split_text(const DecompositionPlan& plan) {
  return NonLlmNode{[segments = plan.segments](std::span<const Value> in) -> Value {
    const auto& text = std::get<Text>(in[0]);
    TextList parts;
    parts.reserve(segments.size());
    for (const auto& s : segments) parts.push_back(text.substr(s.begin, s.length));
    return parts;
  }};
}

const Text& part(std::span<const Value> in, std::size_t i) { return std::get<TextList>(in[0]).at(i); }

}  // namespace

ComputationGraph counting_graph(const DecompositionPlan& plan) {
  auto subtask = [](std::size_t i) -> NodeKind {
    LlmNode node;
    node.prompter = [i](std::span<const Value> in) { return prompts::counting_prompt(part(in, i)); };
    node.parser = [](std::string_view r) -> std::optional<Value> {
      if (auto c = prompts::parse_count(r)) return Value{*c};
      return std::nullopt;
    };
    node.default_value = std::int64_t{0};
    return node;
  };
  NonLlmNode sum{[](std::span<const Value> in) -> Value {
    std::int64_t total = 0;
    for (const auto& v : in) total += std::get<std::int64_t>(v);
    return total;
  }};
  return build_parallel_decomposition(plan.k, split_text(plan), subtask, sum);
}

ComputationGraph sorting_graph(const DecompositionPlan& plan, MergeMode merge) {
  // The list travels whole; each sub-task reads its own slice.
  NonLlmNode divide{[n = plan.n](std::span<const Value> in) -> Value {
    const auto& list = std::get<RealList>(in[0]);
    if (list.size() != n) throw ConfigError("sorting input length does not match plan");
    return list;
  }};
  auto subtask = [&plan](std::size_t i) -> NodeKind {
    LlmNode node;
    node.prompter = [seg = plan.segments[i]](std::span<const Value> in) {
      const auto& list = std::get<RealList>(in[0]);
      return prompts::sorting_prompt(std::span<const double>(list).subspan(seg.begin, seg.length));
    };
    node.parser = [](std::string_view r) -> std::optional<Value> {
      if (auto l = prompts::parse_list(r)) return Value{std::move(*l)};
      return std::nullopt;
    };
    node.default_value = RealList{};
    return node;
  };
  NonLlmNode merge_node{[merge](std::span<const Value> in) -> Value {
    std::vector<std::vector<double>> lists;
    lists.reserve(in.size());
    for (const auto& v : in) lists.push_back(std::get<RealList>(v));
    return merge_many(std::move(lists), merge);
  }};
  return build_parallel_decomposition(plan.k, std::move(divide), subtask, std::move(merge_node));
}

AnswerRecord majority_vote(std::span<const Value> votes) {
  std::map<std::string, std::size_t> tally;
  for (const auto& v : votes) {
    const auto* rec = std::get_if<AnswerRecord>(&v);
    if (!rec || rec->kind != AnswerRecord::Kind::passcode || rec->candidates.empty()) continue;
    ++tally[rec->candidates.front()];
  }
  if (tally.empty()) return AnswerRecord::unknown();
  std::size_t best = 0;
  for (const auto& [code, count] : tally) best = std::max(best, count);
  std::vector<std::string> winners;
  for (const auto& [code, count] : tally)
    if (count == best) winners.push_back(code);  // map order is lexicographic
  if (winners.size() == 1) return AnswerRecord::passcode(std::move(winners.front()));
  return AnswerRecord::tie(std::move(winners));
}

ComputationGraph retrieval_graph(const DecompositionPlan& plan, std::string question) {
  auto subtask = [&question](std::size_t i) -> NodeKind {
    LlmNode node;
    node.prompter = [i, question](std::span<const Value> in) {
      return prompts::retrieval_prompt(part(in, i), question);
    };
    node.parser = [](std::string_view r) -> std::optional<Value> {
      if (auto a = prompts::parse_passcode_answer(r)) return Value{std::move(*a)};
      return std::nullopt;
    };
    node.default_value = AnswerRecord::unknown();
    return node;
  };
  NonLlmNode vote{[](std::span<const Value> in) -> Value { return majority_vote(in); }};
  return build_parallel_decomposition(plan.k, split_text(plan), subtask, std::move(vote));
}

ComputationGraph rag_graph(const DecompositionPlan& plan, std::string question) {
  auto subtask = [&question](std::size_t i) -> NodeKind {
    LlmNode node;
    node.prompter = [i, question](std::span<const Value> in) {
      return prompts::rag_retrieve_prompt(part(in, i), question);
    };
    node.parser = [](std::string_view r) -> std::optional<Value> {
      if (auto s = prompts::parse_sentences(r)) return Value{std::move(*s)};
      return std::nullopt;
    };
    node.default_value = TextList{};
    return node;
  };
  LlmNode aggregate;
  aggregate.prompter = [question](std::span<const Value> in) {
    TextList sentences;
    for (const auto& v : in) {
      const auto& found = std::get<TextList>(v);
      sentences.insert(sentences.end(), found.begin(), found.end());
    }
    return prompts::rag_aggregate_prompt(sentences, question);
  };
  aggregate.parser = [](std::string_view r) -> std::optional<Value> {
    if (auto code = prompts::parse_partial_passcode(r)) return Value{std::move(*code)};
    return std::nullopt;
  };
  aggregate.default_value = Text("??????");
  return build_parallel_decomposition(plan.k, split_text(plan), subtask, std::move(aggregate));
}

namespace {

SolveResult run(const ComputationGraph& graph, DecompositionPlan plan, Value input,
                const LlmBackend& backend, const SolveOptions& options) {
  const Value inputs[] = {std::move(input)};
  auto exec = execute(graph, inputs, backend, options.seed, ExecuteOptions{options.workers});
  SolveResult r;
  r.answer = std::move(exec.outputs.front());
  r.subtask_outputs = exec.trace.stage_values(graph, "subtask");
  r.trace = std::move(exec.trace);
  r.plan = std::move(plan);
  return r;
}

}  // namespace

SolveResult solve_counting(const CountingInstance& instance, std::size_t m,
                           const LlmBackend& backend, const SolveOptions& options) {
  auto plan = plan_decomposition(instance.text.size(), m, DecompositionKind::disjoint);
  const auto graph = counting_graph(plan);
  return run(graph, std::move(plan), instance.text, backend, options);
}

SolveResult solve_sorting(const SortingInstance& instance, std::size_t m,
                          const LlmBackend& backend, const SolveOptions& options) {
  auto plan = plan_decomposition(instance.values.size(), m, DecompositionKind::disjoint);
  const auto graph = sorting_graph(plan, options.merge);
  return run(graph, std::move(plan), instance.values, backend, options);
}

SolveResult solve_retrieval(const HaystackInstance& instance, std::size_t m,
                            const LlmBackend& backend, const SolveOptions& options) {
  auto plan = plan_decomposition(instance.text.size(), m, DecompositionKind::overlapping_half);
  const auto graph = retrieval_graph(plan, prompts::retrieval_question(instance.target_object));
  return run(graph, std::move(plan), instance.text, backend, options);
}

SolveResult solve_rag(const RagInstance& instance, std::size_t m, const LlmBackend& backend,
                      const SolveOptions& options) {
  auto plan = plan_decomposition(instance.text.size(), m, DecompositionKind::overlapping_half);
  const auto graph = rag_graph(plan, prompts::rag_question(instance.target_object));
  return run(graph, std::move(plan), instance.text, backend, options);
}

SolveResult solve(const Instance& instance, std::size_t m, const LlmBackend& backend,
                  const SolveOptions& options) {
  struct Visitor {
    std::size_t m;
    const LlmBackend& backend;
    const SolveOptions& options;
    SolveResult operator()(const CountingInstance& i) const { return solve_counting(i, m, backend, options); }
    SolveResult operator()(const SortingInstance& i) const { return solve_sorting(i, m, backend, options); }
    SolveResult operator()(const HaystackInstance& i) const { return solve_retrieval(i, m, backend, options); }
    SolveResult operator()(const RagInstance& i) const { return solve_rag(i, m, backend, options); }
  };
  return std::visit(Visitor{m, backend, options}, instance);
}

}  // namespace algograph::tasks
