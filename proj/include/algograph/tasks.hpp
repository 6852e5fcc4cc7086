#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "algograph/cost_model.hpp"
#include "algograph/graph.hpp"
#include "algograph/value.hpp"

namespace algograph::tasks {

enum class TaskKind { counting, sorting, retrieval, rag };

std::string_view to_string(TaskKind task);
TaskKind parse_task(std::string_view name);  // throws ConfigError

// ---------------------------------------------------------------- instances

struct Span {
  std::size_t begin = 0;
  std::size_t length = 0;
  friend bool operator==(const Span&, const Span&) = default;
};

struct CountingInstance {
  std::string text;
  std::int64_t truth = 0;
  std::uint64_t seed = 0;
};

struct SortingInstance {
  std::vector<double> values;
  std::vector<double> truth;
  std::uint64_t seed = 0;
};

struct HaystackInstance {
  std::string text;
  std::string target_object;
  std::string truth;  // passcode, or "I don't know" when the needle is absent
  bool needle_present = true;
  Span needle_span;
  std::uint64_t seed = 0;
};

struct RagInstance {
  std::string text;
  std::string target_object;
  std::string truth;
  std::vector<Span> needle_spans;  // digit 1..6
  std::uint64_t seed = 0;
};

using Instance = std::variant<CountingInstance, SortingInstance, HaystackInstance, RagInstance>;

struct GenerateOptions {
  bool needle_present = true;
};

CountingInstance generate_counting(std::size_t n, std::uint64_t seed);
SortingInstance generate_sorting(std::size_t n, std::uint64_t seed);
HaystackInstance generate_haystack(std::size_t n, std::uint64_t seed, GenerateOptions options = {});
RagInstance generate_rag(std::size_t n, std::uint64_t seed);

/// Deterministic in (task, n, seed, options). Throws ConfigError when n is
/// below the task's minimum size.
Instance generate_instance(TaskKind task, std::size_t n, std::uint64_t seed,
                           GenerateOptions options = {});

/// Problem size n of an instance (characters or list length).
std::size_t instance_size(const Instance& instance);

/// Line-oriented dump: "key: value" header lines, a "---" separator, then the payload.
void write_instance(std::ostream& out, const Instance& instance);
/// Inverse of write_instance. Throws ConfigError on malformed input.
Instance read_instance(std::istream& in);

// ---------------------------------------------------------- decomposition

struct DecompositionPlan {
  DecompositionKind kind = DecompositionKind::disjoint;
  std::size_t n = 0;
  std::size_t m = 0;  // effective size (clamped to n, rounded down to even)
  std::size_t k = 0;
  std::vector<Span> segments;
  bool clamped = false;  // requested m exceeded n
  bool rounded = false;  // odd m rounded down for half-overlap chunks
};

/// disjoint: consecutive segments of length m (last one shorter).
/// overlapping_half: chunks of length m starting at multiples of m/2, last in
/// [m/2, m]. m > n yields one segment [0, n). Throws ConfigError on m = 0 or
/// an overlapping m below 2.
DecompositionPlan plan_decomposition(std::size_t n, std::size_t m, DecompositionKind kind);

// ------------------------------------------------------------------ merging

/// Two-pointer merge; on ties takes from `a`. Works on unsorted input too.
std::vector<double> merge_two_sorted_lists(std::span<const double> a, std::span<const double> b);

enum class MergeMode { incremental, hierarchical };

std::string_view to_string(MergeMode mode);
MergeMode parse_merge_mode(std::string_view name);

/// incremental: repeatedly pop the last two lists, merge (last, second to
/// last), push the result back. hierarchical: rounds of popping the front
/// two, merging, appending to the back. Throws std::invalid_argument on
/// an empty family.
std::vector<double> merge_many(std::vector<std::vector<double>> lists, MergeMode mode);

/// Adjacent-swap insertion sort. `on_swap`, when given, is called after
/// every swap with the current state.
std::vector<double> insertion_sort(std::vector<double> z,
                                   const std::function<void(std::span<const double>)>& on_swap = {});

// ------------------------------------------------------------------ solving

struct SolveOptions {
  std::uint64_t seed = 0;
  MergeMode merge = MergeMode::hierarchical;
  std::size_t workers = 1;
};

struct SolveResult {
  Value answer;
  ExecutionTrace trace;
  DecompositionPlan plan;
  /// Parsed output of each sub-task, in segment order.
  std::vector<Value> subtask_outputs;
};

SolveResult solve_counting(const CountingInstance& instance, std::size_t m,
                           const LlmBackend& backend, const SolveOptions& options);
SolveResult solve_sorting(const SortingInstance& instance, std::size_t m,
                          const LlmBackend& backend, const SolveOptions& options);
SolveResult solve_retrieval(const HaystackInstance& instance, std::size_t m,
                            const LlmBackend& backend, const SolveOptions& options);
SolveResult solve_rag(const RagInstance& instance, std::size_t m, const LlmBackend& backend,
                      const SolveOptions& options);

SolveResult solve(const Instance& instance, std::size_t m, const LlmBackend& backend,
                  const SolveOptions& options);

/// Majority vote over passcodes; abstentions ignored. A tie of h codes
/// returns them sorted; no votes returns "I don't know".
AnswerRecord majority_vote(std::span<const Value> votes);

/// Graph builders used by the solvers (exposed for inspection in tests).
ComputationGraph counting_graph(const DecompositionPlan& plan);
ComputationGraph sorting_graph(const DecompositionPlan& plan, MergeMode merge);
ComputationGraph retrieval_graph(const DecompositionPlan& plan, std::string question);
ComputationGraph rag_graph(const DecompositionPlan& plan, std::string question);

}  // namespace algograph::tasks
