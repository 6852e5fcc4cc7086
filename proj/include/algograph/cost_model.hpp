#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "algograph/graph.hpp"

namespace algograph {

enum class CostKind { linear_api, memory_bound_latency, compute_bound_linear, quadratic_flops };

std::string_view to_string(CostKind kind);
CostKind parse_cost_kind(std::string_view name);  // throws ConfigError

/// Prefill and decode cost of one LLM call as functions of token lengths.
///
///   linear-api            pre = c_pre * L_pre          dec = c_dec * L_dec
///   memory-bound-latency  pre = c_pre                  dec = c_dec * L_dec
///   compute-bound-linear  pre = c_pre * L_pre          dec = c_dec * L_dec
///   quadratic-flops       pre = c_pre * L_pre^2        dec = c_dec * L_dec * L_pre^2
struct CostFunctions {
  CostKind kind = CostKind::linear_api;
  double c_pre = 1.0;
  double c_dec = 1.0;

  double prefill(double prompt_len) const;
  double decode(double prompt_len, double decode_len) const;
};

/// Degree of parallelism: a positive count, or unbounded.
class Parallelism {
 public:
  static Parallelism of(std::size_t p);  // throws ConfigError for p = 0
  static Parallelism unbounded() { return Parallelism{}; }

  bool is_unbounded() const { return !degree_; }
  std::size_t degree() const { return *degree_; }  // precondition: bounded
  std::string label() const;  // "1", "4", "inf"

  friend bool operator==(const Parallelism&, const Parallelism&) = default;

 private:
  Parallelism() = default;
  std::optional<std::size_t> degree_;
};

struct CostModel {
  CostFunctions functions;
  std::uint64_t system_prompt_tokens = 0;  // L_sys
  Parallelism parallelism = Parallelism::of(1);
  std::uint64_t max_subtask_size = 1'000'000;  // m_bar
};

/// cost_pre(L_pre) + cost_dec(L_pre, L_dec).
double cost_single_call(double prompt_len, double decode_len, const CostFunctions& f);

/// End-to-end latency of independent calls under ideal parallelism: calls are
/// grouped consecutively into ceil(k/p) waves, each costing its slowest call.
double latency_parallel(std::span<const double> latencies, Parallelism p);

enum class DecompositionKind { disjoint, overlapping_half };

/// Number of sub-tasks: ceil(n/m) for disjoint, ceil(2n/m - 1) for half-overlap
/// chunks; 1 whenever m >= n. Exact integer arithmetic.
std::size_t subtask_count(std::size_t n, std::size_t m, DecompositionKind kind);

enum class Aggregation { sum, parallel };

using DecodeLength = std::function<double(std::size_t m)>;

/// Bound on the cost of all sub-task calls:
///   sum:      k * (cost_pre(L_sys + m) + cost_dec(L_sys + m, L_dec(m)))
///   parallel: ceil(k/p) * (same per-call bound)
/// Throws ConfigError when m is zero or exceeds m_bar.
double subtask_cost_bound(std::size_t n, std::size_t m, const DecodeLength& decode_len,
                          const CostModel& model, Aggregation aggregation,
                          DecompositionKind rule = DecompositionKind::disjoint);

/// Per-unit-size form of the sum bound with k = n/m taken exactly:
/// (cost_pre(L_sys + m) + cost_dec(L_sys + m, L_dec(m))) / m.
double per_size_cost_bound(std::size_t m, const DecodeLength& decode_len, const CostModel& model);

struct OptimalM {
  std::size_t m = 0;
  double predicted = 0.0;
};

enum class Objective { sum_cost, parallel_latency };

/// Grid argmin of the sub-task bound; ties go to the larger m.
/// Throws ConfigError on an empty grid.
OptimalM predict_optimal_m(std::size_t n, const CostModel& model, DecompositionKind rule,
                           const DecodeLength& decode_len, Objective objective,
                           std::span<const std::size_t> grid);

struct CostReport {
  std::uint64_t prefill_tokens_total = 0;
  std::uint64_t decode_tokens_total = 0;
  std::uint64_t call_count = 0;
  double latency_sequential = 0.0;
  double latency_parallel_p = 0.0;
  double latency_parallel_inf = 0.0;
};

/// Latency of a trace when stages run one after another and calls within a
/// stage are grouped under `p`. Stages are ordered by their first exchange.
double trace_latency(const ExecutionTrace& trace, Parallelism p);

CostReport trace_costs(const ExecutionTrace& trace, const CostModel& model);

}  // namespace algograph
