#include "algograph/cost_model.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "algograph/errors.hpp"

namespace algograph {

std::string_view to_string(CostKind kind) {
  switch (kind) {
    case CostKind::linear_api: return "linear-api";
    case CostKind::memory_bound_latency: return "memory-bound-latency";
    case CostKind::compute_bound_linear: return "compute-bound-linear";
    case CostKind::quadratic_flops: return "quadratic-flops";
  }
  return "?";
}

CostKind parse_cost_kind(std::string_view name) {
  for (CostKind k : {CostKind::linear_api, CostKind::memory_bound_latency,
                     CostKind::compute_bound_linear, CostKind::quadratic_flops}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError(fmt::format("unknown cost kind '{}'", name));
}

double CostFunctions::prefill(double prompt_len) const {
  switch (kind) {
    case CostKind::memory_bound_latency: return c_pre;
    case CostKind::quadratic_flops: return c_pre * prompt_len * prompt_len;
    case CostKind::linear_api:
    case CostKind::compute_bound_linear: break;
  }
  return c_pre * prompt_len;
}

double CostFunctions::decode(double prompt_len, double decode_len) const {
  if (kind == CostKind::quadratic_flops) return c_dec * decode_len * prompt_len * prompt_len;
  return c_dec * decode_len;
}

Parallelism Parallelism::of(std::size_t p) {
  if (p == 0) throw ConfigError("parallelism degree must be >= 1");
  Parallelism out;
  out.degree_ = p;
  return out;
}

std::string Parallelism::label() const {
  return degree_ ? fmt::format("{}", *degree_) : std::string("inf");
}

double cost_single_call(double prompt_len, double decode_len, const CostFunctions& f) {
  return f.prefill(prompt_len) + f.decode(prompt_len, decode_len);
}

double latency_parallel(std::span<const double> latencies, Parallelism p) {
  if (latencies.empty()) return 0.0;
  if (p.is_unbounded()) return *std::max_element(latencies.begin(), latencies.end());
  const std::size_t width = p.degree();
  double total = 0.0;
  for (std::size_t start = 0; start < latencies.size(); start += width) {
    const auto first = latencies.begin() + static_cast<std::ptrdiff_t>(start);
    const auto last = latencies.begin() +
                      static_cast<std::ptrdiff_t>(std::min(latencies.size(), start + width));
    total += *std::max_element(first, last);
  }
  return total;
}

std::size_t subtask_count(std::size_t n, std::size_t m, DecompositionKind kind) {
  if (m == 0) throw ConfigError("sub-task size m must be >= 1");
  if (n == 0) return 0;
  if (m >= n) return 1;
  if (kind == DecompositionKind::disjoint) return (n + m - 1) / m;
  // ceil((2n - m) / m) == floor((2n - 1) / m)
  return (2 * n - 1) / m;
}

namespace {

std::size_t waves(std::size_t k, Parallelism p) {
  if (p.is_unbounded()) return k == 0 ? 0 : 1;
  return (k + p.degree() - 1) / p.degree();
}

double per_call_bound(std::size_t m, const DecodeLength& decode_len, const CostModel& model) {
  const double prompt = static_cast<double>(model.system_prompt_tokens) + static_cast<double>(m);
  return cost_single_call(prompt, decode_len(m), model.functions);
}

void check_size(std::size_t m, const CostModel& model) {
  if (m == 0) throw ConfigError("sub-task size m must be >= 1");
  if (m > model.max_subtask_size) {
    throw ConfigError(fmt::format("sub-task size {} exceeds m_bar = {}", m,
                                  model.max_subtask_size));
  }
}

}  // namespace

double subtask_cost_bound(std::size_t n, std::size_t m, const DecodeLength& decode_len,
                          const CostModel& model, Aggregation aggregation,
                          DecompositionKind rule) {
  check_size(m, model);
  const std::size_t size = std::min(m, n);
  const std::size_t k = subtask_count(n, m, rule);
  const double call = per_call_bound(size, decode_len, model);
  const std::size_t factor = aggregation == Aggregation::sum ? k : waves(k, model.parallelism);
  return static_cast<double>(factor) * call;
}

double per_size_cost_bound(std::size_t m, const DecodeLength& decode_len, const CostModel& model) {
  check_size(m, model);
  return per_call_bound(m, decode_len, model) / static_cast<double>(m);
}

OptimalM predict_optimal_m(std::size_t n, const CostModel& model, DecompositionKind rule,
                           const DecodeLength& decode_len, Objective objective,
                           std::span<const std::size_t> grid) {
  if (grid.empty()) throw ConfigError("optimal-m prediction needs a non-empty grid");
  const Aggregation agg = objective == Objective::sum_cost ? Aggregation::sum : Aggregation::parallel;
  std::optional<OptimalM> best;
  for (std::size_t m : grid) {
    const double v = subtask_cost_bound(n, m, decode_len, model, agg, rule);
    if (!best || v < best->predicted || (v == best->predicted && m > best->m)) {
      best = OptimalM{m, v};
    }
  }
  return *best;
}

double trace_latency(const ExecutionTrace& trace, Parallelism p) {
  std::vector<std::string> order;
  std::vector<std::vector<double>> per_stage;
  for (const auto& ex : trace.exchanges) {
    auto it = std::find(order.begin(), order.end(), ex.stage);
    if (it == order.end()) {
      order.push_back(ex.stage);
      per_stage.emplace_back();
      it = order.end() - 1;
    }
    per_stage[static_cast<std::size_t>(it - order.begin())].push_back(ex.latency_ms);
  }
  double total = 0.0;
  for (const auto& stage : per_stage) total += latency_parallel(stage, p);
  return total;
}

CostReport trace_costs(const ExecutionTrace& trace, const CostModel& model) {
  CostReport r;
  r.prefill_tokens_total = trace.prompt_tokens_total();
  r.decode_tokens_total = trace.completion_tokens_total();
  r.call_count = trace.exchanges.size();
  r.latency_sequential = trace_latency(trace, Parallelism::of(1));
  r.latency_parallel_p = trace_latency(trace, model.parallelism);
  r.latency_parallel_inf = trace_latency(trace, Parallelism::unbounded());
  return r;
}

}  // namespace algograph
