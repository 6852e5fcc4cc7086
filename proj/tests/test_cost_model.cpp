#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "algograph/cost_model.hpp"
#include "algograph/errors.hpp"
#include "algograph/seed.hpp"

using namespace algograph;

namespace {

CostModel model_of(CostKind kind, double c_pre, double c_dec, std::uint64_t l_sys, std::size_t p) {
  CostModel m;
  m.functions = {kind, c_pre, c_dec};
  m.system_prompt_tokens = l_sys;
  m.parallelism = Parallelism::of(p);
  return m;
}

const DecodeLength kUnitDecode = [](std::size_t) { return 1.0; };

ChatExchange exchange(double latency, std::string stage, std::uint64_t pre = 0, std::uint64_t dec = 0) {
  ChatExchange e;
  e.latency_ms = latency;
  e.stage = std::move(stage);
  e.prompt_tokens = pre;
  e.completion_tokens = dec;
  return e;
}

}  // namespace

TEST_CASE("cost_single_call") {
  CHECK(cost_single_call(1000, 200, {CostKind::linear_api, 0.01, 0.03}) == doctest::Approx(16.0));
  CHECK(cost_single_call(0, 0, {CostKind::linear_api, 0.5, 0.5}) == 0.0);
  CHECK(cost_single_call(0, 0, {CostKind::quadratic_flops, 1, 1}) == 0.0);
  CHECK(cost_single_call(10, 0, {CostKind::quadratic_flops, 1, 1}) == 100.0);
  // decode term: c_dec * L_dec * L_pre^2
  CHECK(cost_single_call(10, 3, {CostKind::quadratic_flops, 1, 2}) == 100.0 + 2 * 3 * 100.0);
  // prefill is a constant for memory-bound inference
  CHECK(cost_single_call(5000, 4, {CostKind::memory_bound_latency, 2, 1}) == 6.0);
  CHECK(cost_single_call(7, 4, {CostKind::compute_bound_linear, 1, 0}) == 7.0);
}

TEST_CASE("cost kinds round trip through their names") {
  for (auto k : {CostKind::linear_api, CostKind::memory_bound_latency, CostKind::compute_bound_linear,
                 CostKind::quadratic_flops})
    CHECK(parse_cost_kind(to_string(k)) == k);
  CHECK(to_string(CostKind::linear_api) == "linear-api");
  CHECK_THROWS_AS(parse_cost_kind("cubic"), ConfigError);
}

TEST_CASE("Parallelism") {
  CHECK(Parallelism::of(4).label() == "4");
  CHECK(Parallelism::unbounded().label() == "inf");
  CHECK(Parallelism::unbounded().is_unbounded());
  CHECK_THROWS_AS(Parallelism::of(0), ConfigError);
}

TEST_CASE("latency_parallel") {
  const std::vector<double> x{5, 7, 3};
  CHECK(latency_parallel(x, Parallelism::unbounded()) == 7);
  CHECK(latency_parallel(x, Parallelism::of(1)) == 15);
  const std::vector<double> y{4, 9, 2, 6, 5};
  CHECK(latency_parallel(y, Parallelism::of(2)) == 20);
  CHECK(latency_parallel(std::vector<double>{}, Parallelism::of(3)) == 0);
}

TEST_CASE("latency_parallel never grows when p is multiplied") {
  // Consecutive grouping is not monotone in p in general: [1, 1, 10, 10]
  // costs 11 at p = 2 and 20 at p = 3. Along multiples it is.
  const std::vector<double> counter{1, 1, 10, 10};
  CHECK(latency_parallel(counter, Parallelism::of(2)) == 11);
  CHECK(latency_parallel(counter, Parallelism::of(3)) == 20);

  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> x(1 + uniform_index(rng, 40));
    for (auto& v : x) v = uniform01(rng) * 100;
    for (std::size_t p = 1; p <= x.size(); ++p) {
      const double base = latency_parallel(x, Parallelism::of(p));
      for (std::size_t q = 2 * p; q <= 2 * x.size(); q += p)
        CHECK(latency_parallel(x, Parallelism::of(q)) <= base + 1e-9);
      CHECK(latency_parallel(x, Parallelism::unbounded()) <= base);
    }
  }
}

TEST_CASE("subtask_count") {
  CHECK(subtask_count(200, 10, DecompositionKind::disjoint) == 20);
  CHECK(subtask_count(200, 67, DecompositionKind::disjoint) == 3);
  CHECK(subtask_count(200, 300, DecompositionKind::disjoint) == 1);
  // ceil(2n/m - 1)
  CHECK(subtask_count(200, 80, DecompositionKind::overlapping_half) == 4);
  CHECK(subtask_count(200, 60, DecompositionKind::overlapping_half) == 6);
  CHECK(subtask_count(10000, 4000, DecompositionKind::overlapping_half) == 4);
  CHECK(subtask_count(100, 100, DecompositionKind::overlapping_half) == 1);
}

TEST_CASE("subtask_cost_bound") {
  const auto lin = model_of(CostKind::linear_api, 1, 1, 50, 4);
  const DecodeLength dec = [](std::size_t m) { return 0.5 * static_cast<double>(m); };

  SUBCASE("a single call") {
    CHECK(subtask_cost_bound(200, 200, dec, lin, Aggregation::sum) ==
          cost_single_call(250, 100, lin.functions));
    CHECK(subtask_cost_bound(200, 200, dec, lin, Aggregation::parallel) ==
          cost_single_call(250, 100, lin.functions));
  }
  SUBCASE("compute-bound latency on the counting grid") {
    const auto m = model_of(CostKind::compute_bound_linear, 1, 0, 0, 4);
    CHECK(subtask_cost_bound(200, 10, kUnitDecode, m, Aggregation::parallel) == 50);
  }
  SUBCASE("m above m_bar") {
    auto capped = lin;
    capped.max_subtask_size = 100;
    CHECK_THROWS_AS(subtask_cost_bound(200, 101, dec, capped, Aggregation::sum), ConfigError);
    CHECK_THROWS_AS(subtask_cost_bound(200, 0, dec, capped, Aggregation::sum), ConfigError);
  }
  SUBCASE("linear-api sum bound is nonincreasing in m on divisors") {
    const auto api = model_of(CostKind::linear_api, 1, 3, 100, 4);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t m : {1, 2, 4, 5, 8, 10, 20, 25, 40, 50, 100, 200}) {
      const double c = subtask_cost_bound(200, m, kUnitDecode, api, Aggregation::sum);
      CHECK(c <= prev);
      prev = c;
    }
  }
}

TEST_CASE("quadratic per-n bound") {
  const auto q = model_of(CostKind::quadratic_flops, 1, 0, 100, 4);
  const DecodeLength none = [](std::size_t) { return 0.0; };
  CHECK(per_size_cost_bound(100, none, q) == 400.0);
  for (std::size_t m = 1; m <= 1000; ++m) {
    const double md = static_cast<double>(m);
    CHECK(per_size_cost_bound(m, none, q) == doctest::Approx(100.0 * 100.0 / md + md + 200.0));
    if (m != 100) CHECK(per_size_cost_bound(m, none, q) > 400.0);
  }
}

TEST_CASE("predict_optimal_m") {
  SUBCASE("quadratic cost, intermediate m") {
    const auto q = model_of(CostKind::quadratic_flops, 1, 0, 100, 4);
    const std::vector<std::size_t> grid{25, 50, 100, 200, 400};
    const auto best = predict_optimal_m(400, q, DecompositionKind::disjoint, kUnitDecode,
                                        Objective::sum_cost, grid);
    CHECK(best.m == 100);
  }
  SUBCASE("latency optimum on the counting grid") {
    const auto m = model_of(CostKind::compute_bound_linear, 1, 0, 0, 4);
    const std::vector<std::size_t> grid{10, 20, 40, 50, 67, 100, 200};
    const auto best = predict_optimal_m(200, m, DecompositionKind::disjoint, kUnitDecode,
                                        Objective::parallel_latency, grid);
    CHECK(best.m == 50);
    CHECK(best.predicted == 50);
  }
  SUBCASE("overlapping retrieval optimum") {
    const auto m = model_of(CostKind::compute_bound_linear, 1, 0, 0, 4);
    const std::vector<std::size_t> grid{500, 1000, 2000, 3000, 4000, 5000, 8000, 10000};
    const auto best = predict_optimal_m(10000, m, DecompositionKind::overlapping_half, kUnitDecode,
                                        Objective::parallel_latency, grid);
    CHECK(best.m == 4000);
  }
  SUBCASE("ties go to the larger m") {
    const auto m = model_of(CostKind::memory_bound_latency, 1, 0, 0, 4);
    const std::vector<std::size_t> grid{50, 100, 200};
    // every m with k <= 4 is one wave of constant cost
    const auto best = predict_optimal_m(200, m, DecompositionKind::disjoint, kUnitDecode,
                                        Objective::parallel_latency, grid);
    CHECK(best.m == 200);
  }
  SUBCASE("empty grid") {
    const auto m = model_of(CostKind::linear_api, 1, 1, 0, 4);
    CHECK_THROWS_AS(predict_optimal_m(10, m, DecompositionKind::disjoint, kUnitDecode,
                                      Objective::sum_cost, std::vector<std::size_t>{}),
                    ConfigError);
  }
}

TEST_CASE("trace costs") {
  const auto model = model_of(CostKind::linear_api, 1, 1, 0, 4);

  SUBCASE("empty trace") {
    const auto r = trace_costs(ExecutionTrace{}, model);
    CHECK(r.prefill_tokens_total == 0);
    CHECK(r.decode_tokens_total == 0);
    CHECK(r.call_count == 0);
    CHECK(r.latency_sequential == 0);
    CHECK(r.latency_parallel_p == 0);
    CHECK(r.latency_parallel_inf == 0);
  }
  SUBCASE("two exchanges") {
    ExecutionTrace t;
    t.exchanges = {exchange(1, "subtask", 100, 10), exchange(2, "subtask", 100, 10)};
    const auto r = trace_costs(t, model);
    CHECK(r.prefill_tokens_total == 200);
    CHECK(r.decode_tokens_total == 20);
    CHECK(r.call_count == 2);
  }
  SUBCASE("eight equal sub-task calls at p = 4") {
    ExecutionTrace t;
    for (int i = 0; i < 8; ++i) t.exchanges.push_back(exchange(10, "subtask"));
    const auto r = trace_costs(t, model);
    CHECK(r.latency_parallel_p == 20);
    CHECK(r.latency_sequential == 80);
    CHECK(r.latency_parallel_inf == 10);
  }
  SUBCASE("stages run one after another") {
    ExecutionTrace t;
    t.exchanges = {exchange(3, "subtask"), exchange(8, "subtask"), exchange(5, "subtask"),
                   exchange(4, "aggregate")};
    CHECK(trace_latency(t, Parallelism::unbounded()) == 12);
    CHECK(trace_latency(t, Parallelism::of(2)) == 8 + 5 + 4);
    CHECK(trace_latency(t, Parallelism::of(1)) == 20);
  }
}
