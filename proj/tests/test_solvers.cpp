#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "algograph/metrics.hpp"
#include "algograph/mock_backend.hpp"
#include "algograph/prompts.hpp"
#include "algograph/tasks.hpp"

using namespace algograph;
using namespace algograph::tasks;

namespace {

const MockBackend kExact(exact_profile());

SolveOptions seeded(std::uint64_t seed) {
  SolveOptions o;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_CASE("counting") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = generate_counting(200, seed);
    for (std::size_t m : {10, 33, 50, 200, 250}) {
      const auto r = solve_counting(inst, m, kExact, seeded(seed));
      CHECK(std::get<std::int64_t>(r.answer) == inst.truth);
    }
  }
  const auto inst = generate_counting(200, 1);
  CHECK(solve_counting(inst, 200, kExact, {}).trace.exchanges.size() == 1);
  CHECK(solve_counting(inst, 50, kExact, {}).trace.exchanges.size() == 4);
}

TEST_CASE("counting prefill grows like n (L_sys / m + 1)") {
  const auto inst = generate_counting(2000, 3);
  // L_sys here is the fixed per-call overhead of the prompt template.
  const auto single = solve_counting(inst, 2000, kExact, {});
  const double overhead =
      static_cast<double>(single.trace.prompt_tokens_total()) - 2000.0 / 4.0;
  for (std::size_t m : {20, 50, 100, 200, 500, 1000}) {
    const auto r = solve_counting(inst, m, kExact, {});
    const double k = static_cast<double>(r.plan.k);
    const double predicted = k * overhead + 2000.0 / 4.0;
    CHECK(static_cast<double>(r.trace.prompt_tokens_total()) == doctest::Approx(predicted).epsilon(0.03));
  }
}

TEST_CASE("counting error never exceeds the sum of sub-task errors") {
  const MockBackend noisy(default_profile());
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = generate_counting(500, seed);
    const auto r = solve_counting(inst, 37, noisy, seeded(seed));
    double bound = 0;
    for (std::size_t i = 0; i < r.plan.k; ++i) {
      const auto seg = r.plan.segments[i];
      const auto piece = inst.text.substr(seg.begin, seg.length);
      const auto truth = std::count_if(piece.begin(), piece.end(), [](unsigned char c) { return std::isdigit(c); });
      bound += std::fabs(static_cast<double>(std::get<std::int64_t>(r.subtask_outputs[i]) - truth));
    }
    CHECK(std::fabs(static_cast<double>(std::get<std::int64_t>(r.answer) - inst.truth)) <= bound);
  }
}

TEST_CASE("sorting") {
  for (auto mode : {MergeMode::incremental, MergeMode::hierarchical}) {
    SolveOptions o;
    o.merge = mode;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto inst = generate_sorting(100, seed);
      for (std::size_t m : {7, 10, 25, 100}) {
        const auto r = solve_sorting(inst, m, kExact, o);
        CHECK(std::get<RealList>(r.answer) == inst.truth);
      }
    }
  }
  SUBCASE("k = 1 returns the single sub-task output") {
    const MockBackend noisy(default_profile());
    const auto inst = generate_sorting(60, 8);
    const auto r = solve_sorting(inst, 60, noisy, seeded(4));
    REQUIRE(r.subtask_outputs.size() == 1);
    CHECK(r.answer == r.subtask_outputs[0]);
  }
}

TEST_CASE("sorting with monotone bounded perturbations keeps the l-inf bound") {
  MockProfile p;
  p.sort_perturb_rate = Curve::constant(1.0);
  p.sort_perturb_scale = Curve::constant(0.03);
  p.sort_monotone_perturb = true;
  const MockBackend backend(p);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto inst = generate_sorting(120, seed);
    const auto r = solve_sorting(inst, 30, backend, seeded(seed));
    double worst = 0;
    for (std::size_t i = 0; i < r.plan.k; ++i) {
      const auto seg = r.plan.segments[i];
      std::vector<double> truth(inst.values.begin() + seg.begin, inst.values.begin() + seg.begin + seg.length);
      std::sort(truth.begin(), truth.end());
      worst = std::max(worst, metrics::sorting_errors(std::get<RealList>(r.subtask_outputs[i]), truth).fuzzy_linf);
    }
    CHECK(metrics::sorting_errors(std::get<RealList>(r.answer), inst.truth).fuzzy_linf <= worst + 1e-12);
  }
}

TEST_CASE("majority vote") {
  const std::vector<Value> votes{AnswerRecord::passcode("222222"), AnswerRecord::passcode("111111"),
                                 AnswerRecord::unknown(), AnswerRecord::passcode("222222"),
                                 AnswerRecord::passcode("111111")};
  const auto tie = majority_vote(votes);
  CHECK(tie == AnswerRecord::tie({"111111", "222222"}));
  CHECK(metrics::retrieval_error(tie, "111111") == 0.5);

  const std::vector<Value> abstain{AnswerRecord::unknown(), AnswerRecord::unknown()};
  CHECK(majority_vote(abstain).is_unknown());
  CHECK(metrics::retrieval_error(majority_vote(abstain), "123456") == 1);

  const std::vector<Value> lone{AnswerRecord::unknown(), AnswerRecord::passcode("333333")};
  CHECK(majority_vote(lone) == AnswerRecord::passcode("333333"));
}

TEST_CASE("retrieval") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = generate_haystack(4000, seed);
    for (std::size_t m : {100, 400, 1000, 4000, 5000}) {
      const auto r = solve_retrieval(inst, m, kExact, seeded(seed));
      CHECK(metrics::retrieval_error(std::get<AnswerRecord>(r.answer), inst.truth) == 0);
    }
    const auto none = generate_haystack(4000, seed, {false});
    const auto r = solve_retrieval(none, 400, kExact, seeded(seed));
    CHECK(std::get<AnswerRecord>(r.answer).is_unknown());
  }
}

TEST_CASE("rag") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = generate_rag(4000, seed);
    for (std::size_t m : {200, 600, 4000}) {
      const auto r = solve_rag(inst, m, kExact, seeded(seed));
      CHECK(std::get<Text>(r.answer) == inst.truth);
      // aggregation call is recorded
      CHECK(r.trace.exchanges.size() == r.plan.k + 1);
      CHECK(r.trace.exchanges.back().stage == "aggregate");
    }
  }

  MockProfile blind;
  blind.rag_p1 = Curve::constant(1.0);
  const MockBackend backend(blind);
  std::uint64_t aggregation_tokens = 0;
  for (std::size_t n : {1000, 4000, 16000}) {
    const auto inst = generate_rag(n, 1);
    const auto r = solve_rag(inst, 500, backend, {});
    CHECK(std::get<Text>(r.answer) == "??????");
    CHECK(metrics::rag_errors("??????", inst.truth).digit_fraction_wrong == 1);
    const auto& agg = r.trace.exchanges.back();
    CHECK(prompts::read_fields(agg.prompt_text).sentences.empty());
    if (aggregation_tokens == 0) aggregation_tokens = agg.prompt_tokens;
    // only the question varies in length
    CHECK(agg.prompt_tokens <= aggregation_tokens + 3);
  }
}
