#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "algograph/errors.hpp"
#include "algograph/haystack.hpp"
#include "algograph/mock_backend.hpp"
#include "algograph/prompts.hpp"
#include "algograph/seed.hpp"

using namespace algograph;

namespace {

double binom_pmf(std::size_t n, std::size_t j, double p) {
  if (p <= 0.0) return j == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return j == n ? 1.0 : 0.0;
  const double nd = static_cast<double>(n), jd = static_cast<double>(j);
  return std::exp(std::lgamma(nd + 1) - std::lgamma(jd + 1) - std::lgamma(nd - jd + 1) +
                  jd * std::log(p) + (nd - jd) * std::log1p(-p));
}

// E|F - M| by direct double summation.
double oracle_abs_error(std::size_t digits, std::size_t others, double miss, double false_rate) {
  double total = 0.0;
  for (std::size_t a = 0; a <= digits; ++a) {
    const double pa = binom_pmf(digits, a, miss);
    if (pa < 1e-300) continue;
    for (std::size_t b = 0; b <= others; ++b) {
      const double d = std::fabs(static_cast<double>(b) - static_cast<double>(a));
      total += pa * binom_pmf(others, b, false_rate) * d;
    }
  }
  return total;
}

std::string filler(std::size_t sentences) {
  std::string out;
  for (std::size_t i = 0; i < sentences; ++i) out += "The weather was mild that day. ";
  return out;
}

}  // namespace

TEST_CASE("estimate_tokens") {
  CHECK(estimate_tokens("") == 0);
  CHECK(estimate_tokens("abcdefgh") == 2);
  CHECK(estimate_tokens("abcdefghi") == 3);
  CHECK(estimate_tokens("abc") + 0 >= 1);
  CHECK(estimate_tokens("abcdefg" "xyz") >= std::max(estimate_tokens("abcdefg"), estimate_tokens("xyz")));
}

TEST_CASE("curves") {
  CHECK(Curve::constant(0.3)(1000) == 0.3);
  CHECK(Curve::logistic(1, 100, 10)(100) == doctest::Approx(0.5));
  CHECK(Curve::saturating(0.2, 100)(100) == doctest::Approx(0.2 * (1 - std::exp(-1.0))));
  CHECK(Curve::linear(0.01)(50) == doctest::Approx(0.5));
  CHECK(Curve::linear(0.01).probability(500) == 1.0);
  CHECK(Curve::constant(-1).probability(5) == 0.0);
  const auto p = default_profile();
  double prev = 0.0;
  for (double m = 1; m < 50000; m *= 1.5) {
    CHECK(p.retrieval_p1.probability(m) >= prev);
    prev = p.retrieval_p1.probability(m);
  }
  CHECK(type1_profile().type1());
  CHECK_FALSE(default_profile().type1());
}

TEST_CASE("mock_count") {
  const auto exact = exact_profile();
  CHECK(mock_count("a1b2", 4, 1, exact) == 2);
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    std::string s(1 + uniform_index(rng, 60), 'x');
    std::int64_t truth = 0;
    for (auto& c : s)
      if (bernoulli(rng, 0.5)) {
        c = static_cast<char>('0' + uniform_index(rng, 10));
        ++truth;
      }
    CHECK(mock_count(s, s.size(), rng(), exact) == truth);
  }
}

TEST_CASE("mock_count error matches its binomial expectation") {
  SUBCASE("misses only") {
    MockProfile p;
    p.count_miss_rate = Curve::constant(0.1);
    const std::string digits(1000, '7');
    double sum = 0;
    const int seeds = 10000;
    for (int s = 0; s < seeds; ++s) sum += std::fabs(1000.0 - static_cast<double>(mock_count(digits, 1000, derive_seed(s, {}), p)));
    const double expected = oracle_abs_error(1000, 0, 0.1, 0.0);
    CHECK(expected == doctest::Approx(100.0));
    CHECK(std::fabs(sum / seeds - expected) <= 0.05 * expected);
  }
  SUBCASE("misses and false counts") {
    MockProfile p;
    p.count_miss_rate = Curve::constant(0.1);
    p.count_false_rate = Curve::constant(0.05);
    std::string text;
    for (int i = 0; i < 500; ++i) text += "4z";
    const double expected = oracle_abs_error(500, 500, 0.1, 0.05);
    CHECK(expected_count_abs_error(500, 500, 0.1, 0.05) == doctest::Approx(expected).epsilon(1e-9));
    double sum = 0;
    const int seeds = 10000;
    for (int s = 0; s < seeds; ++s)
      sum += std::fabs(500.0 - static_cast<double>(mock_count(text, text.size(), derive_seed(s, {9}), p)));
    CHECK(std::fabs(sum / seeds - expected) <= 0.05 * expected);
  }
}

TEST_CASE("mock_sort") {
  std::vector<double> values(100);
  Rng rng(4);
  for (auto& v : values) v = uniform01(rng);
  auto sorted = values;
  std::sort(sorted.begin(), sorted.end());

  SUBCASE("zero rates") { CHECK(mock_sort(values, 100, 1, exact_profile()) == sorted); }

  SUBCASE("one expected drop per 100 entries") {
    MockProfile p;
    p.sort_drop_rate = Curve::constant(0.01);
    double mismatch = 0;
    const int seeds = 10000;
    for (int s = 0; s < seeds; ++s)
      mismatch += std::fabs(100.0 - static_cast<double>(mock_sort(values, 100, derive_seed(s, {1}), p).size())) / 100.0;
    CHECK(std::fabs(mismatch / seeds - 0.01) <= 0.05 * 0.01);
  }

  SUBCASE("perturbation keeps pairwise violations within 2 eps") {
    MockProfile p;
    p.sort_perturb_rate = Curve::constant(0.5);
    p.sort_perturb_scale = Curve::constant(0.01);
    for (int s = 0; s < 200; ++s) {
      const auto y = mock_sort(values, 100, derive_seed(s, {2}), p);
      REQUIRE(y.size() == 100);
      for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t j = i + 1; j < y.size(); ++j) CHECK(y[i] - y[j] <= 0.02 + 1e-12);
    }
  }
}

TEST_CASE("mock_retrieve") {
  const std::string q = prompts::retrieval_question("red door");
  const std::string with = filler(3) + haystack::passcode_sentence("red door", "314159") +
                           haystack::passcode_sentence("blue box", "271828") + filler(2);
  const std::string without = filler(3) + haystack::passcode_sentence("blue box", "271828");

  CHECK(mock_retrieve(with, q, with.size(), 1, exact_profile()) == AnswerRecord::passcode("314159"));
  CHECK(mock_retrieve(without, q, without.size(), 1, exact_profile()) == AnswerRecord::unknown());
  CHECK(mock_retrieve(without, q, without.size(), 1, type1_profile()).is_unknown());

  SUBCASE("false positives over k - 1 needle-free chunks") {
    MockProfile p;
    p.retrieval_p2 = Curve::constant(0.2);
    const std::size_t k = 8;
    double total = 0;
    const int seeds = 10000;
    for (int s = 0; s < seeds; ++s)
      for (std::size_t c = 0; c + 1 < k; ++c)
        total += !mock_retrieve(without, q, without.size(), derive_seed(s, {c}), p).is_unknown();
    const double expected = 0.2 * (k - 1);
    CHECK(std::fabs(total / seeds - expected) <= 0.05 * expected);
  }

  SUBCASE("mode-1 failures split between abstaining and wrong codes") {
    MockProfile p;
    p.retrieval_p1 = Curve::constant(1.0);
    int unknown = 0, wrong = 0;
    for (int s = 0; s < 4000; ++s) {
      const auto a = mock_retrieve(with, q, with.size(), derive_seed(s, {}), p);
      if (a.is_unknown()) ++unknown;
      else if (a.candidates[0] != "314159") ++wrong;
    }
    CHECK(unknown + wrong == 4000);
    CHECK(unknown / 4000.0 == doctest::Approx(0.5).epsilon(0.1));
  }
}

TEST_CASE("mock_rag_retrieve and aggregate") {
  const std::string obj = "green gate";
  const std::string q = prompts::rag_question(obj);
  const std::string chunk = filler(2) + haystack::digit_sentence(2, obj, '8') + filler(1) +
                            haystack::digit_sentence(5, obj, '1') +
                            haystack::digit_sentence(3, "blue box", '9');
  const auto got = mock_rag_retrieve(chunk, q, chunk.size(), 3, exact_profile());
  REQUIRE(got.size() == 2);
  CHECK(got[0] == "The 2nd digit of the passcode to the green gate is 8.");
  CHECK(got[1] == "The 5th digit of the passcode to the green gate is 1.");
  CHECK(mock_rag_retrieve(filler(5), q, 100, 3, exact_profile()).empty());

  MockProfile half;
  half.rag_p1 = Curve::constant(0.5);
  const std::string one = filler(2) + haystack::digit_sentence(4, obj, '0');
  int hits = 0;
  for (int s = 0; s < 10000; ++s) hits += mock_rag_retrieve(one, q, one.size(), derive_seed(s, {}), half).size();
  CHECK(hits / 10000.0 == doctest::Approx(0.5).epsilon(0.04));

  std::vector<std::string> all;
  const std::string code = "907152";
  for (std::size_t i = 1; i <= 6; ++i) {
    auto s = haystack::digit_sentence(i, obj, code[i - 1]);
    s.pop_back();  // trailing space
    all.push_back(s);
  }
  CHECK(mock_rag_aggregate(all, q, 0) == code);
  CHECK(mock_rag_aggregate(std::span(all).first(3), q, 0) == "907???");
  CHECK(mock_rag_aggregate(std::vector<std::string>{}, q, 0) == "??????");
}

TEST_CASE("MockBackend chat") {
  const MockBackend exact(exact_profile());
  const auto e = exact.chat(prompts::counting_prompt("a1b2c3"), {}, 5);
  CHECK(prompts::parse_count(e.response_text) == 3);
  CHECK(e.prompt_tokens == estimate_tokens(e.prompt_text));
  CHECK(e.latency_ms >= 0);

  const MockBackend noisy(default_profile());
  const auto p = prompts::counting_prompt(std::string(300, '5'));
  CHECK(noisy.chat(p, {}, 77) == noisy.chat(p, {}, 77));

  const auto q = prompts::retrieval_question("red door");
  CHECK(exact.chat(prompts::retrieval_prompt(filler(4), q), {}, 1).response_text == kIdontKnow);

  CHECK_THROWS_AS(exact.chat("#task:poetry\nhello", {}, 1), ConfigError);
  CHECK_THROWS_AS(exact.chat("no tag", {}, 1), ConfigError);

  SUBCASE("decode length is O(1) for counting and retrieval, O(m) for sorting") {
    for (std::size_t m : {10, 100, 1000, 10000}) {
      const auto c = noisy.chat(prompts::counting_prompt(std::string(m, '3')), {}, m);
      CHECK(c.completion_tokens <= 4);
      const auto r = noisy.chat(prompts::retrieval_prompt(filler(m / 30 + 1), q), {}, m);
      CHECK(r.completion_tokens <= 4);
      std::vector<double> v(m, 0.5);
      const auto s = exact.chat(prompts::sorting_prompt(v), {}, m);
      CHECK(s.completion_tokens >= m / 2);
      CHECK(s.completion_tokens <= 2 * m + 2);
    }
  }
}
