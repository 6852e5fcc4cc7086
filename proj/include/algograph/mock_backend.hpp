#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "algograph/backend.hpp"
#include "algograph/cost_model.hpp"
#include "algograph/value.hpp"

namespace algograph {

/// A function of sub-task size m.
///   constant    value
///   logistic    value / (1 + exp(-(m - center) / scale))
///   saturating  value * (1 - exp(-m / scale))
///   linear      value * m
struct Curve {
  enum class Shape { constant, logistic, saturating, linear };

  Shape shape = Shape::constant;
  double value = 0.0;
  double center = 0.0;
  double scale = 1.0;

  static Curve constant(double v) { return {Shape::constant, v, 0.0, 1.0}; }
  static Curve logistic(double ceiling, double center, double scale) {
    return {Shape::logistic, ceiling, center, scale};
  }
  static Curve saturating(double ceiling, double scale) {
    return {Shape::saturating, ceiling, 0.0, scale};
  }
  static Curve linear(double slope) { return {Shape::linear, slope, 0.0, 1.0}; }

  double operator()(double m) const;
  /// Clamped to [0, 1].
  double probability(double m) const;
};

/// Failure-mode model of a simulated LLM. All curves take the sub-task size
/// in characters (counting, retrieval, RAG) or list entries (sorting).
struct MockProfile {
  std::string name = "exact";

  Curve count_miss_rate;   // per digit
  Curve count_false_rate;  // per non-digit
  bool count_verbose = false;  // step-by-step answers, O(m) decode

  Curve sort_drop_rate;
  Curve sort_perturb_rate;
  Curve sort_perturb_scale;
  Curve sort_swap_rate;
  bool sort_monotone_perturb = false;  // re-sort after perturbing

  Curve retrieval_p1;  // miss a present needle
  Curve retrieval_p2;  // hallucinate on a needle-free chunk; 0 => Type-1
  double mode1_unknown_share = 0.5;

  Curve rag_p1;  // per relevant sentence
  Curve rag_p2;  // per chunk

  CostFunctions latency{CostKind::compute_bound_linear, 1.0, 1.0};

  bool type1() const;
};

/// All rates zero.
MockProfile exact_profile();
/// Smooth monotone degradation with a small constant hallucination rate.
MockProfile default_profile();
/// default_profile() with p2 == 0.
MockProfile type1_profile();

std::int64_t mock_count(std::string_view substring, std::size_t m, std::uint64_t seed,
                        const MockProfile& profile);

/// E|error| of mock_count: error = F - M with M ~ Bin(digits, miss) and
/// F ~ Bin(others, false_rate).
double expected_count_abs_error(std::size_t digits, std::size_t others, double miss,
                                double false_rate);

std::vector<double> mock_sort(std::span<const double> values, std::size_t m, std::uint64_t seed,
                              const MockProfile& profile);

AnswerRecord mock_retrieve(std::string_view chunk, std::string_view question, std::size_t m,
                           std::uint64_t seed, const MockProfile& profile);

std::vector<std::string> mock_rag_retrieve(std::string_view chunk, std::string_view question,
                                           std::size_t m, std::uint64_t seed,
                                           const MockProfile& profile);

/// Six characters; '?' where no sentence mentions the digit.
std::string mock_rag_aggregate(std::span<const std::string> sentences, std::string_view question,
                               std::uint64_t seed);

/// Stateless simulated LLM. Latency comes from the profile's cost functions.
class MockBackend final : public LlmBackend {
 public:
  explicit MockBackend(MockProfile profile) : profile_(std::move(profile)) {}

  ChatExchange chat(std::string_view prompt, const GenerationParams& params,
                    std::uint64_t seed) const override;
  bool deterministic() const override { return true; }
  const MockProfile& profile() const { return profile_; }

 private:
  MockProfile profile_;
};

}  // namespace algograph
