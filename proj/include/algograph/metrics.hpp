#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "algograph/value.hpp"

namespace algograph::metrics {

// CSV column identifiers.
inline constexpr std::string_view kErrAbs = "err_abs";
inline constexpr std::string_view kErrNorm = "err_norm";
inline constexpr std::string_view kErrExact = "err_exact";
inline constexpr std::string_view kErrNonMono = "err_nonmono";
inline constexpr std::string_view kErrLenMis = "err_lenmis";
inline constexpr std::string_view kErrLinf = "err_linf";
inline constexpr std::string_view kErrL1 = "err_l1";
inline constexpr std::string_view kErrRetrieval = "err_retrieval";
inline constexpr std::string_view kErrDigits = "err_digits";

struct CountingErrors {
  double absolute = 0.0;
  double normalized = 0.0;
};

CountingErrors counting_errors(std::int64_t answer, std::int64_t truth, std::size_t n);

struct SortingErrors {
  double exact_match = 0.0;  // 0 or 1
  double non_monotonicity = 0.0;
  double length_mismatch = 0.0;
  double fuzzy_linf = 0.0;
  double fuzzy_l1 = 0.0;
};

/// Brings `y` to length n: keeps the first n entries, or pads with the last
/// entry (0.0 when y is empty).
std::vector<double> fit_length(std::span<const double> y, std::size_t n);

/// sum_i max(y_i - y_{i+1}, 0)
double non_monotonicity(std::span<const double> y);

/// `truth` must be sorted and non-empty.
SortingErrors sorting_errors(std::span<const double> answer, std::span<const double> truth);

/// Exact match -> 0; an h-way tie containing the truth -> 1 - 1/h; else 1.
/// A truth of "I don't know" (no needle) is matched only by an abstention.
double retrieval_error(const AnswerRecord& answer, std::string_view truth);

struct RagErrors {
  double exact_match = 0.0;
  double digit_fraction_wrong = 0.0;
};

inline constexpr std::size_t kPasscodeLength = 6;

/// Both strings must have length 6 (throws std::invalid_argument otherwise).
/// '?' always counts as a wrong digit.
RagErrors rag_errors(std::string_view answer, std::string_view truth);

enum class Composition { sum, mean, min, max };

/// Throws std::invalid_argument on an empty list.
double compose_error_bound(std::span<const double> subtask_errors, Composition form);

}  // namespace algograph::metrics
