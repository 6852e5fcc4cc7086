#include "algograph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace algograph::metrics {

CountingErrors counting_errors(std::int64_t answer, std::int64_t truth, std::size_t n) {
  if (n == 0) throw std::invalid_argument("counting error needs n >= 1");
  const double abs_err = static_cast<double>(std::llabs(answer - truth));
  return {abs_err, abs_err / static_cast<double>(n)};
}

std::vector<double> fit_length(std::span<const double> y, std::size_t n) {
  std::vector<double> out(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(std::min(n, y.size())));
  const double pad = y.empty() ? 0.0 : y.back();
  out.resize(n, pad);
  return out;
}

double non_monotonicity(std::span<const double> y) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < y.size(); ++i) total += std::max(y[i] - y[i + 1], 0.0);
  return total;
}

SortingErrors sorting_errors(std::span<const double> answer, std::span<const double> truth) {
  if (truth.empty()) throw std::invalid_argument("sorting error needs a non-empty truth");
  const std::size_t n = truth.size();
  SortingErrors e;
  if (std::equal(answer.begin(), answer.end(), truth.begin(), truth.end())) return e;
  e.exact_match = 1.0;
  e.non_monotonicity = non_monotonicity(answer);
  const double len = static_cast<double>(answer.size());
  e.length_mismatch = std::abs(len - static_cast<double>(n)) / static_cast<double>(n);
  const auto fitted = fit_length(answer, n);
  double l1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs(fitted[i] - truth[i]);
    e.fuzzy_linf = std::max(e.fuzzy_linf, d);
    l1 += d;
  }
  e.fuzzy_l1 = l1 / static_cast<double>(n);
  return e;
}

double retrieval_error(const AnswerRecord& answer, std::string_view truth) {
  if (truth == kIdontKnow) return answer.is_unknown() ? 0.0 : 1.0;
  switch (answer.kind) {
    case AnswerRecord::Kind::passcode:
      return (answer.candidates.size() == 1 && answer.candidates.front() == truth) ? 0.0 : 1.0;
    case AnswerRecord::Kind::candidates: {
      const auto& c = answer.candidates;
      if (std::find(c.begin(), c.end(), truth) == c.end()) return 1.0;
      return 1.0 - 1.0 / static_cast<double>(c.size());
    }
    case AnswerRecord::Kind::unknown:
      break;
  }
  return 1.0;
}

RagErrors rag_errors(std::string_view answer, std::string_view truth) {
  if (answer.size() != kPasscodeLength || truth.size() != kPasscodeLength) {
    throw std::invalid_argument("malformed RAG answer: expected 6 characters");
  }
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < kPasscodeLength; ++i) {
    if (answer[i] == '?' || answer[i] != truth[i]) ++wrong;
  }
  return {wrong == 0 ? 0.0 : 1.0, static_cast<double>(wrong) / kPasscodeLength};
}

double compose_error_bound(std::span<const double> e, Composition form) {
  if (e.empty()) throw std::invalid_argument("error composition needs k >= 1");
  switch (form) {
    case Composition::sum: return std::accumulate(e.begin(), e.end(), 0.0);
    case Composition::mean:
      return std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(e.size());
    case Composition::min: return *std::min_element(e.begin(), e.end());
    case Composition::max: return *std::max_element(e.begin(), e.end());
  }
  return 0.0;
}

}  // namespace algograph::metrics
