#include "algograph/mock_backend.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "algograph/errors.hpp"
#include "algograph/haystack.hpp"
#include "algograph/prompts.hpp"
#include "algograph/seed.hpp"

namespace algograph {

double Curve::operator()(double m) const {
  switch (shape) {
    case Shape::constant: return value;
    case Shape::logistic: return value / (1.0 + std::exp(-(m - center) / scale));
    case Shape::saturating: return value * (1.0 - std::exp(-m / scale));
    case Shape::linear: return value * m;
  }
  return value;
}

double Curve::probability(double m) const { return std::clamp((*this)(m), 0.0, 1.0); }

bool MockProfile::type1() const {
  return retrieval_p2.shape == Curve::Shape::constant && retrieval_p2.value <= 0.0 &&
         rag_p2.shape == Curve::Shape::constant && rag_p2.value <= 0.0;
}

MockProfile exact_profile() { return MockProfile{}; }

MockProfile default_profile() {
  MockProfile p;
  p.name = "default";
  p.count_miss_rate = Curve::saturating(0.2, 200.0);
  p.count_false_rate = Curve::saturating(0.02, 200.0);
  p.sort_drop_rate = Curve::saturating(0.05, 200.0);
  p.sort_perturb_rate = Curve::saturating(0.1, 200.0);
  p.sort_perturb_scale = Curve::constant(0.01);
  p.sort_swap_rate = Curve::saturating(0.02, 200.0);
  p.retrieval_p1 = Curve::logistic(1.0, 6000.0, 1000.0);
  p.retrieval_p2 = Curve::constant(0.01);
  p.rag_p1 = Curve::logistic(1.0, 8000.0, 1500.0);
  p.rag_p2 = Curve::constant(0.0);
  return p;
}

MockProfile type1_profile() {
  MockProfile p = default_profile();
  p.name = "type1";
  p.retrieval_p2 = Curve::constant(0.0);
  p.rag_p2 = Curve::constant(0.0);
  return p;
}

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string random_passcode(Rng& rng) {
  std::string code(6, '0');
  for (char& c : code) c = static_cast<char>('0' + uniform_index(rng, 10));
  return code;
}

std::string target_of(std::string_view question) {
  auto obj = prompts::question_object(question);
  return obj ? *obj : std::string{};
}

}  // namespace

std::int64_t mock_count(std::string_view substring, std::size_t m, std::uint64_t seed,
                        const MockProfile& profile) {
  Rng rng(seed);
  const double miss = profile.count_miss_rate.probability(static_cast<double>(m));
  const double false_rate = profile.count_false_rate.probability(static_cast<double>(m));
  std::int64_t count = 0;
  for (char c : substring) {
    if (is_digit(c)) {
      if (!bernoulli(rng, miss)) ++count;
    } else if (bernoulli(rng, false_rate)) {
      ++count;
    }
  }
  return count;
}

double expected_count_abs_error(std::size_t digits, std::size_t others, double miss,
                                double false_rate) {
  auto pmf = [](std::size_t trials, double p) {
    std::vector<double> out(trials + 1, 0.0);
    for (std::size_t j = 0; j <= trials; ++j) {
      const double log_choose = std::lgamma(trials + 1.0) - std::lgamma(j + 1.0) -
                                std::lgamma(static_cast<double>(trials - j) + 1.0);
      const double lp = (p <= 0.0) ? (j == 0 ? 0.0 : -INFINITY)
                        : (p >= 1.0) ? (j == trials ? 0.0 : -INFINITY)
                                     : j * std::log(p) + (trials - j) * std::log1p(-p);
      out[j] = std::exp(log_choose + lp);
    }
    return out;
  };
  const auto missed = pmf(digits, miss);
  const auto extra = pmf(others, false_rate);
  double e = 0.0;
  for (std::size_t a = 0; a < missed.size(); ++a) {
    if (missed[a] == 0.0) continue;
    for (std::size_t b = 0; b < extra.size(); ++b) {
      e += missed[a] * extra[b] * std::abs(static_cast<double>(b) - static_cast<double>(a));
    }
  }
  return e;
}

std::vector<double> mock_sort(std::span<const double> values, std::size_t m, std::uint64_t seed,
                              const MockProfile& profile) {
  Rng rng(seed);
  const double size = static_cast<double>(m);
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  // Length mismatch.
  const double drop = profile.sort_drop_rate.probability(size);
  std::vector<double> y;
  y.reserve(sorted.size());
  for (double v : sorted)
    if (!bernoulli(rng, drop)) y.push_back(v);

  // Value errors.
  const double perturb = profile.sort_perturb_rate.probability(size);
  const double scale = std::max(0.0, profile.sort_perturb_scale(size));
  for (double& v : y) {
    if (bernoulli(rng, perturb)) v += (2.0 * uniform01(rng) - 1.0) * scale;
  }
  if (profile.sort_monotone_perturb) std::sort(y.begin(), y.end());

  // Order errors.
  const double swap = profile.sort_swap_rate.probability(size);
  for (std::size_t i = 0; i + 1 < y.size(); ++i) {
    if (bernoulli(rng, swap)) {
      std::swap(y[i], y[i + 1]);
      ++i;
    }
  }
  return y;
}

AnswerRecord mock_retrieve(std::string_view chunk, std::string_view question, std::size_t m,
                           std::uint64_t seed, const MockProfile& profile) {
  Rng rng(seed);
  const std::string target = target_of(question);
  const auto mentions = haystack::scan_passcodes(chunk);
  const haystack::PasscodeMention* needle = nullptr;
  std::vector<const haystack::PasscodeMention*> others;
  for (const auto& mention : mentions) {
    if (mention.object == target) {
      needle = &mention;
    } else {
      others.push_back(&mention);
    }
  }
  auto confusable_code = [&]() {
    if (others.empty()) return random_passcode(rng);
    return others[uniform_index(rng, others.size())]->code;
  };

  const double size = static_cast<double>(m);
  if (needle) {
    if (!bernoulli(rng, profile.retrieval_p1.probability(size)))
      return AnswerRecord::passcode(needle->code);
    if (bernoulli(rng, profile.mode1_unknown_share)) return AnswerRecord::unknown();
    std::string wrong = confusable_code();
    while (wrong == needle->code) wrong = random_passcode(rng);
    return AnswerRecord::passcode(std::move(wrong));
  }
  if (bernoulli(rng, profile.retrieval_p2.probability(size)))
    return AnswerRecord::passcode(confusable_code());
  return AnswerRecord::unknown();
}

std::vector<std::string> mock_rag_retrieve(std::string_view chunk, std::string_view question,
                                           std::size_t m, std::uint64_t seed,
                                           const MockProfile& profile) {
  Rng rng(seed);
  const std::string target = target_of(question);
  const double size = static_cast<double>(m);
  const double p1 = profile.rag_p1.probability(size);
  std::vector<std::string> out;
  std::vector<std::string> confusables;
  for (const auto& mention : haystack::scan_digits(chunk)) {
    if (mention.object == target) {
      if (!bernoulli(rng, p1)) out.push_back(mention.text());
    } else {
      confusables.push_back(mention.text());
    }
  }
  if (bernoulli(rng, profile.rag_p2.probability(size)) && !confusables.empty()) {
    out.push_back(confusables[uniform_index(rng, confusables.size())]);
  }
  return out;
}

std::string mock_rag_aggregate(std::span<const std::string> sentences, std::string_view question,
                               std::uint64_t /*seed*/) {
  const std::string target = target_of(question);
  std::string answer(6, '?');
  for (const auto& s : sentences) {
    for (const auto& mention : haystack::scan_digits(s)) {
      if (mention.object == target && answer[mention.position - 1] == '?') {
        answer[mention.position - 1] = mention.digit;
      }
    }
  }
  return answer;
}

ChatExchange MockBackend::chat(std::string_view prompt, const GenerationParams& /*params*/,
                               std::uint64_t seed) const {
  const auto fields = prompts::read_fields(prompt);
  const std::size_t m = fields.input.size();
  std::string response;
  switch (fields.tag) {
    case prompts::TaskTag::counting: {
      const auto count = mock_count(fields.input, m, seed, profile_);
      if (profile_.count_verbose) {
        // One line of working per character, then the answer.
        for (char c : fields.input) response += fmt::format("{}: {}\n", c, is_digit(c) ? "digit" : "-");
      }
      response += fmt::format("{}", count);
      break;
    }
    case prompts::TaskTag::sorting: {
      const auto values = prompts::parse_list(fields.input);
      if (!values) throw ConfigError("sorting prompt carries no list");
      response = prompts::format_list(mock_sort(*values, values->size(), seed, profile_));
      break;
    }
    case prompts::TaskTag::retrieval: {
      const auto answer = mock_retrieve(fields.input, fields.question, m, seed, profile_);
      response = answer.is_unknown() ? std::string(kIdontKnow) : answer.candidates.front();
      break;
    }
    case prompts::TaskTag::rag_retrieve: {
      const auto sentences = mock_rag_retrieve(fields.input, fields.question, m, seed, profile_);
      if (sentences.empty()) {
        response = "None";
      } else {
        for (std::size_t i = 0; i < sentences.size(); ++i) {
          if (i) response += '\n';
          response += sentences[i];
        }
      }
      break;
    }
    case prompts::TaskTag::rag_aggregate:
      response = mock_rag_aggregate(fields.sentences, fields.question, seed);
      break;
  }
  ChatExchange ex;
  ex.prompt_text = std::string(prompt);
  ex.response_text = std::move(response);
  ex.prompt_tokens = estimate_tokens(ex.prompt_text);
  ex.completion_tokens = estimate_tokens(ex.response_text);
  ex.latency_ms = cost_single_call(static_cast<double>(ex.prompt_tokens),
                                   static_cast<double>(ex.completion_tokens), profile_.latency);
  return ex;
}

}  // namespace algograph
