#include "algograph/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "algograph/errors.hpp"

namespace algograph::prompts {

namespace {

constexpr std::string_view kTagPrefix = "#task:";

constexpr std::string_view kCountingSystem =
    "You are a careful assistant. Count the number of digits (0-9) in the string below. "
    "Letters are not digits. Reply with the count only, as a single integer, without "
    "explanation.";

constexpr std::string_view kSortingSystem =
    "You are a careful assistant. Sort the list of numbers below in ascending order. "
    "Reply with the sorted list only, in the same bracketed comma-separated format, "
    "without explanation.";

constexpr std::string_view kRetrievalSystem =
    "You are a careful assistant. Answer the question using only the text below. "
    "Reply with the 6-digit passcode only. If the text does not contain enough "
    "information to answer, reply exactly \"I don't know\".";

constexpr std::string_view kRagRetrieveSystem =
    "You are a careful assistant. From the text below, copy every sentence that is useful "
    "for answering the question, one sentence per line, without changes. If no sentence is "
    "useful, reply exactly \"None\".";

constexpr std::string_view kRagAggregateSystem =
    "You are a careful assistant. Answer the question using only the sentences below. "
    "Reply with the 6-character passcode only. Write '?' for any digit you cannot "
    "determine.";

std::string tagged(TaskTag tag, std::string_view system) {
  return fmt::format("{}{}\n{}\n", kTagPrefix, tag_name(tag), system);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool iequals_prefix(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i])))
      return false;
  }
  return true;
}

bool contains_icase(std::string_view haystack, std::string_view needle) {
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    if (iequals_prefix(haystack.substr(i), needle)) return true;
  }
  return false;
}

}  // namespace

std::string_view tag_name(TaskTag tag) {
  switch (tag) {
    case TaskTag::counting: return "counting";
    case TaskTag::sorting: return "sorting";
    case TaskTag::retrieval: return "retrieval";
    case TaskTag::rag_retrieve: return "rag-retrieve";
    case TaskTag::rag_aggregate: return "rag-aggregate";
  }
  return "?";
}

std::optional<TaskTag> read_tag(std::string_view prompt) {
  if (!prompt.starts_with(kTagPrefix)) return std::nullopt;
  const auto eol = prompt.find('\n');
  const auto name = prompt.substr(kTagPrefix.size(),
                                  eol == std::string_view::npos ? eol : eol - kTagPrefix.size());
  for (TaskTag t : {TaskTag::counting, TaskTag::sorting, TaskTag::retrieval, TaskTag::rag_retrieve,
                    TaskTag::rag_aggregate}) {
    if (tag_name(t) == trim(name)) return t;
  }
  return std::nullopt;
}

std::string_view strip_tag(std::string_view prompt) {
  if (!prompt.starts_with(kTagPrefix)) return prompt;
  const auto eol = prompt.find('\n');
  return eol == std::string_view::npos ? std::string_view{} : prompt.substr(eol + 1);
}

std::string format_list(std::span<const double> values) {
  return fmt::format("[{}]", fmt::join(values, ", "));
}

std::string counting_prompt(std::string_view substring) {
  return tagged(TaskTag::counting, kCountingSystem) + fmt::format("Input: {}\n", substring);
}

std::string sorting_prompt(std::span<const double> values) {
  return tagged(TaskTag::sorting, kSortingSystem) +
         fmt::format("Input: {}\n", format_list(values));
}

std::string retrieval_prompt(std::string_view chunk, std::string_view question) {
  return tagged(TaskTag::retrieval, kRetrievalSystem) +
         fmt::format("Question: {}\nText: {}\n", question, chunk);
}

std::string rag_retrieve_prompt(std::string_view chunk, std::string_view question) {
  return tagged(TaskTag::rag_retrieve, kRagRetrieveSystem) +
         fmt::format("Question: {}\nText: {}\n", question, chunk);
}

std::string rag_aggregate_prompt(std::span<const std::string> sentences,
                                 std::string_view question) {
  std::string out = tagged(TaskTag::rag_aggregate, kRagAggregateSystem);
  out += fmt::format("Question: {}\nSentences:\n", question);
  for (const auto& s : sentences) out += fmt::format("- {}\n", s);
  return out;
}

std::string retrieval_question(std::string_view object) {
  return fmt::format("What is the passcode to the {}?", object);
}

std::string rag_question(std::string_view object) {
  return fmt::format("What is the 6-digit passcode to the {}?", object);
}

PromptFields read_fields(std::string_view prompt) {
  const auto tag = read_tag(prompt);
  if (!tag) throw ConfigError("prompt carries no recognised #task: tag");
  PromptFields f{*tag, {}, {}, {}};
  std::string_view rest = strip_tag(prompt);
  bool in_sentences = false;
  while (!rest.empty()) {
    const auto eol = rest.find('\n');
    std::string_view line = rest.substr(0, eol);
    rest = eol == std::string_view::npos ? std::string_view{} : rest.substr(eol + 1);
    if (line.starts_with("Input: ")) {
      f.input = line.substr(7);
    } else if (line.starts_with("Text: ")) {
      f.input = line.substr(6);
    } else if (line.starts_with("Question: ")) {
      f.question = line.substr(10);
    } else if (line == "Sentences:") {
      in_sentences = true;
    } else if (in_sentences && line.starts_with("- ")) {
      f.sentences.emplace_back(line.substr(2));
    }
  }
  return f;
}

std::optional<std::string> question_object(std::string_view question) {
  constexpr std::string_view marker = "passcode to the ";
  const auto pos = question.find(marker);
  if (pos == std::string_view::npos) return std::nullopt;
  auto obj = question.substr(pos + marker.size());
  const auto q = obj.find('?');
  if (q == std::string_view::npos) return std::nullopt;
  return std::string(trim(obj.substr(0, q)));
}

std::optional<std::int64_t> parse_count(std::string_view response) {
  // Last integer in the response.
  std::optional<std::int64_t> found;
  std::size_t i = 0;
  while (i < response.size()) {
    if (std::isdigit(static_cast<unsigned char>(response[i]))) {
      std::size_t j = i;
      while (j < response.size() && std::isdigit(static_cast<unsigned char>(response[j]))) ++j;
      std::int64_t v = 0;
      const auto [ptr, ec] = std::from_chars(response.data() + i, response.data() + j, v);
      if (ec == std::errc{}) found = v;
      i = j;
    } else {
      ++i;
    }
  }
  return found;
}

std::optional<std::vector<double>> parse_list(std::string_view response) {
  const auto open = response.find('[');
  const auto close = response.find(']', open == std::string_view::npos ? 0 : open);
  if (open == std::string_view::npos || close == std::string_view::npos) return std::nullopt;
  std::string_view body = response.substr(open + 1, close - open - 1);
  std::vector<double> out;
  while (!body.empty()) {
    const auto comma = body.find(',');
    const auto item = trim(body.substr(0, comma));
    body = comma == std::string_view::npos ? std::string_view{} : body.substr(comma + 1);
    if (item.empty()) continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || ptr != item.data() + item.size()) return std::nullopt;
    out.push_back(v);
  }
  return out;
}

std::optional<AnswerRecord> parse_passcode_answer(std::string_view response) {
  if (contains_icase(response, "i don't know") || contains_icase(response, "i do not know")) {
    return AnswerRecord::unknown();
  }
  for (std::size_t i = 0; i + 6 <= response.size(); ++i) {
    const bool boundary = i == 0 || !std::isdigit(static_cast<unsigned char>(response[i - 1]));
    if (!boundary) continue;
    std::size_t j = i;
    while (j < response.size() && std::isdigit(static_cast<unsigned char>(response[j]))) ++j;
    if (j - i == 6) return AnswerRecord::passcode(std::string(response.substr(i, 6)));
  }
  return std::nullopt;
}

std::optional<std::vector<std::string>> parse_sentences(std::string_view response) {
  const auto body = trim(response);
  if (body.empty()) return std::nullopt;
  std::vector<std::string> out;
  if (iequals_prefix(body, "none") && body.size() <= 5) return out;
  std::string_view rest = body;
  while (!rest.empty()) {
    const auto eol = rest.find('\n');
    auto line = trim(rest.substr(0, eol));
    rest = eol == std::string_view::npos ? std::string_view{} : rest.substr(eol + 1);
    if (line.starts_with("- ")) line.remove_prefix(2);
    if (!line.empty()) out.emplace_back(line);
  }
  return out;
}

std::optional<std::string> parse_partial_passcode(std::string_view response) {
  auto ok = [](char c) { return c == '?' || std::isdigit(static_cast<unsigned char>(c)); };
  for (std::size_t i = 0; i + 6 <= response.size(); ++i) {
    if (i > 0 && ok(response[i - 1])) continue;
    std::size_t j = i;
    while (j < response.size() && ok(response[j])) ++j;
    if (j - i == 6) return std::string(response.substr(i, 6));
  }
  return std::nullopt;
}

}  // namespace algograph::prompts
