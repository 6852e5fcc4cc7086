#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace algograph {

inline constexpr const char* kIdontKnow = "I don't know";

/// Final or intermediate answer of a question-answering node: a single
/// passcode, an h-way tie of candidates, or an abstention.
struct AnswerRecord {
  enum class Kind { passcode, candidates, unknown };

  Kind kind = Kind::unknown;
  std::vector<std::string> candidates;  // one entry for Kind::passcode

  static AnswerRecord passcode(std::string code) {
    return {Kind::passcode, {std::move(code)}};
  }
  static AnswerRecord tie(std::vector<std::string> codes) {
    return {Kind::candidates, std::move(codes)};
  }
  static AnswerRecord unknown() { return {}; }

  bool is_unknown() const { return kind == Kind::unknown; }
  std::string to_string() const;

  friend bool operator==(const AnswerRecord&, const AnswerRecord&) = default;
};

using Text = std::string;
using TextList = std::vector<std::string>;
using RealList = std::vector<double>;

/// The closed set of values that flow along graph edges.
using Value = std::variant<Text, std::int64_t, double, RealList, TextList, AnswerRecord>;

std::string describe(const Value& v);

}  // namespace algograph
