#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "algograph/value.hpp"

// Prompt templates and response parsers shared by the task solvers and the
// mock backend. Every prompt starts with a "#task:<name>" line that the mock
// dispatches on; HTTP backends receive the prompt with that line removed.
namespace algograph::prompts {

inline constexpr int kTemplateVersion = 1;

enum class TaskTag { counting, sorting, retrieval, rag_retrieve, rag_aggregate };

std::string_view tag_name(TaskTag tag);

/// Reads the "#task:" line. nullopt when absent or unknown.
std::optional<TaskTag> read_tag(std::string_view prompt);

/// Removes the leading "#task:" line, if present.
std::string_view strip_tag(std::string_view prompt);

std::string counting_prompt(std::string_view substring);
std::string sorting_prompt(std::span<const double> values);
std::string retrieval_prompt(std::string_view chunk, std::string_view question);
std::string rag_retrieve_prompt(std::string_view chunk, std::string_view question);
std::string rag_aggregate_prompt(std::span<const std::string> sentences, std::string_view question);

std::string retrieval_question(std::string_view object);
std::string rag_question(std::string_view object);

/// Payload fields of a tagged prompt.
struct PromptFields {
  TaskTag tag;
  std::string input;                   // "Input:" / "Text:" line
  std::string question;                // "Question:" line
  std::vector<std::string> sentences;  // aggregation prompt only
};

/// Throws ConfigError for a missing/unknown tag.
PromptFields read_fields(std::string_view prompt);

/// The object named by a question ("What is the passcode to the red door?").
std::optional<std::string> question_object(std::string_view question);

/// Shortest round-trip rendering, "[a, b, c]".
std::string format_list(std::span<const double> values);

// Response parsers. nullopt means the response could not be understood.
std::optional<std::int64_t> parse_count(std::string_view response);
std::optional<std::vector<double>> parse_list(std::string_view response);
std::optional<AnswerRecord> parse_passcode_answer(std::string_view response);
std::optional<std::vector<std::string>> parse_sentences(std::string_view response);
std::optional<std::string> parse_partial_passcode(std::string_view response);

}  // namespace algograph::prompts
