#include "algograph/haystack.hpp"

#include <cctype>

#include <fmt/format.h>

namespace algograph::haystack {

namespace {

constexpr std::array<std::string_view, 6> kOrdinals = {"1st", "2nd", "3rd", "4th", "5th", "6th"};

bool is_lower_word(std::string_view w) {
  if (w.empty()) return false;
  for (char c : w)
    if (!std::islower(static_cast<unsigned char>(c))) return false;
  return true;
}

// Parses "{color} {noun}" ending right before `suffix` starting at `pos`.
// Returns the object and advances pos past the suffix.
bool read_object(std::string_view text, std::size_t& pos, std::string_view suffix,
                 std::string& object) {
  const auto stop = text.find(suffix, pos);
  if (stop == std::string_view::npos) return false;
  const auto candidate = text.substr(pos, stop - pos);
  const auto space = candidate.find(' ');
  if (space == std::string_view::npos || candidate.find(' ', space + 1) != std::string_view::npos)
    return false;
  if (!is_lower_word(candidate.substr(0, space)) || !is_lower_word(candidate.substr(space + 1)))
    return false;
  object.assign(candidate);
  pos = stop + suffix.size();
  return true;
}

}  // namespace

std::string object_name(std::size_t index) {
  return fmt::format("{} {}", kColors[(index / kNouns.size()) % kColors.size()],
                     kNouns[index % kNouns.size()]);
}

std::string passcode_sentence(std::string_view object, std::string_view code) {
  return fmt::format("The passcode to the {} is {}. ", object, code);
}

std::string digit_sentence(std::size_t position, std::string_view object, char digit) {
  return fmt::format("The {} digit of the passcode to the {} is {}. ", kOrdinals.at(position - 1),
                     object, digit);
}

std::string DigitMention::text() const {
  return fmt::format("The {} digit of the passcode to the {} is {}.", kOrdinals.at(position - 1),
                     object, digit);
}

std::vector<PasscodeMention> scan_passcodes(std::string_view text) {
  constexpr std::string_view head = "The passcode to the ";
  std::vector<PasscodeMention> out;
  std::size_t at = text.find(head);
  while (at != std::string_view::npos) {
    std::size_t pos = at + head.size();
    PasscodeMention m;
    if (read_object(text, pos, " is ", m.object) && pos + 7 <= text.size()) {
      const auto code = text.substr(pos, 6);
      bool digits = true;
      for (char c : code) digits = digits && std::isdigit(static_cast<unsigned char>(c));
      if (digits && text[pos + 6] == '.') {
        m.code.assign(code);
        m.begin = at;
        m.end = pos + 7;
        out.push_back(std::move(m));
      }
    }
    at = text.find(head, at + 1);
  }
  return out;
}

std::vector<DigitMention> scan_digits(std::string_view text) {
  constexpr std::string_view head = "The ";
  constexpr std::string_view mid = " digit of the passcode to the ";
  std::vector<DigitMention> out;
  std::size_t at = text.find(mid);
  while (at != std::string_view::npos) {
    // "The 3rd" precedes the marker.
    if (at >= head.size() + 3 && text.substr(at - 3 - head.size(), head.size()) == head) {
      const auto ord = text.substr(at - 3, 3);
      std::size_t position = 0;
      for (std::size_t i = 0; i < kOrdinals.size(); ++i)
        if (kOrdinals[i] == ord) position = i + 1;
      std::size_t pos = at + mid.size();
      DigitMention m;
      if (position != 0 && read_object(text, pos, " is ", m.object) && pos + 2 <= text.size() &&
          std::isdigit(static_cast<unsigned char>(text[pos])) && text[pos + 1] == '.') {
        m.position = position;
        m.digit = text[pos];
        m.begin = at - 3 - head.size();
        m.end = pos + 2;
        out.push_back(std::move(m));
      }
    }
    at = text.find(mid, at + 1);
  }
  return out;
}

}  // namespace algograph::haystack
