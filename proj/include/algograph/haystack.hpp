#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Sentence vocabulary for the needle-in-a-haystack and RAG instances, plus
// the scanners that recover complete sentences from an arbitrary chunk.
namespace algograph::haystack {

inline constexpr std::array<std::string_view, 12> kColors = {
    "red", "green", "blue", "yellow", "purple", "orange",
    "black", "white", "silver", "golden", "brown", "pink"};

inline constexpr std::array<std::string_view, 8> kNouns = {
    "door", "lock", "safe", "gate", "box", "chest", "locker", "vault"};

inline constexpr std::size_t kObjectCount = kColors.size() * kNouns.size();

/// Object i in [0, 96): color i / 8, noun i % 8.
std::string object_name(std::size_t index);

/// "The passcode to the {object} is {code}. "
std::string passcode_sentence(std::string_view object, std::string_view code);

/// "The {ordinal} digit of the passcode to the {object} is {digit}. "
/// position is 1-based.
std::string digit_sentence(std::size_t position, std::string_view object, char digit);

struct PasscodeMention {
  std::string object;
  std::string code;
  std::size_t begin = 0;  // offset of "The"
  std::size_t end = 0;    // one past the final '.'
};

struct DigitMention {
  std::string object;
  std::size_t position = 0;  // 1-based
  char digit = '0';
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string text() const;
};

/// Complete passcode sentences in text order. Partial sentences at either
/// edge are ignored.
std::vector<PasscodeMention> scan_passcodes(std::string_view text);

/// Complete digit sentences in text order.
std::vector<DigitMention> scan_digits(std::string_view text);

}  // namespace algograph::haystack
