#include <doctest.h>

#include <set>

#include "algograph/haystack.hpp"

using namespace algograph::haystack;

TEST_CASE("objects are distinct") {
  std::set<std::string> names;
  for (std::size_t i = 0; i < kObjectCount; ++i) names.insert(object_name(i));
  CHECK(names.size() == 96);
  CHECK(object_name(0) == "red door");
  CHECK(object_name(9) == "green lock");
}

TEST_CASE("sentences") {
  CHECK(passcode_sentence("red door", "123456") == "The passcode to the red door is 123456. ");
  CHECK(digit_sentence(3, "blue box", '7') ==
        "The 3rd digit of the passcode to the blue box is 7. ");
}

TEST_CASE("scan_passcodes finds only complete sentences") {
  const std::string text = "Grass is green. " + passcode_sentence("red door", "111111") +
                           "Filler here. " + passcode_sentence("blue safe", "222222");
  const auto all = scan_passcodes(text);
  REQUIRE(all.size() == 2);
  CHECK(all[0].object == "red door");
  CHECK(all[0].code == "111111");
  CHECK(text.substr(all[0].begin, all[0].end - all[0].begin) ==
        "The passcode to the red door is 111111.");
  CHECK(all[1].object == "blue safe");

  // cut through the middle of the second sentence
  const auto cut = text.substr(0, text.size() - 5);
  CHECK(scan_passcodes(cut).size() == 1);
  // and through the start of the first
  const auto head = text.substr(all[0].begin + 3);
  CHECK(scan_passcodes(head).size() == 1);
}

TEST_CASE("scan_digits") {
  const std::string text = "Some noise. " + digit_sentence(1, "pink vault", '4') +
                           digit_sentence(6, "pink vault", '0') + "More.";
  const auto d = scan_digits(text);
  REQUIRE(d.size() == 2);
  CHECK(d[0].position == 1);
  CHECK(d[0].digit == '4');
  CHECK(d[1].position == 6);
  CHECK(d[1].object == "pink vault");
  CHECK(d[0].text() == "The 1st digit of the passcode to the pink vault is 4.");
  CHECK(scan_passcodes(text).empty());
}
