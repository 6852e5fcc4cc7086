#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "algograph/errors.hpp"
#include "algograph/haystack.hpp"
#include "algograph/tasks.hpp"

using namespace algograph;
using namespace algograph::tasks;

TEST_CASE("counting instances") {
  const auto a = generate_counting(10, 99);
  const auto b = generate_counting(10, 99);
  CHECK(a.text == b.text);
  CHECK(a.text.size() == 10);
  const auto big = generate_counting(5000, 1);
  const auto digits = std::count_if(big.text.begin(), big.text.end(),
                                    [](unsigned char c) { return std::isdigit(c); });
  CHECK(big.truth == digits);
  CHECK(generate_counting(5000, 2).text != big.text);
}

TEST_CASE("sorting instances") {
  const auto s = generate_sorting(1000, 4);
  REQUIRE(s.values.size() == 1000);
  for (double v : s.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(std::fabs(v * 100 - std::round(v * 100)) < 1e-9);
  }
  CHECK(std::is_sorted(s.truth.begin(), s.truth.end()));
  CHECK(std::is_permutation(s.truth.begin(), s.truth.end(), s.values.begin()));
}

TEST_CASE("haystack instances") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto h = generate_haystack(3000, seed);
    CHECK(h.text.size() == 3000);
    const auto mentions = haystack::scan_passcodes(h.text);
    std::size_t hits = 0;
    std::map<std::string, std::string> codes;
    for (const auto& m : mentions) {
      if (m.object == h.target_object) {
        ++hits;
        CHECK(m.code == h.truth);
        CHECK(m.begin == h.needle_span.begin);
        CHECK(m.end - m.begin == h.needle_span.length);
      }
      auto [it, fresh] = codes.emplace(m.object, m.code);
      CHECK(it->second == m.code);
    }
    CHECK(hits == 1);

    const auto none = generate_haystack(3000, seed, {.needle_present = false});
    CHECK(none.truth == kIdontKnow);
    for (const auto& m : haystack::scan_passcodes(none.text)) CHECK(m.object != none.target_object);
  }
  CHECK_THROWS_AS(generate_haystack(20, 1), ConfigError);
}

TEST_CASE("rag instances") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto r = generate_rag(4000, seed);
    CHECK(r.text.size() == 4000);
    REQUIRE(r.needle_spans.size() == 6);
    std::string assembled(6, '?');
    for (const auto& d : haystack::scan_digits(r.text)) {
      if (d.object != r.target_object) continue;
      CHECK(assembled[d.position - 1] == '?');
      assembled[d.position - 1] = d.digit;
    }
    CHECK(assembled == r.truth);
  }
  CHECK_THROWS_AS(generate_rag(100, 1), ConfigError);
}

TEST_CASE("instance dump round trip") {
  const std::vector<Instance> all{generate_counting(50, 1), generate_sorting(20, 2),
                                  generate_haystack(500, 3), generate_haystack(500, 4, {false}),
                                  generate_rag(1000, 5)};
  for (const auto& inst : all) {
    std::stringstream ss;
    write_instance(ss, inst);
    const auto back = read_instance(ss);
    REQUIRE(back.index() == inst.index());
    std::stringstream again;
    write_instance(again, back);
    std::stringstream first;
    write_instance(first, inst);
    CHECK(again.str() == first.str());
    CHECK(instance_size(back) == instance_size(inst));
  }
  const auto sorted = generate_sorting(20, 2);
  std::stringstream ss;
  write_instance(ss, sorted);
  const auto back = std::get<SortingInstance>(read_instance(ss));
  CHECK(back.values == sorted.values);
  CHECK(back.truth == sorted.truth);

  std::stringstream junk("not an instance\n");
  CHECK_THROWS_AS(read_instance(junk), ConfigError);
}
