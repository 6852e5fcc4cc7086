#include "algograph/value.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace algograph {

std::string AnswerRecord::to_string() const {
  switch (kind) {
    case Kind::passcode:
      return candidates.empty() ? std::string{} : candidates.front();
    case Kind::candidates:
      return fmt::format("[{}]", fmt::join(candidates, ";"));
    case Kind::unknown:
      break;
  }
  return kIdontKnow;
}

std::string describe(const Value& v) {
  struct Visitor {
    std::string operator()(const Text& t) const { return t; }
    std::string operator()(std::int64_t i) const { return fmt::format("{}", i); }
    std::string operator()(double d) const { return fmt::format("{}", d); }
    std::string operator()(const RealList& l) const { return fmt::format("[{}]", fmt::join(l, ", ")); }
    std::string operator()(const TextList& l) const { return fmt::format("[{}]", fmt::join(l, " | ")); }
    std::string operator()(const AnswerRecord& a) const { return a.to_string(); }
  };
  return std::visit(Visitor{}, v);
}

}  // namespace algograph
