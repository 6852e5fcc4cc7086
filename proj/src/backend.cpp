#include "algograph/backend.hpp"

namespace algograph {

std::uint64_t estimate_tokens(std::string_view text) noexcept {
  return (static_cast<std::uint64_t>(text.size()) + 3) / 4;
}

}  // namespace algograph
