#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace c2rl {

std::string to_hex(std::span<const std::uint8_t> bytes);

// Lower- or upper-case input; throws std::invalid_argument on odd length
// or non-hex characters.
std::vector<std::uint8_t> from_hex(std::string_view hex);

}  // namespace c2rl
