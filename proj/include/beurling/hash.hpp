#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace beurling {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(const std::string& data);
std::string to_hex(const Digest& d);

// Shortest round-trip decimal form of a double (17 significant digits).
std::string format_double(double v);

}  // namespace beurling
