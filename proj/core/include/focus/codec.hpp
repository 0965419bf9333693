#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace focus {

[[nodiscard]] std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws ProtocolError on malformed input.
[[nodiscard]] std::vector<std::uint8_t> base64_decode(std::string_view text);

/// Lower-case hex SHA-256.
[[nodiscard]] std::string sha256_hex(std::string_view data);
[[nodiscard]] std::string sha256_hex(std::span<const std::uint8_t> data);

}  // namespace focus
