#pragma once

#include "focus/image.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace focus {

/// Lossless RGB8 PNG. Output is deterministic for a given libpng build.
[[nodiscard]] std::vector<std::uint8_t> encode_png(const RasterImage& image);
[[nodiscard]] std::vector<std::uint8_t> encode_jpeg(const RasterImage& image, int quality = 92);

/// Decodes PNG or JPEG (sniffed from the signature) into RGB8. Alpha and
/// grey inputs are converted. Throws ImageCodecError.
[[nodiscard]] RasterImage decode_image(std::span<const std::uint8_t> bytes);

/// Single-channel PNG, 0 = outside, 255 = inside.
[[nodiscard]] std::vector<std::uint8_t> encode_mask_png(const BinaryMask& mask);
/// Values >= 128 decode as inside.
[[nodiscard]] BinaryMask decode_mask_png(std::span<const std::uint8_t> bytes);

[[nodiscard]] std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
[[nodiscard]] std::string read_file_text(const std::filesystem::path& path);
/// Creates parent directories as needed.
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_text(const std::filesystem::path& path, const std::string& text);

[[nodiscard]] RasterImage read_image(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const RasterImage& image);

}  // namespace focus
