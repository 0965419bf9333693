#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace focus {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr Rgb kBlack{0, 0, 0};

/// Immutable 8-bit RGB raster, row-major, three bytes per pixel.
class RasterImage {
public:
    /// Throws std::invalid_argument if a dimension is zero or the buffer
    /// length is not width * height * 3.
    RasterImage(int width, int height, std::vector<std::uint8_t> pixels);

    /// Constant-colour image.
    static RasterImage filled(int width, int height, Rgb colour);

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] std::span<const std::uint8_t> bytes() const noexcept { return pixels_; }

    [[nodiscard]] Rgb at(int x, int y) const noexcept {
        const auto i = index(x, y);
        return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
    }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

private:
    [[nodiscard]] std::size_t index(int x, int y) const noexcept {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(x)) * 3;
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> pixels_;
};

/// One bit per pixel, row-major. Stored as bytes (0/1) for simple indexing.
class BinaryMask {
public:
    /// All-zero mask.
    BinaryMask(int width, int height);
    /// Any non-zero input byte is treated as a set bit.
    BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }

    [[nodiscard]] bool at(int x, int y) const noexcept {
        return bits_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                     static_cast<std::size_t>(x)] != 0;
    }
    void set(int x, int y, bool value) noexcept {
        bits_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
              static_cast<std::size_t>(x)] = value ? 1 : 0;
    }

    [[nodiscard]] std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    [[nodiscard]] std::size_t popcount() const noexcept;

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> bits_;
};

}  // namespace focus
