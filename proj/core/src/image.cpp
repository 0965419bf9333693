#include "focus/image.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace focus {

namespace {

void check_dimensions(int width, int height) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument("image dimensions must be positive, got " +
                                    std::to_string(width) + "x" + std::to_string(height));
    }
}

std::size_t area(int width, int height) {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

}  // namespace

RasterImage::RasterImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    check_dimensions(width, height);
    if (pixels_.size() != area(width, height) * 3) {
        throw std::invalid_argument("pixel buffer holds " + std::to_string(pixels_.size()) +
                                    " bytes, expected " + std::to_string(area(width, height) * 3));
    }
}

RasterImage RasterImage::filled(int width, int height, Rgb colour) {
    check_dimensions(width, height);
    std::vector<std::uint8_t> pixels(area(width, height) * 3);
    for (std::size_t i = 0; i < pixels.size(); i += 3) {
        pixels[i] = colour.r;
        pixels[i + 1] = colour.g;
        pixels[i + 2] = colour.b;
    }
    return {width, height, std::move(pixels)};
}

BinaryMask::BinaryMask(int width, int height)
    : width_(width), height_(height) {
    check_dimensions(width, height);
    bits_.assign(area(width, height), 0);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
    check_dimensions(width, height);
    if (bits_.size() != area(width, height)) {
        throw std::invalid_argument("mask holds " + std::to_string(bits_.size()) +
                                    " entries, expected " + std::to_string(area(width, height)));
    }
    for (auto& b : bits_) {
        b = b != 0 ? 1 : 0;
    }
}

std::size_t BinaryMask::popcount() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

}  // namespace focus
