#include "focus/isolation.hpp"

#include "focus/errors.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <stdexcept>

namespace focus {

std::string_view to_string(IsolationMode mode) {
    switch (mode) {
        case IsolationMode::Full: return "full";
        case IsolationMode::RectMask: return "rect_mask";
        case IsolationMode::Crop: return "crop";
        case IsolationMode::SegmentMask: return "segment_mask";
    }
    return "unknown";
}

IsolationMode parse_isolation_mode(std::string_view text) {
    if (text == "full") return IsolationMode::Full;
    if (text == "rect_mask") return IsolationMode::RectMask;
    if (text == "crop") return IsolationMode::Crop;
    if (text == "segment_mask") return IsolationMode::SegmentMask;
    throw std::invalid_argument(fmt::format(
        "unknown isolation mode '{}' (expected full, rect_mask, crop or segment_mask)", text));
}

int AttendedImage::offset_x() const noexcept {
    return mode == IsolationMode::Crop || mode == IsolationMode::SegmentMask ? source_box.x_min()
                                                                             : 0;
}

int AttendedImage::offset_y() const noexcept {
    return mode == IsolationMode::Crop || mode == IsolationMode::SegmentMask ? source_box.y_min()
                                                                             : 0;
}

BBox AttendedImage::to_original(const BBox& attended_box) const {
    return attended_box.translated(offset_x(), offset_y());
}

BBox AttendedImage::to_attended(const BBox& original_box) const {
    return original_box.translated(-offset_x(), -offset_y());
}

RasterImage apply_mask(const RasterImage& image, const BinaryMask& mask, Rgb fill) {
    if (mask.width() != image.width() || mask.height() != image.height()) {
        throw MaskShapeError(fmt::format("mask is {}x{} but image is {}x{}", mask.width(),
                                         mask.height(), image.width(), image.height()));
    }
    const auto src = image.bytes();
    const auto bits = mask.bits();
    std::vector<std::uint8_t> out(src.begin(), src.end());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == 0) {
            out[3 * i] = fill.r;
            out[3 * i + 1] = fill.g;
            out[3 * i + 2] = fill.b;
        }
    }
    return {image.width(), image.height(), std::move(out)};
}

RasterImage crop(const RasterImage& image, const BBox& box) {
    box.require_within(image.width(), image.height());
    const auto src = image.bytes();
    const auto row_bytes = static_cast<std::size_t>(box.width()) * 3;
    std::vector<std::uint8_t> out;
    out.reserve(row_bytes * static_cast<std::size_t>(box.height()));
    for (int y = box.y_min(); y < box.y_max(); ++y) {
        const auto start = (static_cast<std::size_t>(y) * static_cast<std::size_t>(image.width()) +
                            static_cast<std::size_t>(box.x_min())) * 3;
        out.insert(out.end(), src.begin() + static_cast<std::ptrdiff_t>(start),
                   src.begin() + static_cast<std::ptrdiff_t>(start + row_bytes));
    }
    return {box.width(), box.height(), std::move(out)};
}

BinaryMask crop(const BinaryMask& mask, const BBox& box) {
    box.require_within(mask.width(), mask.height());
    BinaryMask out(box.width(), box.height());
    for (int y = 0; y < box.height(); ++y) {
        for (int x = 0; x < box.width(); ++x) {
            out.set(x, y, mask.at(box.x_min() + x, box.y_min() + y));
        }
    }
    return out;
}

BinaryMask rectangle_mask(int width, int height, const BBox& box) {
    box.require_within(width, height);
    BinaryMask mask(width, height);
    for (int y = box.y_min(); y < box.y_max(); ++y) {
        for (int x = box.x_min(); x < box.x_max(); ++x) {
            mask.set(x, y, true);
        }
    }
    return mask;
}

AttendedImage isolate_region(const RasterImage& image,
                             const BBox& box,
                             const std::optional<BinaryMask>& mask,
                             IsolationMode mode,
                             Rgb fill) {
    box.require_within(image.width(), image.height());
    if (mode == IsolationMode::SegmentMask && !mask) {
        throw MissingMaskError("segment_mask isolation needs a segmentation mask");
    }
    if (mode != IsolationMode::SegmentMask && mask) {
        throw SpuriousMaskError(
            fmt::format("{} isolation does not consume a mask", to_string(mode)));
    }

    switch (mode) {
        case IsolationMode::Full:
            return {image, mode, box, fill};
        case IsolationMode::RectMask:
            return {apply_mask(image, rectangle_mask(image.width(), image.height(), box), fill),
                    mode, box, fill};
        case IsolationMode::Crop:
            return {crop(image, box), mode, box, fill};
        case IsolationMode::SegmentMask:
            return {crop(apply_mask(image, *mask, fill), box), mode, box, fill};
    }
    throw std::logic_error("unhandled isolation mode");
}

}  // namespace focus
