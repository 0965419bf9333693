#pragma once

#include "focus/bbox.hpp"
#include "focus/image.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace focus {

/// How the region of interest is separated from the rest of the image
/// before proposal and detection.
enum class IsolationMode {
    Full,         ///< whole image, untouched
    RectMask,     ///< pixels outside the box replaced by the fill colour
    Crop,         ///< box cut out of the image
    SegmentMask,  ///< segmentation mask applied, then cropped to the box
};

std::string_view to_string(IsolationMode mode);
/// Accepts "full", "rect_mask", "crop" and "segment_mask".
IsolationMode parse_isolation_mode(std::string_view text);

/// Result of region isolation plus what is needed to map coordinates back
/// onto the original image.
struct AttendedImage {
    RasterImage image;
    IsolationMode mode;
    BBox source_box;
    Rgb fill;

    /// Translation from attended-image coordinates to original coordinates.
    [[nodiscard]] int offset_x() const noexcept;
    [[nodiscard]] int offset_y() const noexcept;

    [[nodiscard]] BBox to_original(const BBox& attended_box) const;
    [[nodiscard]] BBox to_attended(const BBox& original_box) const;
};

/// Keeps pixels whose mask bit is set, replaces the rest with `fill`.
/// Throws MaskShapeError when the mask size differs from the image.
[[nodiscard]] RasterImage apply_mask(const RasterImage& image, const BinaryMask& mask, Rgb fill);

/// Throws BoxOutOfBoundsError when the box does not fit the image.
[[nodiscard]] RasterImage crop(const RasterImage& image, const BBox& box);

[[nodiscard]] BinaryMask crop(const BinaryMask& mask, const BBox& box);

/// Mask with bits set exactly inside `box`.
[[nodiscard]] BinaryMask rectangle_mask(int width, int height, const BBox& box);

[[nodiscard]] AttendedImage isolate_region(const RasterImage& image,
                                           const BBox& box,
                                           const std::optional<BinaryMask>& mask,
                                           IsolationMode mode,
                                           Rgb fill = kBlack);

}  // namespace focus
