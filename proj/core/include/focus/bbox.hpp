#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace focus {

/// Axis-aligned integer pixel box, half-open: [x_min, x_max) x [y_min, y_max).
class BBox {
public:
    /// Throws InvalidBoxError unless 0 <= x_min < x_max and 0 <= y_min < y_max.
    BBox(int x_min, int y_min, int x_max, int y_max);

    /// Whole-frame box for an image of the given size.
    static BBox frame(int width, int height) { return {0, 0, width, height}; }

    [[nodiscard]] int x_min() const noexcept { return x_min_; }
    [[nodiscard]] int y_min() const noexcept { return y_min_; }
    [[nodiscard]] int x_max() const noexcept { return x_max_; }
    [[nodiscard]] int y_max() const noexcept { return y_max_; }
    [[nodiscard]] int width() const noexcept { return x_max_ - x_min_; }
    [[nodiscard]] int height() const noexcept { return y_max_ - y_min_; }
    [[nodiscard]] std::int64_t area() const noexcept {
        return static_cast<std::int64_t>(width()) * height();
    }

    [[nodiscard]] bool fits_within(int image_width, int image_height) const noexcept {
        return x_max_ <= image_width && y_max_ <= image_height;
    }
    /// Throws BoxOutOfBoundsError if the box exceeds the image.
    void require_within(int image_width, int image_height) const;

    /// Shifts the box; throws InvalidBoxError if the result leaves the
    /// non-negative quadrant.
    [[nodiscard]] BBox translated(int dx, int dy) const;

    [[nodiscard]] std::optional<BBox> intersection(const BBox& other) const;

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const BBox&, const BBox&) = default;

private:
    int x_min_;
    int y_min_;
    int x_max_;
    int y_max_;
};

/// Area of intersection divided by the area of `det`; 0 for disjoint boxes.
[[nodiscard]] double ioa(const BBox& det, const BBox& region);

/// Geometric test deciding whether a detection counts as lying inside a
/// region of interest.
class ContainmentPolicy {
public:
    enum class Kind { CenterIn, FullyInside, IoAAtLeast };

    static ContainmentPolicy center_in() { return ContainmentPolicy(Kind::CenterIn, 0.0); }
    static ContainmentPolicy fully_inside() { return ContainmentPolicy(Kind::FullyInside, 0.0); }
    /// Throws std::invalid_argument unless 0 < theta <= 1.
    static ContainmentPolicy ioa_at_least(double theta);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    /// Only meaningful for IoAAtLeast.
    [[nodiscard]] double theta() const noexcept { return theta_; }

    [[nodiscard]] std::string to_string() const;
    /// Accepts "center_in", "fully_inside" and "ioa>=<theta>".
    static ContainmentPolicy parse(const std::string& text);

    friend bool operator==(const ContainmentPolicy&, const ContainmentPolicy&) = default;

private:
    ContainmentPolicy(Kind kind, double theta) : kind_(kind), theta_(theta) {}

    Kind kind_;
    double theta_;
};

[[nodiscard]] bool contains(const BBox& region, const BBox& det, const ContainmentPolicy& policy);

}  // namespace focus
