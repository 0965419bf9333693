#include "focus/bbox.hpp"

#include "focus/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fmt/format.h>
#include <stdexcept>

namespace focus {

BBox::BBox(int x_min, int y_min, int x_max, int y_max)
    : x_min_(x_min), y_min_(y_min), x_max_(x_max), y_max_(y_max) {
    if (x_min < 0 || y_min < 0 || x_min >= x_max || y_min >= y_max) {
        throw InvalidBoxError(fmt::format("invalid box ({},{},{},{}): need 0 <= min < max",
                                          x_min, y_min, x_max, y_max));
    }
}

void BBox::require_within(int image_width, int image_height) const {
    if (!fits_within(image_width, image_height)) {
        throw BoxOutOfBoundsError(
            fmt::format("box {} exceeds {}x{} image", to_string(), image_width, image_height));
    }
}

BBox BBox::translated(int dx, int dy) const {
    return {x_min_ + dx, y_min_ + dy, x_max_ + dx, y_max_ + dy};
}

std::optional<BBox> BBox::intersection(const BBox& other) const {
    const int x0 = std::max(x_min_, other.x_min_);
    const int y0 = std::max(y_min_, other.y_min_);
    const int x1 = std::min(x_max_, other.x_max_);
    const int y1 = std::min(y_max_, other.y_max_);
    if (x0 >= x1 || y0 >= y1) {
        return std::nullopt;
    }
    return BBox(x0, y0, x1, y1);
}

std::string BBox::to_string() const {
    return fmt::format("({},{},{},{})", x_min_, y_min_, x_max_, y_max_);
}

double ioa(const BBox& det, const BBox& region) {
    const auto inter = det.intersection(region);
    if (!inter) {
        return 0.0;
    }
    return static_cast<double>(inter->area()) / static_cast<double>(det.area());
}

ContainmentPolicy ContainmentPolicy::ioa_at_least(double theta) {
    if (!(theta > 0.0 && theta <= 1.0)) {
        throw std::invalid_argument(fmt::format("IoA threshold must lie in (0, 1], got {}", theta));
    }
    return {Kind::IoAAtLeast, theta};
}

std::string ContainmentPolicy::to_string() const {
    switch (kind_) {
        case Kind::CenterIn: return "center_in";
        case Kind::FullyInside: return "fully_inside";
        case Kind::IoAAtLeast: return fmt::format("ioa>={}", theta_);
    }
    return "unknown";
}

ContainmentPolicy ContainmentPolicy::parse(const std::string& text) {
    if (text == "center_in") {
        return center_in();
    }
    if (text == "fully_inside") {
        return fully_inside();
    }
    constexpr std::string_view prefix = "ioa>=";
    if (text.starts_with(prefix)) {
        try {
            std::size_t used = 0;
            const auto tail = text.substr(prefix.size());
            const double theta = std::stod(tail, &used);
            if (used == tail.size()) {
                return ioa_at_least(theta);
            }
        } catch (const std::logic_error&) {
        }
    }
    throw std::invalid_argument("unknown containment policy '" + text +
                                "' (expected center_in, fully_inside or ioa>=<theta>)");
}

bool contains(const BBox& region, const BBox& det, const ContainmentPolicy& policy) {
    switch (policy.kind()) {
        case ContainmentPolicy::Kind::CenterIn: {
            // Doubled coordinates keep the half-pixel centre exact.
            const long cx2 = static_cast<long>(det.x_min()) + det.x_max();
            const long cy2 = static_cast<long>(det.y_min()) + det.y_max();
            return 2L * region.x_min() <= cx2 && cx2 < 2L * region.x_max() &&
                   2L * region.y_min() <= cy2 && cy2 < 2L * region.y_max();
        }
        case ContainmentPolicy::Kind::FullyInside:
            return det.x_min() >= region.x_min() && det.y_min() >= region.y_min() &&
                   det.x_max() <= region.x_max() && det.y_max() <= region.y_max();
        case ContainmentPolicy::Kind::IoAAtLeast:
            return ioa(det, region) >= policy.theta();
    }
    return false;
}

}  // namespace focus
