#include "focus/detection.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace focus {

namespace {

std::optional<int> to_pixel(double v) {
    if (!std::isfinite(v)) {
        return std::nullopt;
    }
    const double r = std::round(v);  // half away from zero
    if (r < 0.0 || r > static_cast<double>(std::numeric_limits<int>::max())) {
        return std::nullopt;
    }
    return static_cast<int>(r);
}

std::optional<BBox> to_box(const std::array<double, 4>& c, int width, int height) {
    const auto x0 = to_pixel(c[0]);
    const auto y0 = to_pixel(c[1]);
    const auto x1 = to_pixel(c[2]);
    const auto y1 = to_pixel(c[3]);
    if (!x0 || !y0 || !x1 || !y1 || *x0 >= *x1 || *y0 >= *y1 || *x1 > width || *y1 > height) {
        return std::nullopt;
    }
    return BBox(*x0, *y0, *x1, *y1);
}

}  // namespace

ContractResult enforce_detection_contract(std::span<const RawDetection> raw,
                                          const ProposalList& labels,
                                          double tau,
                                          int width,
                                          int height,
                                          LabelNormalization level) {
    ContractResult result;
    for (const auto& det : raw) {
        if (!std::isfinite(det.score) || det.score < tau || det.score > 1.0) {
            ++result.dropped;
            continue;
        }
        auto label = try_normalize_label(det.label, level);
        if (!label || !labels.contains(*label)) {
            ++result.dropped;
            continue;
        }
        auto box = to_box(det.box, width, height);
        if (!box) {
            ++result.dropped;
            continue;
        }
        result.kept.push_back({*std::move(label), det.score, *box});
    }
    return result;
}

}  // namespace focus
