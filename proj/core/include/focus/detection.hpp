#pragma once

#include "focus/bbox.hpp"
#include "focus/proposal.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace focus {

/// A labelled, scored box that satisfies the detection contract.
struct Detection {
    std::string label;
    double score = 0.0;
    BBox box;

    friend bool operator==(const Detection&, const Detection&) = default;
};

/// Untrusted detector output, straight off the wire or out of a fixture.
struct RawDetection {
    std::string label;
    double score = 0.0;
    std::array<double, 4> box{};  // x_min, y_min, x_max, y_max
};

struct ContractResult {
    std::vector<Detection> kept;
    std::size_t dropped = 0;
};

/// Rounds coordinates half away from zero and keeps only detections whose
/// score is finite and within [tau, 1], whose normalized label is one of
/// `labels`, and whose box is valid inside a width x height image. Order of
/// the survivors is preserved.
[[nodiscard]] ContractResult enforce_detection_contract(std::span<const RawDetection> raw,
                                                        const ProposalList& labels,
                                                        double tau,
                                                        int width,
                                                        int height,
                                                        LabelNormalization level =
                                                            LabelNormalization::Exact);

}  // namespace focus
