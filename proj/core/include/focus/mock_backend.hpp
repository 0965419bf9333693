#pragma once

#include "focus/backend.hpp"

#include <filesystem>

namespace focus {

/// Fixture-driven stand-ins for the three backend roles.
///
/// Fixture directory layout (all keys are CallContext::subject):
///
///   masks/<subject>.png         single-channel mask, 0 outside / 255 inside
///   proposals/<subject>.json    {"<sha256 hex of prompt>": "raw text", ...}
///                               an entry keyed "*" matches any prompt
///   detections/<subject>.json   {"detections": [{"label", "score", "box"}],
///                                "views": {"full": [...], "attended": [...]}}
///
/// A "views" entry for CallContext::view takes precedence over the default
/// "detections" list. Boxes are [x_min, y_min, x_max, y_max] in the
/// coordinates of the image the detector receives. Mocks hold no mutable
/// state; every call re-reads its fixture file.
class MockSegmenter final : public Segmenter {
public:
    MockSegmenter(std::filesystem::path fixture_dir, MaskSource source);

    [[nodiscard]] std::string name() const override { return "mock-segmenter"; }
    BinaryMask segment(const RasterImage& image, const BBox& box, CallContext& ctx) const override;

private:
    std::filesystem::path dir_;
    MaskSource source_;
};

class MockProposer final : public Proposer {
public:
    explicit MockProposer(std::filesystem::path fixture_dir);

    [[nodiscard]] std::string name() const override { return "mock-proposer"; }
    RawProposal propose(const RasterImage& image, const std::string& prompt,
                        CallContext& ctx) const override;

private:
    std::filesystem::path dir_;
};

class MockDetector final : public Detector {
public:
    explicit MockDetector(std::filesystem::path fixture_dir);

    [[nodiscard]] std::string name() const override { return "mock-detector"; }
    std::vector<RawDetection> detect(const RasterImage& image, std::span<const std::string> labels,
                                     double tau, CallContext& ctx) const override;

private:
    std::filesystem::path dir_;
};

/// Key under which a prompt is stored in a proposals fixture.
[[nodiscard]] std::string prompt_digest(const std::string& prompt);

/// Throws FixtureMissError unless `subject` is a plain file stem
/// ([A-Za-z0-9_.-], not starting with '.').
void require_safe_subject(const std::string& subject);

}  // namespace focus
