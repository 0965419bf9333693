#include "focus/backend.hpp"

#include "focus/errors.hpp"
#include "focus/mock_backend.hpp"
#include "focus/remote_backend.hpp"

#include <fmt/format.h>
#include <stdexcept>

namespace focus {

BinaryMask segment(const Segmenter& segmenter, const RasterImage& image, const BBox& box,
                   CallContext& ctx) {
    box.require_within(image.width(), image.height());
    auto mask = segmenter.segment(image, box, ctx);
    if (mask.width() != image.width() || mask.height() != image.height()) {
        throw ProtocolError(fmt::format("{} returned a {}x{} mask for a {}x{} image", segmenter.name(),
                                        mask.width(), mask.height(), image.width(), image.height()));
    }
    return mask;
}

RawProposal propose(const Proposer& proposer, const RasterImage& image, const std::string& prompt,
                    CallContext& ctx) {
    if (prompt.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw EmptyPromptError("refusing to send an empty prompt to " + proposer.name());
    }
    return proposer.propose(image, prompt, ctx);
}

DetectOutcome detect(const Detector& detector, const RasterImage& image, const ProposalList& labels,
                     double tau, CallContext& ctx, LabelNormalization level) {
    if (!(tau >= 0.0 && tau <= 1.0)) {
        throw std::invalid_argument(fmt::format("detection threshold {} outside [0, 1]", tau));
    }
    const auto raw = detector.detect(image, labels.labels(), tau, ctx);
    auto checked = enforce_detection_contract(raw, labels, tau, image.width(), image.height(), level);
    return {std::move(checked.kept), checked.dropped};
}

std::string_view to_string(BackendRole role) {
    switch (role) {
        case BackendRole::Segmenter: return "segmenter";
        case BackendRole::Proposer: return "proposer";
        case BackendRole::Detector: return "detector";
    }
    return "unknown";
}

void BackendEndpointConfig::validate() const {
    if (timeout.count() <= 0) {
        throw ConfigError(fmt::format("{} backend: timeout must be positive", to_string(role)));
    }
    if (retries < 0) {
        throw ConfigError(fmt::format("{} backend: retries must be >= 0", to_string(role)));
    }
    if (backoff.count() < 0) {
        throw ConfigError(fmt::format("{} backend: backoff must be >= 0", to_string(role)));
    }
}

namespace {

void require_role(const BackendEndpointConfig& config, BackendRole role) {
    if (config.role != role) {
        throw ConfigError(fmt::format("expected a {} config, got {}", to_string(role),
                                      to_string(config.role)));
    }
    config.validate();
}

}  // namespace

std::shared_ptr<const Segmenter> make_segmenter(const BackendEndpointConfig& config) {
    require_role(config, BackendRole::Segmenter);
    if (const auto* mock = std::get_if<MockEndpoint>(&config.kind)) {
        return std::make_shared<MockSegmenter>(mock->fixture_dir, mock->mask_source);
    }
    return std::make_shared<RemoteSegmenter>(config);
}

std::shared_ptr<const Proposer> make_proposer(const BackendEndpointConfig& config) {
    require_role(config, BackendRole::Proposer);
    if (const auto* mock = std::get_if<MockEndpoint>(&config.kind)) {
        return std::make_shared<MockProposer>(mock->fixture_dir);
    }
    return std::make_shared<RemoteProposer>(config);
}

std::shared_ptr<const Detector> make_detector(const BackendEndpointConfig& config) {
    require_role(config, BackendRole::Detector);
    if (const auto* mock = std::get_if<MockEndpoint>(&config.kind)) {
        return std::make_shared<MockDetector>(mock->fixture_dir);
    }
    return std::make_shared<RemoteDetector>(config);
}

}  // namespace focus
