#pragma once

#include "focus/bbox.hpp"
#include "focus/detection.hpp"
#include "focus/image.hpp"
#include "focus/proposal.hpp"

#include <chrono>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace focus {

/// Per-call bookkeeping shared between the orchestrator and an adapter.
struct CallContext {
    /// Key identifying the scene being processed (fixture lookup key for
    /// mocks, forwarded verbatim to remote backends).
    std::string subject;
    /// "attended" for isolated views, "full" for the untouched image.
    std::string view = "full";
    /// Number of retried attempts spent on this call.
    int retries = 0;
};

class Segmenter {
public:
    virtual ~Segmenter() = default;
    [[nodiscard]] virtual std::string name() const = 0;
    virtual BinaryMask segment(const RasterImage& image, const BBox& box, CallContext& ctx) const = 0;
};

class Proposer {
public:
    virtual ~Proposer() = default;
    [[nodiscard]] virtual std::string name() const = 0;
    virtual RawProposal propose(const RasterImage& image, const std::string& prompt,
                                CallContext& ctx) const = 0;
};

class Detector {
public:
    virtual ~Detector() = default;
    [[nodiscard]] virtual std::string name() const = 0;
    /// May return anything; callers go through detect() to enforce the contract.
    virtual std::vector<RawDetection> detect(const RasterImage& image,
                                             std::span<const std::string> labels,
                                             double tau,
                                             CallContext& ctx) const = 0;
};

/// Calls the segmenter and checks that the mask matches the image size.
/// Throws BoxOutOfBoundsError for a box outside the image and ProtocolError
/// for a mis-sized mask.
BinaryMask segment(const Segmenter& segmenter, const RasterImage& image, const BBox& box,
                   CallContext& ctx);

/// Throws EmptyPromptError for a blank prompt.
RawProposal propose(const Proposer& proposer, const RasterImage& image, const std::string& prompt,
                    CallContext& ctx);

struct DetectOutcome {
    std::vector<Detection> detections;
    std::size_t dropped = 0;
};

/// Runs the detector and drops every out-of-contract detection.
/// Throws std::invalid_argument when tau is outside [0, 1].
DetectOutcome detect(const Detector& detector, const RasterImage& image, const ProposalList& labels,
                     double tau, CallContext& ctx,
                     LabelNormalization level = LabelNormalization::Exact);

enum class BackendRole { Segmenter, Proposer, Detector };

std::string_view to_string(BackendRole role);

/// Where the segmenter mock takes its masks from.
enum class MaskSource {
    Rectangle,  ///< bits set exactly inside the requested box
    Fixture,    ///< masks/<subject>.png from the fixture directory
};

struct RemoteEndpoint {
    std::string base_url;
    /// Sent as "Authorization: Bearer <token>" when non-empty.
    std::string bearer_token;
};

struct MockEndpoint {
    std::filesystem::path fixture_dir;
    MaskSource mask_source = MaskSource::Rectangle;
};

struct BackendEndpointConfig {
    BackendRole role = BackendRole::Detector;
    std::variant<MockEndpoint, RemoteEndpoint> kind;
    std::chrono::milliseconds timeout{30000};
    int retries = 2;
    /// Delay before retry n is n * backoff.
    std::chrono::milliseconds backoff{200};

    /// Throws ConfigError unless timeout > 0 and retries >= 0.
    void validate() const;
};

std::shared_ptr<const Segmenter> make_segmenter(const BackendEndpointConfig& config);
std::shared_ptr<const Proposer> make_proposer(const BackendEndpointConfig& config);
std::shared_ptr<const Detector> make_detector(const BackendEndpointConfig& config);

}  // namespace focus
