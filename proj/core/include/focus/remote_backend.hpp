#pragma once

#include "focus/backend.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace focus {

/// JSON-over-HTTP client shared by the remote adapters.
///
/// Each role POSTs to <base_url>/v1/<role>. Requests carry the image as
/// base64 PNG plus "subject" and "view" from the call context. Connection
/// failures and non-200 replies are retried up to `retries` times; a 200
/// reply that cannot be decoded is a ProtocolError and is not retried.
class RemoteClient {
public:
    explicit RemoteClient(BackendEndpointConfig config);

    /// Throws BackendUnavailableError once every attempt has failed.
    nlohmann::json post(const std::string& route, const nlohmann::json& body, CallContext& ctx) const;

    [[nodiscard]] const BackendEndpointConfig& config() const noexcept { return config_; }

private:
    BackendEndpointConfig config_;
    std::string scheme_host_port_;
    std::string path_prefix_;
    std::string bearer_token_;
};

class RemoteSegmenter final : public Segmenter {
public:
    explicit RemoteSegmenter(BackendEndpointConfig config) : client_(std::move(config)) {}

    [[nodiscard]] std::string name() const override;
    BinaryMask segment(const RasterImage& image, const BBox& box, CallContext& ctx) const override;

private:
    RemoteClient client_;
};

class RemoteProposer final : public Proposer {
public:
    explicit RemoteProposer(BackendEndpointConfig config) : client_(std::move(config)) {}

    [[nodiscard]] std::string name() const override;
    RawProposal propose(const RasterImage& image, const std::string& prompt,
                        CallContext& ctx) const override;

private:
    RemoteClient client_;
};

class RemoteDetector final : public Detector {
public:
    explicit RemoteDetector(BackendEndpointConfig config) : client_(std::move(config)) {}

    [[nodiscard]] std::string name() const override;
    std::vector<RawDetection> detect(const RasterImage& image, std::span<const std::string> labels,
                                     double tau, CallContext& ctx) const override;

private:
    RemoteClient client_;
};

}  // namespace focus
