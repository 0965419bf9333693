#include "focus/remote_backend.hpp"

#include "focus/codec.hpp"
#include "focus/errors.hpp"
#include "focus/image_io.hpp"

#include <httplib.h>

#include <fmt/format.h>

#include <thread>

namespace focus {

using nlohmann::json;

namespace {

const std::string& base_url_of(const BackendEndpointConfig& config) {
    const auto* remote = std::get_if<RemoteEndpoint>(&config.kind);
    if (remote == nullptr) {
        throw ConfigError("remote adapter built from a non-remote endpoint config");
    }
    return remote->base_url;
}

json image_body(const RasterImage& image, const CallContext& ctx) {
    return {{"image_png_b64", base64_encode(encode_png(image))},
            {"subject", ctx.subject},
            {"view", ctx.view}};
}

template <typename F>
auto decode_reply(const std::string& route, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw ProtocolError(fmt::format("{}: malformed response: {}", route, e.what()));
    }
}

}  // namespace

RemoteClient::RemoteClient(BackendEndpointConfig config) : config_(std::move(config)) {
    config_.validate();
    const auto& url = base_url_of(config_);
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos || url.compare(0, scheme_end, "http") != 0) {
        throw ConfigError("backend URL must start with http://, got '" + url + "'");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    scheme_host_port_ = url.substr(0, path_start);
    if (path_start != std::string::npos) {
        path_prefix_ = url.substr(path_start);
        while (!path_prefix_.empty() && path_prefix_.back() == '/') {
            path_prefix_.pop_back();
        }
    }
    bearer_token_ = std::get<RemoteEndpoint>(config_.kind).bearer_token;
}

json RemoteClient::post(const std::string& route, const json& body, CallContext& ctx) const {
    const auto payload = body.dump();
    const auto path = path_prefix_ + route;
    std::string last_failure;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        if (attempt > 0) {
            ++ctx.retries;
            std::this_thread::sleep_for(config_.backoff * attempt);
        }
        httplib::Client client(scheme_host_port_);
        const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        if (!bearer_token_.empty()) {
            client.set_bearer_token_auth(bearer_token_);
        }
        auto res = client.Post(path, payload, "application/json");
        if (!res) {
            last_failure = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_failure = fmt::format("HTTP {}", res->status);
            continue;
        }
        try {
            auto reply = json::parse(res->body);
            if (!reply.is_object()) {
                throw ProtocolError(route + ": response is not a JSON object");
            }
            return reply;
        } catch (const json::exception& e) {
            throw ProtocolError(fmt::format("{}: response is not valid JSON: {}", route, e.what()));
        }
    }
    throw BackendUnavailableError(fmt::format("{}{} unavailable after {} attempt(s): {}",
                                              scheme_host_port_, path, config_.retries + 1,
                                              last_failure));
}

std::string RemoteSegmenter::name() const {
    return "remote-segmenter@" + base_url_of(client_.config());
}

BinaryMask RemoteSegmenter::segment(const RasterImage& image, const BBox& box,
                                    CallContext& ctx) const {
    auto body = image_body(image, ctx);
    body["box"] = {box.x_min(), box.y_min(), box.x_max(), box.y_max()};
    const auto reply = client_.post("/v1/segment", body, ctx);
    return decode_reply("/v1/segment", [&] {
        try {
            return decode_mask_png(base64_decode(reply.at("mask_png_b64").get<std::string>()));
        } catch (const ImageCodecError& e) {
            throw ProtocolError(std::string("/v1/segment: undecodable mask: ") + e.what());
        }
    });
}

std::string RemoteProposer::name() const {
    return "remote-proposer@" + base_url_of(client_.config());
}

RawProposal RemoteProposer::propose(const RasterImage& image, const std::string& prompt,
                                    CallContext& ctx) const {
    auto body = image_body(image, ctx);
    body["prompt"] = prompt;
    const auto reply = client_.post("/v1/propose", body, ctx);
    return decode_reply("/v1/propose", [&] {
        return RawProposal{reply.at("text").get<std::string>(), name()};
    });
}

std::string RemoteDetector::name() const {
    return "remote-detector@" + base_url_of(client_.config());
}

std::vector<RawDetection> RemoteDetector::detect(const RasterImage& image,
                                                 std::span<const std::string> labels, double tau,
                                                 CallContext& ctx) const {
    auto body = image_body(image, ctx);
    body["labels"] = std::vector<std::string>(labels.begin(), labels.end());
    body["tau"] = tau;
    const auto reply = client_.post("/v1/detect", body, ctx);
    return decode_reply("/v1/detect", [&] {
        std::vector<RawDetection> out;
        for (const auto& item : reply.at("detections")) {
            RawDetection det;
            det.label = item.at("label").get<std::string>();
            det.score = item.at("score").get<double>();
            const auto& box = item.at("box");
            if (!box.is_array() || box.size() != 4) {
                throw ProtocolError("/v1/detect: box must hold four numbers");
            }
            for (std::size_t i = 0; i < 4; ++i) {
                det.box[i] = box[i].get<double>();
            }
            out.push_back(std::move(det));
        }
        return out;
    });
}

}  // namespace focus
