#include "focus/mock_backend.hpp"

#include "focus/codec.hpp"
#include "focus/errors.hpp"
#include "focus/image_io.hpp"
#include "focus/isolation.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace focus {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_fixture(const fs::path& path) {
    if (!fs::exists(path)) {
        throw FixtureMissError("no fixture at " + path.string());
    }
    try {
        return json::parse(read_file_text(path));
    } catch (const json::exception& e) {
        throw ProtocolError("fixture " + path.string() + " is not valid JSON: " + e.what());
    }
}

RawDetection raw_detection_from_json(const json& j) {
    RawDetection det;
    det.label = j.at("label").get<std::string>();
    det.score = j.at("score").get<double>();
    const auto& box = j.at("box");
    if (!box.is_array() || box.size() != 4) {
        throw ProtocolError("fixture detection box must hold four numbers");
    }
    for (std::size_t i = 0; i < 4; ++i) {
        det.box[i] = box[i].get<double>();
    }
    return det;
}

}  // namespace

void require_safe_subject(const std::string& subject) {
    const bool ok = !subject.empty() && subject.front() != '.' &&
                    std::all_of(subject.begin(), subject.end(), [](char c) {
                        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                               (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
                    });
    if (!ok) {
        throw FixtureMissError("subject key '" + subject + "' is not a valid fixture name");
    }
}

std::string prompt_digest(const std::string& prompt) {
    return sha256_hex(prompt);
}

MockSegmenter::MockSegmenter(fs::path fixture_dir, MaskSource source)
    : dir_(std::move(fixture_dir)), source_(source) {}

BinaryMask MockSegmenter::segment(const RasterImage& image, const BBox& box, CallContext& ctx) const {
    if (source_ == MaskSource::Rectangle) {
        return rectangle_mask(image.width(), image.height(), box);
    }
    require_safe_subject(ctx.subject);
    const auto path = dir_ / "masks" / (ctx.subject + ".png");
    if (!fs::exists(path)) {
        throw FixtureMissError("no mask fixture for '" + ctx.subject + "'");
    }
    try {
        return decode_mask_png(read_file_bytes(path));
    } catch (const ImageCodecError& e) {
        throw ProtocolError("mask fixture " + path.string() + ": " + e.what());
    }
}

MockProposer::MockProposer(fs::path fixture_dir) : dir_(std::move(fixture_dir)) {}

RawProposal MockProposer::propose(const RasterImage&, const std::string& prompt,
                                  CallContext& ctx) const {
    require_safe_subject(ctx.subject);
    const auto doc = load_fixture(dir_ / "proposals" / (ctx.subject + ".json"));
    const auto digest = prompt_digest(prompt);
    const json* entry = nullptr;
    if (auto it = doc.find(digest); it != doc.end()) {
        entry = &*it;
    } else if (auto any = doc.find("*"); any != doc.end()) {
        entry = &*any;
    }
    if (entry == nullptr) {
        throw FixtureMissError("no proposal fixture for ('" + ctx.subject + "', " +
                               digest.substr(0, 12) + ")");
    }
    if (!entry->is_string()) {
        throw ProtocolError("proposal fixture entries must be strings");
    }
    return {entry->get<std::string>(), name()};
}

MockDetector::MockDetector(fs::path fixture_dir) : dir_(std::move(fixture_dir)) {}

std::vector<RawDetection> MockDetector::detect(const RasterImage&, std::span<const std::string>,
                                               double, CallContext& ctx) const {
    require_safe_subject(ctx.subject);
    const auto doc = load_fixture(dir_ / "detections" / (ctx.subject + ".json"));
    const json* list = nullptr;
    if (auto views = doc.find("views"); views != doc.end()) {
        if (auto it = views->find(ctx.view); it != views->end()) {
            list = &*it;
        }
    }
    if (list == nullptr) {
        if (auto it = doc.find("detections"); it != doc.end()) {
            list = &*it;
        }
    }
    if (list == nullptr) {
        throw FixtureMissError("detection fixture for '" + ctx.subject + "' has no entry for view '" +
                               ctx.view + "'");
    }
    if (!list->is_array()) {
        throw ProtocolError("detection fixture entries must be arrays");
    }
    std::vector<RawDetection> out;
    try {
        for (const auto& item : *list) {
            out.push_back(raw_detection_from_json(item));
        }
    } catch (const json::exception& e) {
        throw ProtocolError("malformed detection fixture for '" + ctx.subject + "': " + e.what());
    }
    return out;
}

}  // namespace focus
