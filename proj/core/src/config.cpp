#include "focus/config.hpp"

#include "focus/errors.hpp"
#include "focus/image_io.hpp"

#include <cstdlib>
#include <fmt/format.h>
#include <set>

namespace focus {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

BackendEndpointConfig mock_endpoint(BackendRole role, const fs::path& dir) {
    BackendEndpointConfig c;
    c.role = role;
    c.kind = MockEndpoint{dir, MaskSource::Rectangle};
    return c;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
        if (!keys.contains(key)) {
            throw ConfigError(fmt::format("{}: unknown key '{}'", where, key));
        }
    }
}

fs::path resolve(const fs::path& base_dir, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
}

BackendEndpointConfig parse_endpoint(BackendRole role, const json& j, const fs::path& base_dir,
                                     const std::optional<BackendEndpointConfig>& previous) {
    const auto where = fmt::format("backends.{}", to_string(role));
    if (!j.is_object()) {
        throw ConfigError(where + " must be an object");
    }
    reject_unknown(j, {"kind", "fixtures", "mask_source", "url", "bearer_token", "bearer_token_env",
                       "timeout_ms", "retries", "backoff_ms"},
                   where);
    BackendEndpointConfig c = previous.value_or(BackendEndpointConfig{});
    c.role = role;
    const auto kind = j.value("kind", std::string(std::holds_alternative<RemoteEndpoint>(c.kind) ? "remote" : "mock"));
    if (kind == "mock") {
        MockEndpoint m = std::holds_alternative<MockEndpoint>(c.kind) ? std::get<MockEndpoint>(c.kind)
                                                                        : MockEndpoint{};
        if (j.contains("fixtures")) m.fixture_dir = resolve(base_dir, j.at("fixtures").get<std::string>());
        if (j.contains("mask_source")) {
            const auto src = j.at("mask_source").get<std::string>();
            if (src == "rectangle") m.mask_source = MaskSource::Rectangle;
            else if (src == "fixture") m.mask_source = MaskSource::Fixture;
            else throw ConfigError(where + ": mask_source must be rectangle or fixture");
        }
        if (m.fixture_dir.empty()) {
            throw ConfigError(where + ": mock backend needs a fixtures directory");
        }
        c.kind = m;
    } else if (kind == "remote") {
        RemoteEndpoint r = std::holds_alternative<RemoteEndpoint>(c.kind) ? std::get<RemoteEndpoint>(c.kind)
                                                                          : RemoteEndpoint{};
        if (j.contains("url")) r.base_url = j.at("url").get<std::string>();
        if (j.contains("bearer_token")) r.bearer_token = j.at("bearer_token").get<std::string>();
        if (j.contains("bearer_token_env")) {
            const auto name = j.at("bearer_token_env").get<std::string>();
            const char* value = std::getenv(name.c_str());
            if (value == nullptr) {
                throw ConfigError(fmt::format("{}: environment variable {} is not set", where, name));
            }
            r.bearer_token = value;
        }
        if (r.base_url.empty()) {
            throw ConfigError(where + ": remote backend needs a url");
        }
        c.kind = r;
    } else {
        throw ConfigError(fmt::format("{}: kind must be mock or remote, got '{}'", where, kind));
    }
    if (j.contains("timeout_ms")) c.timeout = std::chrono::milliseconds(j.at("timeout_ms").get<long>());
    if (j.contains("retries")) c.retries = j.at("retries").get<int>();
    if (j.contains("backoff_ms")) c.backoff = std::chrono::milliseconds(j.at("backoff_ms").get<long>());
    c.validate();
    return c;
}

json endpoint_snapshot(const BackendEndpointConfig& c) {
    json j = {{"timeout_ms", c.timeout.count()}, {"retries", c.retries}, {"backoff_ms", c.backoff.count()}};
    if (const auto* m = std::get_if<MockEndpoint>(&c.kind)) {
        j["kind"] = "mock";
        j["fixtures"] = m->fixture_dir.generic_string();
        j["mask_source"] = m->mask_source == MaskSource::Rectangle ? "rectangle" : "fixture";
    } else {
        const auto& r = std::get<RemoteEndpoint>(c.kind);
        j["kind"] = "remote";
        j["url"] = r.base_url;
        j["authenticated"] = !r.bearer_token.empty();
    }
    return j;
}

}  // namespace

BackendSet RunConfig::make_backends() const {
    BackendSet set;
    if (segmenter) {
        set.segmenter = make_segmenter(*segmenter);
    }
    set.proposer = make_proposer(proposer);
    set.detector = make_detector(detector);
    return set;
}

Pipeline RunConfig::make_pipeline() const {
    return Pipeline(pipeline, make_backends());
}

RunConfig default_run_config(const fs::path& fixture_dir) {
    RunConfig c;
    c.segmenter = mock_endpoint(BackendRole::Segmenter, fixture_dir);
    c.proposer = mock_endpoint(BackendRole::Proposer, fixture_dir);
    c.detector = mock_endpoint(BackendRole::Detector, fixture_dir);
    return c;
}

void apply_config_json(RunConfig& config, const json& doc, const fs::path& base_dir) {
    if (!doc.is_object()) {
        throw ConfigError("config document must be a JSON object");
    }
    reject_unknown(doc, {"mode", "fill", "base_tau", "containment", "prompt", "prompt_file",
                         "normalization", "parallelism", "backends"},
                   "config");
    try {
        auto& p = config.pipeline;
        if (doc.contains("mode")) p.mode = parse_isolation_mode(doc.at("mode").get<std::string>());
        if (doc.contains("fill")) {
            const auto& f = doc.at("fill");
            if (!f.is_array() || f.size() != 3) throw ConfigError("fill must be [r, g, b]");
            p.fill = Rgb{f[0].get<std::uint8_t>(), f[1].get<std::uint8_t>(), f[2].get<std::uint8_t>()};
        }
        if (doc.contains("base_tau")) p.base_tau = doc.at("base_tau").get<double>();
        if (doc.contains("containment")) {
            p.containment = ContainmentPolicy::parse(doc.at("containment").get<std::string>());
        }
        if (doc.contains("prompt_file")) {
            p.prompt = parse_prompt_file(
                read_file_text(resolve(base_dir, doc.at("prompt_file").get<std::string>())));
        }
        if (doc.contains("prompt")) {
            const auto& pr = doc.at("prompt");
            reject_unknown(pr, {"task", "addendum"}, "prompt");
            p.prompt.task_text = pr.value("task", p.prompt.task_text);
            p.prompt.addendum = pr.value("addendum", p.prompt.addendum);
        }
        if (doc.contains("normalization")) {
            p.normalization = parse_label_normalization(doc.at("normalization").get<std::string>());
        }
        if (doc.contains("parallelism")) p.parallelism = doc.at("parallelism").get<int>();
        if (doc.contains("backends")) {
            const auto& b = doc.at("backends");
            reject_unknown(b, {"segmenter", "proposer", "detector"}, "backends");
            if (b.contains("segmenter")) {
                config.segmenter = parse_endpoint(BackendRole::Segmenter, b.at("segmenter"), base_dir,
                                                  config.segmenter);
            }
            if (b.contains("proposer")) {
                config.proposer = parse_endpoint(BackendRole::Proposer, b.at("proposer"), base_dir,
                                                 config.proposer);
            }
            if (b.contains("detector")) {
                config.detector = parse_endpoint(BackendRole::Detector, b.at("detector"), base_dir,
                                                 config.detector);
            }
        }
        p.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

RunConfig load_run_config(const fs::path& file, RunConfig base) {
    json doc;
    try {
        doc = json::parse(read_file_text(file));
    } catch (const json::parse_error& e) {
        throw ConfigError(file.string() + ": " + e.what());
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
    apply_config_json(base, doc, file.parent_path());
    return base;
}

json config_snapshot(const RunConfig& config) {
    const auto& p = config.pipeline;
    json j = {{"mode", to_string(p.mode)},
              {"fill", {p.fill.r, p.fill.g, p.fill.b}},
              {"base_tau", p.base_tau},
              {"containment", p.containment.to_string()},
              {"prompt", {{"task", p.prompt.task_text}, {"addendum", p.prompt.addendum}}},
              {"normalization", to_string(p.normalization)},
              {"parallelism", p.parallelism}};
    json backends = {{"proposer", endpoint_snapshot(config.proposer)},
                     {"detector", endpoint_snapshot(config.detector)}};
    if (config.segmenter) {
        backends["segmenter"] = endpoint_snapshot(*config.segmenter);
    }
    j["backends"] = std::move(backends);
    return j;
}

}  // namespace focus
