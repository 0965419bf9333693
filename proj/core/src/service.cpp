#include "focus/service.hpp"

#include "focus/codec.hpp"
#include "focus/commands.hpp"
#include "focus/image_io.hpp"
#include "focus/mock_backend.hpp"
#include "focus/pipeline_json.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <httplib.h>

#include <atomic>
#include <csignal>
#include <fstream>
#include <ostream>

namespace focus {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Pending: return "Pending";
        case RunStatus::Running: return "Running";
        case RunStatus::Done: return "Done";
        case RunStatus::Failed: return "Failed";
    }
    return "?";
}

RunStatus parse_run_status(std::string_view text) {
    for (auto s : {RunStatus::Pending, RunStatus::Running, RunStatus::Done, RunStatus::Failed}) {
        if (to_string(s) == text) return s;
    }
    throw std::invalid_argument(fmt::format("unknown run status '{}'", text));
}

json to_json(const RunManifest& m) {
    json j = {{"run_id", m.run_id},
              {"parent_run_id", m.parent_run_id ? json(*m.parent_run_id) : json(nullptr)},
              {"config", m.config},
              {"created_at", m.created_at},
              {"status", to_string(m.status)},
              {"result_path", m.result_path},
              {"image_id", m.image_id},
              {"subject", m.subject},
              {"box", m.box},
              {"variant", m.variant},
              {"proposal_override", m.proposal_override ? json(*m.proposal_override) : json(nullptr)},
              {"error", nullptr}};
    if (m.error) {
        j["error"] = {{"stage", m.error->stage}, {"kind", m.error->kind}, {"message", m.error->message}};
    }
    return j;
}

RunManifest manifest_from_json(const json& j) {
    RunManifest m;
    m.run_id = j.at("run_id").get<std::string>();
    if (!j.at("parent_run_id").is_null()) m.parent_run_id = j.at("parent_run_id").get<std::string>();
    m.config = j.at("config");
    m.created_at = j.at("created_at").get<std::string>();
    m.status = parse_run_status(j.at("status").get<std::string>());
    m.result_path = j.at("result_path").get<std::string>();
    m.image_id = j.at("image_id").get<std::string>();
    m.subject = j.at("subject").get<std::string>();
    m.box = j.at("box").get<std::array<int, 4>>();
    m.variant = j.at("variant").get<std::string>();
    if (!j.at("proposal_override").is_null()) {
        m.proposal_override = j.at("proposal_override").get<std::vector<std::string>>();
    }
    if (!j.at("error").is_null()) {
        const auto& e = j.at("error");
        m.error = RunError{e.at("stage").get<std::string>(), e.at("kind").get<std::string>(),
                           e.at("message").get<std::string>()};
    }
    return m;
}

namespace {

std::string join_messages(const std::vector<FieldError>& errors) {
    std::string out;
    for (const auto& e : errors) {
        out += (out.empty() ? "" : "; ") + e.field + ": " + e.message;
    }
    return out;
}

std::string utc_now() {
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::time(nullptr)));
}

bool is_png(std::span<const std::uint8_t> b) { return b.size() >= 8 && b[0] == 0x89 && b[1] == 'P'; }

ImageRecord record_for(const std::string& id, const std::string& file, const RasterImage& img,
                       std::size_t bytes) {
    return {id, file, img.width(), img.height(), bytes};
}

json image_json(const ImageRecord& r) {
    return {{"image_id", r.image_id}, {"width", r.width}, {"height", r.height}, {"bytes", r.bytes}};
}

PipelineConfig run_pipeline_config(PipelineConfig base, const RunSubmission& s) {
    if (s.mode) base.mode = *s.mode;
    if (s.prompt) base.prompt = *s.prompt;
    return base;
}

json run_config_snapshot(const RunConfig& base, const RunSubmission& s) {
    RunConfig c = base;
    c.pipeline = run_pipeline_config(base.pipeline, s);
    auto j = config_snapshot(c);
    j.erase("parallelism");
    return j;
}

}  // namespace

RequestError::RequestError(std::vector<FieldError> errors)
    : Error(join_messages(errors)), errors_(std::move(errors)) {}

RequestError::RequestError(std::string field, std::string message)
    : RequestError(std::vector<FieldError>{{std::move(field), std::move(message)}}) {}

RunService::RunService(Workspace workspace, RunConfig base)
    : workspace_(std::move(workspace)), base_(std::move(base)), backends_(base_.make_backends()) {
    base_.pipeline.validate();
    load_existing();
    const int n = std::max(1, base_.pipeline.parallelism);
    for (int i = 0; i < n; ++i) {
        workers_.emplace_back([this](std::stop_token stop) { worker_loop(stop); });
    }
}

RunService::~RunService() { shutdown(); }

void RunService::load_existing() {
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(workspace_.images(), ec)) {
        const auto ext = entry.path().extension();
        if (ext != ".png" && ext != ".jpg") continue;
        try {
            const auto bytes = read_file_bytes(entry.path());
            const auto id = entry.path().stem().string();
            images_.emplace(id, record_for(id, entry.path().filename().string(), decode_image(bytes), bytes.size()));
        } catch (const std::exception&) {
            // Not ours; leave it alone.
        }
    }
    for (const auto& entry : fs::directory_iterator(workspace_.runs(), ec)) {
        const auto file = entry.path() / "manifest.json";
        if (!fs::exists(file)) continue;
        try {
            auto m = manifest_from_json(json::parse(read_file_text(file)));
            if (m.status == RunStatus::Pending || m.status == RunStatus::Running) {
                m.status = RunStatus::Failed;
                m.error = RunError{"service", "Interrupted", "service stopped before the run finished"};
                persist(m);
            }
            unsigned long long seq = 0;
            if (std::sscanf(m.run_id.c_str(), "run-%llu", &seq) == 1) {
                next_seq_ = std::max<std::uint64_t>(next_seq_, seq + 1);
            }
            runs_.emplace(m.run_id, std::move(m));
        } catch (const std::exception&) {
            // Unreadable manifests are skipped, not repaired.
        }
    }
}

ImageRecord RunService::add_image(std::span<const std::uint8_t> bytes) {
    RasterImage img = [&] {
        try {
            return decode_image(bytes);
        } catch (const std::exception& e) {
            throw RequestError("image", fmt::format("not a PNG or JPEG image ({})", e.what()));
        }
    }();
    const auto id = "img-" + sha256_hex(bytes).substr(0, 16);
    const auto file = id + (is_png(bytes) ? ".png" : ".jpg");
    std::lock_guard lock(mutex_);
    if (auto it = images_.find(id); it != images_.end()) {
        return it->second;
    }
    workspace_.write_bytes(workspace_.images() / file, bytes);
    return images_.emplace(id, record_for(id, file, img, bytes.size())).first->second;
}

std::vector<ImageRecord> RunService::images() const {
    std::lock_guard lock(mutex_);
    std::vector<ImageRecord> out;
    for (const auto& [_, r] : images_) out.push_back(r);
    return out;
}

std::optional<ImageRecord> RunService::image(const std::string& image_id) const {
    std::lock_guard lock(mutex_);
    if (auto it = images_.find(image_id); it != images_.end()) return it->second;
    return std::nullopt;
}

std::optional<std::vector<std::uint8_t>> RunService::image_bytes(const std::string& image_id) const {
    const auto record = image(image_id);
    if (!record) return std::nullopt;
    return read_file_bytes(workspace_.images() / record->file);
}

RunSubmission RunService::parse_submission(const json& body) {
    if (!body.is_object()) {
        throw RequestError("body", "expected a JSON object");
    }
    std::vector<FieldError> errors;
    std::optional<ImageRecord> record;
    if (body.contains("image_id")) {
        if (!body["image_id"].is_string()) {
            errors.push_back({"image_id", "must be a string"});
        } else if (!(record = image(body["image_id"].get<std::string>()))) {
            errors.push_back({"image_id", "unknown image"});
        }
    } else if (body.contains("image_png_b64")) {
        try {
            if (!body["image_png_b64"].is_string()) throw ProtocolError("must be a base64 string");
            record = add_image(base64_decode(body["image_png_b64"].get<std::string>()));
        } catch (const RequestError& e) {
            errors.push_back({"image_png_b64", e.errors().front().message});
        } catch (const std::exception& e) {
            errors.push_back({"image_png_b64", e.what()});
        }
    } else {
        errors.push_back({"image_id", "one of image_id or image_png_b64 is required"});
    }

    std::optional<BBox> box;
    if (!body.contains("box")) {
        errors.push_back({"box", "required"});
    } else {
        try {
            const auto& b = body["box"];
            if (b.is_string()) {
                box = parse_box(b.get<std::string>());
            } else if (b.is_array() && b.size() == 4 && std::all_of(b.begin(), b.end(), [](const json& v) {
                           return v.is_number_integer();
                       })) {
                box = BBox(b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>());
            } else {
                throw std::invalid_argument("expected [x_min, y_min, x_max, y_max] integers");
            }
            if (record) box->require_within(record->width, record->height);
        } catch (const std::exception& e) {
            errors.push_back({"box", e.what()});
        }
    }

    RunSubmission s{record ? record->image_id : std::string{}, box.value_or(BBox(0, 0, 1, 1)), {}, {}, Variant::Focus,
                    {}, {}, {}};
    if (body.contains("prompt") && !body["prompt"].is_null()) {
        const auto& p = body["prompt"];
        if (!p.is_object() || !p.contains("task") || !p["task"].is_string()) {
            errors.push_back({"prompt.task", "required string"});
        } else {
            TaskPrompt prompt{p["task"].get<std::string>(), {}};
            if (p.contains("addendum")) {
                if (p["addendum"].is_string()) {
                    prompt.addendum = p["addendum"].get<std::string>();
                } else {
                    errors.push_back({"prompt.addendum", "must be a string"});
                }
            }
            if (prompt.task_text.find_first_not_of(" \t\r\n") == std::string::npos) {
                errors.push_back({"prompt.task", "must not be empty"});
            }
            s.prompt = std::move(prompt);
        }
    }
    auto parse_field = [&](const char* field, auto&& fn) {
        if (!body.contains(field) || body[field].is_null()) return;
        try {
            if (!body[field].is_string()) throw std::invalid_argument("must be a string");
            fn(body[field].get<std::string>());
        } catch (const std::exception& e) {
            errors.push_back({field, e.what()});
        }
    };
    parse_field("mode", [&](const std::string& v) { s.mode = parse_isolation_mode(v); });
    parse_field("variant", [&](const std::string& v) { s.variant = parse_variant(v); });
    parse_field("subject", [&](const std::string& v) {
        require_safe_subject(v);
        s.subject = v;
    });
    if (!errors.empty()) {
        throw RequestError(std::move(errors));
    }
    return s;
}

bool RunService::busy_locked() const {
    return std::any_of(runs_.begin(), runs_.end(), [](const auto& kv) {
        return kv.second.status == RunStatus::Pending || kv.second.status == RunStatus::Running;
    });
}

std::string RunService::allocate_run_id() {
    for (;;) {
        const auto id = fmt::format("run-{:06}", next_seq_++);
        if (runs_.contains(id)) continue;
        std::error_code ec;
        if (fs::create_directories(workspace_.runs() / id, ec)) return id;
        if (ec) throw WorkspaceError(fmt::format("cannot create run directory: {}", ec.message()));
    }
}

std::string RunService::submit(RunSubmission s) {
    const auto record = image(s.image_id);
    if (!record) {
        throw RequestError("image_id", "unknown image");
    }
    try {
        s.box.require_within(record->width, record->height);
    } catch (const std::exception& e) {
        throw RequestError("box", e.what());
    }
    std::unique_lock lock(mutex_);
    if (!accepting_) {
        throw Error("service is shutting down");
    }
    RunManifest m;
    m.run_id = allocate_run_id();
    m.parent_run_id = s.parent_run_id;
    m.config = run_config_snapshot(base_, s);
    m.created_at = utc_now();
    m.image_id = s.image_id;
    m.subject = s.subject.value_or(s.image_id);
    m.box = {s.box.x_min(), s.box.y_min(), s.box.x_max(), s.box.y_max()};
    m.variant = std::string(to_string(s.variant));
    m.proposal_override = s.proposal_override;
    persist(m);
    const auto id = m.run_id;
    runs_.emplace(id, std::move(m));
    jobs_.emplace(id, std::move(s));
    queue_.push_back(id);
    lock.unlock();
    changed_.notify_all();
    return id;
}

RunService::Rerun RunService::rerun(const std::string& run_id, const json& body) {
    const auto parent = manifest(run_id);
    if (!parent) return {RerunOutcome::NotFound, {}, {}};
    if (parent->status != RunStatus::Done) {
        return {RerunOutcome::NotDone, {}, {{"run_id", "source run is not Done"}}};
    }
    std::vector<std::string> labels;
    if (!body.is_object() || !body.contains("proposal_override") || !body["proposal_override"].is_array()) {
        return {RerunOutcome::Invalid, {}, {{"proposal_override", "required array of labels"}}};
    }
    for (const auto& v : body["proposal_override"]) {
        if (!v.is_string()) {
            return {RerunOutcome::Invalid, {}, {{"proposal_override", "labels must be strings"}}};
        }
        labels.push_back(v.get<std::string>());
    }
    try {
        labels = ProposalList::from_labels(labels, base_.pipeline.normalization).labels();
    } catch (const std::exception& e) {
        return {RerunOutcome::Invalid, {}, {{"proposal_override", e.what()}}};
    }

    RunSubmission s{parent->image_id,
                    BBox(parent->box[0], parent->box[1], parent->box[2], parent->box[3]),
                    TaskPrompt{parent->config.at("prompt").at("task").get<std::string>(),
                               parent->config.at("prompt").at("addendum").get<std::string>()},
                    parse_isolation_mode(parent->config.at("mode").get<std::string>()),
                    parse_variant(parent->variant),
                    parent->subject,
                    std::move(labels),
                    parent->run_id};
    try {
        return {RerunOutcome::Submitted, submit(std::move(s)), {}};
    } catch (const RequestError& e) {
        return {RerunOutcome::Invalid, {}, e.errors()};
    }
}

std::optional<RunManifest> RunService::manifest(const std::string& run_id) const {
    std::lock_guard lock(mutex_);
    if (auto it = runs_.find(run_id); it != runs_.end()) return it->second;
    return std::nullopt;
}

std::vector<RunManifest> RunService::manifests() const {
    std::lock_guard lock(mutex_);
    std::vector<RunManifest> out;
    for (const auto& [_, m] : runs_) out.push_back(m);
    return out;
}

std::optional<json> RunService::result(const std::string& run_id) const {
    const auto m = manifest(run_id);
    if (!m || m->status != RunStatus::Done) return std::nullopt;
    return json::parse(read_file_text(workspace_.root() / m->result_path));
}

std::optional<std::vector<std::uint8_t>> RunService::attended_png(const std::string& run_id) const {
    const auto m = manifest(run_id);
    if (!m || m->status != RunStatus::Done) return std::nullopt;
    return read_file_bytes(workspace_.runs() / run_id / "attended.png");
}

RunService::DeleteOutcome RunService::remove(const std::string& run_id) {
    std::lock_guard lock(mutex_);
    auto it = runs_.find(run_id);
    if (it == runs_.end()) return DeleteOutcome::NotFound;
    if (it->second.status == RunStatus::Pending || it->second.status == RunStatus::Running) {
        return DeleteOutcome::Active;
    }
    runs_.erase(it);
    std::error_code ec;
    fs::remove_all(workspace_.runs() / run_id, ec);
    return DeleteOutcome::Deleted;
}

bool RunService::wait_idle(std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mutex_);
    return changed_.wait_for(lock, timeout, [&] { return !busy_locked(); });
}

void RunService::shutdown() {
    {
        std::lock_guard lock(mutex_);
        if (!accepting_ && workers_.empty()) return;
        accepting_ = false;
        for (const auto& id : queue_) {
            mark_locked(id, RunStatus::Failed,
                        RunError{"service", "Shutdown", "service shut down before the run started"});
            jobs_.erase(id);
        }
        queue_.clear();
    }
    changed_.notify_all();
    for (auto& w : workers_) w.request_stop();
    workers_.clear();  // joins; running jobs finish first
}

void RunService::worker_loop(std::stop_token stop) {
    for (;;) {
        std::string id;
        {
            std::unique_lock lock(mutex_);
            if (!changed_.wait(lock, stop, [&] { return !queue_.empty(); })) return;
            id = queue_.front();
            queue_.pop_front();
            mark_locked(id, RunStatus::Running);
        }
        changed_.notify_all();
        execute(id);
        changed_.notify_all();
    }
}

void RunService::execute(const std::string& run_id) {
    RunSubmission job = [&] {
        std::lock_guard lock(mutex_);
        auto node = jobs_.extract(run_id);
        return std::move(node.mapped());
    }();
    const auto subject = job.subject.value_or(job.image_id);
    try {
        const Pipeline pipeline(run_pipeline_config(base_.pipeline, job), backends_);
        const auto record = image(job.image_id);
        if (!record) throw Error("image disappeared: " + job.image_id);
        const auto img = read_image(workspace_.images() / record->file);
        auto result = [&] {
            if (job.proposal_override) {
                const auto labels = ProposalList::from_labels(*job.proposal_override, base_.pipeline.normalization);
                return job.variant == Variant::Focus ? pipeline.run_with_labels(img, job.box, labels, subject)
                                                     : pipeline.run_baseline(img, job.box, labels, subject);
            }
            return job.variant == Variant::Focus ? pipeline.run(img, job.box, subject)
                                                 : pipeline.run_baseline(img, job.box, subject);
        }();
        const auto dir = workspace_.runs() / run_id;
        const auto attended_rel = fs::path("runs") / run_id / "attended.png";
        const auto result_rel = fs::path("runs") / run_id / "result.json";
        workspace_.write_bytes(dir / "attended.png", encode_png(result.attended->image));
        auto doc = to_json(result, {.include_timings = true, .attended_path = attended_rel.generic_string()});
        doc["run_id"] = run_id;
        workspace_.write_text(dir / "result.json", doc.dump(2) + "\n");
        std::lock_guard lock(mutex_);
        mark_locked(run_id, RunStatus::Done, std::nullopt, result_rel.generic_string());
    } catch (const StageError& e) {
        std::lock_guard lock(mutex_);
        mark_locked(run_id, RunStatus::Failed, RunError{std::string(to_string(e.stage())), e.kind(), e.what()});
    } catch (const std::exception& e) {
        std::lock_guard lock(mutex_);
        mark_locked(run_id, RunStatus::Failed,
                    RunError{"input", error_kind(std::current_exception()), e.what()});
    }
}

void RunService::mark_locked(const std::string& run_id, RunStatus status, std::optional<RunError> error,
                             std::string result_path) {
    auto& m = runs_.at(run_id);
    m.status = status;
    m.error = std::move(error);
    if (!result_path.empty()) m.result_path = std::move(result_path);
    try {
        persist(m);
    } catch (const std::exception&) {
        // The in-memory manifest stays authoritative for this process.
    }
}

void RunService::persist(const RunManifest& m) const {
    const auto dir = workspace_.runs() / m.run_id;
    const auto tmp = dir / "manifest.json.tmp";
    workspace_.write_text(tmp, to_json(m).dump(2) + "\n");
    fs::rename(tmp, dir / "manifest.json");
}

// --- HTTP -----------------------------------------------------------------

struct ApiServer::Impl {
    RunService& service;
    httplib::Server server;

    explicit Impl(RunService& s) : service(s) {}
};

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message,
                const std::vector<FieldError>& fields = {}) {
    json errors = json::array();
    for (const auto& f : fields) errors.push_back({{"field", f.field}, {"message", f.message}});
    send_json(res, status, {{"error", message}, {"errors", errors}});
}

std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
    try {
        return json::parse(req.body);
    } catch (const json::parse_error& e) {
        send_error(res, 400, std::string("malformed JSON: ") + e.what());
        return std::nullopt;
    }
}

json run_document(const RunService& service, const RunManifest& m) {
    json doc = to_json(m);
    if (m.status == RunStatus::Done) {
        doc["result"] = service.result(m.run_id).value_or(json(nullptr));
    }
    return doc;
}

}  // namespace

ApiServer::ApiServer(RunService& service, std::optional<fs::path> static_dir)
    : impl_(std::make_unique<Impl>(service)) {
    auto& svr = impl_->server;
    auto& svc = impl_->service;
    constexpr const char* kRun = R"(/api/runs/([A-Za-z0-9_.-]+))";

    svr.Post("/api/runs", [&svc](const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req, res);
        if (!body) return;
        try {
            const auto id = svc.submit(svc.parse_submission(*body));
            res.set_header("Location", "/api/runs/" + id);
            send_json(res, 202, {{"run_id", id}, {"status", "Pending"}});
        } catch (const RequestError& e) {
            send_error(res, 422, "invalid run request", e.errors());
        } catch (const std::exception& e) {
            send_error(res, 503, e.what());
        }
    });
    svr.Get("/api/runs", [&svc](const httplib::Request&, httplib::Response& res) {
        json runs = json::array();
        for (const auto& m : svc.manifests()) runs.push_back(to_json(m));
        send_json(res, 200, {{"runs", runs}});
    });
    svr.Get(kRun, [&svc](const httplib::Request& req, httplib::Response& res) {
        const auto m = svc.manifest(req.matches[1]);
        if (!m) return send_error(res, 404, "unknown run");
        send_json(res, 200, run_document(svc, *m));
    });
    svr.Get(std::string(kRun) + "/attended.png", [&svc](const httplib::Request& req, httplib::Response& res) {
        const auto png = svc.attended_png(req.matches[1]);
        if (!png) return send_error(res, 404, "no attended image for this run");
        res.set_content(std::string(png->begin(), png->end()), "image/png");
    });
    svr.Post(std::string(kRun) + "/rerun", [&svc](const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req, res);
        if (!body) return;
        const auto r = svc.rerun(req.matches[1], *body);
        switch (r.outcome) {
            case RunService::RerunOutcome::Submitted:
                res.set_header("Location", "/api/runs/" + r.run_id);
                return send_json(res, 202, {{"run_id", r.run_id}, {"status", "Pending"},
                                            {"parent_run_id", req.matches[1].str()}});
            case RunService::RerunOutcome::NotFound: return send_error(res, 404, "unknown run");
            case RunService::RerunOutcome::NotDone: return send_error(res, 409, "source run is not Done", r.errors);
            case RunService::RerunOutcome::Invalid: return send_error(res, 422, "invalid rerun request", r.errors);
        }
    });
    svr.Delete(kRun, [&svc](const httplib::Request& req, httplib::Response& res) {
        switch (svc.remove(req.matches[1])) {
            case RunService::DeleteOutcome::Deleted: res.status = 204; return;
            case RunService::DeleteOutcome::NotFound: return send_error(res, 404, "unknown run");
            case RunService::DeleteOutcome::Active: return send_error(res, 409, "run is still active");
        }
    });
    svr.Get("/api/images", [&svc](const httplib::Request&, httplib::Response& res) {
        json images = json::array();
        for (const auto& r : svc.images()) images.push_back(image_json(r));
        send_json(res, 200, {{"images", images}});
    });
    svr.Get(R"(/api/images/([A-Za-z0-9_.-]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
        const auto record = svc.image(req.matches[1]);
        if (!record) return send_error(res, 404, "unknown image");
        const auto bytes = svc.image_bytes(record->image_id);
        res.set_content(std::string(bytes->begin(), bytes->end()),
                        record->file.ends_with(".png") ? "image/png" : "image/jpeg");
    });
    svr.Post("/api/images", [&svc](const httplib::Request& req, httplib::Response& res) {
        std::string content = req.body;
        if (req.is_multipart_form_data()) {
            if (!req.has_file("file")) {
                return send_error(res, 422, "invalid upload", {{"file", "multipart field 'file' is required"}});
            }
            content = req.get_file_value("file").content;
        }
        try {
            const std::vector<std::uint8_t> bytes(content.begin(), content.end());
            send_json(res, 201, image_json(svc.add_image(bytes)));
        } catch (const RequestError& e) {
            send_error(res, 422, "invalid upload", e.errors());
        }
    });
    svr.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    svr.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
    svr.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) {
            send_error(res, res.status, httplib::status_message(res.status));
        }
    });
    svr.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        send_error(res, 500, what);
    });
    if (static_dir) {
        svr.set_mount_point("/", static_dir->string());
    }
}

ApiServer::~ApiServer() { stop(); }

bool ApiServer::bind(const std::string& host, int port) {
    if (port == 0) {
        port_ = impl_->server.bind_to_any_port(host);
        return port_ > 0;
    }
    if (!impl_->server.bind_to_port(host, port)) return false;
    port_ = port;
    return true;
}

void ApiServer::serve() { impl_->server.listen_after_bind(); }
void ApiServer::stop() { impl_->server.stop(); }
void ApiServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

namespace {
std::atomic<int> g_signal{0};
extern "C" void on_signal(int sig) { g_signal.store(sig); }
}  // namespace

int cmd_serve(const Workspace& ws, const RunConfig& config, const ServeOptions& options, std::ostream& out,
              std::ostream& err) {
    std::unique_ptr<RunService> service;
    try {
        service = std::make_unique<RunService>(ws, config);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
    ApiServer server(*service, options.static_dir);
    if (!server.bind(options.host, options.port)) {
        err << fmt::format("error: cannot bind {}:{}\n", options.host, options.port);
        return kExitBind;
    }
    out << fmt::format("listening on http://{}:{} (workspace {})\n", options.host, server.port(),
                       ws.root().string())
        << std::flush;

    g_signal.store(0);
    auto previous_int = std::signal(SIGINT, on_signal);
    auto previous_term = std::signal(SIGTERM, on_signal);
    std::jthread watcher([&server](std::stop_token stop) {
        while (!stop.stop_requested()) {
            if (g_signal.load() != 0) {
                server.stop();
                return;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
    });
    server.serve();
    watcher.request_stop();
    watcher.join();
    out << "shutting down\n" << std::flush;
    service->shutdown();
    std::signal(SIGINT, previous_int);
    std::signal(SIGTERM, previous_term);
    return kExitOk;
}

}  // namespace focus
