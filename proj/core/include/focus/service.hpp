#pragma once

#include "focus/bbox.hpp"
#include "focus/config.hpp"
#include "focus/isolation.hpp"
#include "focus/proposal.hpp"
#include "focus/workspace.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace focus {

enum class RunStatus { Pending, Running, Done, Failed };
[[nodiscard]] std::string_view to_string(RunStatus status);
[[nodiscard]] RunStatus parse_run_status(std::string_view text);

struct RunError {
    std::string stage;
    std::string kind;
    std::string message;
};

/// Persisted as runs/<run_id>/manifest.json on every status change.
struct RunManifest {
    std::string run_id;
    std::optional<std::string> parent_run_id;
    nlohmann::json config;
    std::string created_at;  ///< ISO 8601, UTC
    RunStatus status = RunStatus::Pending;
    std::string result_path;  ///< relative to the workspace root; set when Done
    std::string image_id;
    std::string subject;
    std::array<int, 4> box{};
    std::string variant;
    std::optional<std::vector<std::string>> proposal_override;
    std::optional<RunError> error;
};

[[nodiscard]] nlohmann::json to_json(const RunManifest& manifest);
[[nodiscard]] RunManifest manifest_from_json(const nlohmann::json& j);

struct ImageRecord {
    std::string image_id;
    std::string file;  ///< relative to the workspace images directory
    int width = 0;
    int height = 0;
    std::size_t bytes = 0;
};

/// One field-level validation problem in a request.
struct FieldError {
    std::string field;
    std::string message;
};

class RequestError : public Error {
public:
    explicit RequestError(std::vector<FieldError> errors);
    RequestError(std::string field, std::string message);
    [[nodiscard]] const std::vector<FieldError>& errors() const noexcept { return errors_; }

private:
    std::vector<FieldError> errors_;
};

/// A validated run request.
struct RunSubmission {
    std::string image_id;
    BBox box;
    std::optional<TaskPrompt> prompt;
    std::optional<IsolationMode> mode;
    Variant variant = Variant::Focus;
    /// Fixture key for mock backends; defaults to the image id.
    std::optional<std::string> subject;
    std::optional<std::vector<std::string>> proposal_override;
    std::optional<std::string> parent_run_id;
};

/// Executes runs asynchronously on a bounded worker pool (size taken from
/// the base config's parallelism). All artifacts live in the workspace:
///
///   images/<image_id>.<png|jpg>
///   runs/<run_id>/{manifest.json, result.json, attended.png}
///
/// Manifests left Pending or Running by an earlier process are marked
/// Failed when the service starts.
class RunService {
public:
    RunService(Workspace workspace, RunConfig base);
    ~RunService();
    RunService(const RunService&) = delete;
    RunService& operator=(const RunService&) = delete;

    [[nodiscard]] const Workspace& workspace() const noexcept { return workspace_; }

    /// Decodes to validate, then stores under a content-derived id.
    /// Throws RequestError if the bytes are not a PNG or JPEG image.
    ImageRecord add_image(std::span<const std::uint8_t> bytes);
    [[nodiscard]] std::vector<ImageRecord> images() const;
    [[nodiscard]] std::optional<ImageRecord> image(const std::string& image_id) const;
    [[nodiscard]] std::optional<std::vector<std::uint8_t>> image_bytes(const std::string& image_id) const;

    /// Parses a POST /api/runs body. Throws RequestError.
    RunSubmission parse_submission(const nlohmann::json& body);
    /// Throws RequestError for an unknown image or a box outside it.
    std::string submit(RunSubmission submission);

    enum class RerunOutcome { Submitted, NotFound, NotDone, Invalid };
    struct Rerun {
        RerunOutcome outcome;
        std::string run_id;  ///< the new run when Submitted
        std::vector<FieldError> errors;
    };
    Rerun rerun(const std::string& run_id, const nlohmann::json& body);

    [[nodiscard]] std::optional<RunManifest> manifest(const std::string& run_id) const;
    [[nodiscard]] std::vector<RunManifest> manifests() const;
    /// The stored result document of a Done run.
    [[nodiscard]] std::optional<nlohmann::json> result(const std::string& run_id) const;
    [[nodiscard]] std::optional<std::vector<std::uint8_t>> attended_png(const std::string& run_id) const;

    enum class DeleteOutcome { Deleted, NotFound, Active };
    DeleteOutcome remove(const std::string& run_id);

    /// Blocks until no run is Pending or Running, or the timeout passes.
    bool wait_idle(std::chrono::milliseconds timeout) const;

    /// Stops accepting work. Pending runs are marked Failed; running ones
    /// finish. Idempotent.
    void shutdown();

private:
    void worker_loop(std::stop_token stop);
    void execute(const std::string& run_id);
    void persist(const RunManifest& manifest) const;
    void load_existing();
    std::string allocate_run_id();
    // Caller holds mutex_.
    void mark_locked(const std::string& run_id, RunStatus status, std::optional<RunError> error = {},
                     std::string result_path = {});
    [[nodiscard]] bool busy_locked() const;

    Workspace workspace_;
    RunConfig base_;
    BackendSet backends_;

    mutable std::mutex mutex_;
    mutable std::condition_variable_any changed_;
    std::map<std::string, RunManifest> runs_;
    std::map<std::string, ImageRecord> images_;
    std::map<std::string, RunSubmission> jobs_;
    std::deque<std::string> queue_;
    std::uint64_t next_seq_ = 1;
    bool accepting_ = true;
    std::vector<std::jthread> workers_;
};

/// HTTP front end over a RunService. JSON everywhere except image routes.
class ApiServer {
public:
    explicit ApiServer(RunService& service, std::optional<std::filesystem::path> static_dir = {});
    ~ApiServer();
    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /// Port 0 picks a free port. Returns false if binding fails.
    bool bind(const std::string& host, int port);
    [[nodiscard]] int port() const noexcept { return port_; }
    /// Blocks until stop() is called.
    void serve();
    void stop();
    /// Blocks until serve() is accepting connections.
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
};

struct ServeOptions {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::optional<std::filesystem::path> static_dir;
};

/// Serves until SIGINT/SIGTERM. Returns kExitBind if the port cannot be
/// bound.
int cmd_serve(const Workspace& workspace, const RunConfig& config, const ServeOptions& options,
              std::ostream& out, std::ostream& err);

}  // namespace focus
