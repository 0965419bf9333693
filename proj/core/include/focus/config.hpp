#pragma once

#include "focus/backend.hpp"
#include "focus/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>

namespace focus {

/// Everything one run needs: pipeline knobs plus one endpoint per role.
struct RunConfig {
    PipelineConfig pipeline;
    std::optional<BackendEndpointConfig> segmenter;
    BackendEndpointConfig proposer;
    BackendEndpointConfig detector;

    /// Throws ConfigError when a required role is missing or invalid.
    [[nodiscard]] BackendSet make_backends() const;
    [[nodiscard]] Pipeline make_pipeline() const;
};

/// Defaults: segment_mask isolation, black fill, tau 0.1, center_in, the
/// shipped prompt, and mock backends reading `fixture_dir` with rectangle
/// masks.
[[nodiscard]] RunConfig default_run_config(const std::filesystem::path& fixture_dir);

/// Overlays a config document onto `base`. Relative paths inside the
/// document resolve against `base_dir`. Unknown keys are rejected.
///
///   {
///     "mode": "segment_mask", "fill": [0, 0, 0], "base_tau": 0.1,
///     "containment": "center_in" | "fully_inside" | "ioa>=0.6",
///     "prompt": {"task": "...", "addendum": "..."}, "prompt_file": "p.txt",
///     "normalization": "exact" | "fold_plurals", "parallelism": 4,
///     "backends": {
///       "segmenter": {"kind": "mock", "fixtures": "dir", "mask_source": "fixture"},
///       "proposer":  {"kind": "remote", "url": "http://host:port",
///                     "timeout_ms": 30000, "retries": 2, "backoff_ms": 200,
///                     "bearer_token_env": "VLM_TOKEN"},
///       "detector":  {...}
///     }
///   }
///
/// Throws ConfigError.
void apply_config_json(RunConfig& config, const nlohmann::json& doc,
                       const std::filesystem::path& base_dir);

/// Reads a config file and overlays it onto `base`. Throws ConfigError.
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path& file, RunConfig base);

/// Snapshot for manifests and summaries; secrets are not included.
[[nodiscard]] nlohmann::json config_snapshot(const RunConfig& config);

}  // namespace focus
