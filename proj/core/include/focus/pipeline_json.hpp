#pragma once

#include "focus/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace focus {

inline constexpr const char* kPipelineResultSchema = "focus.pipeline_result/1";

struct ResultJsonOptions {
    /// Stage timings vary from run to run; leave them out for golden files.
    bool include_timings = true;
    /// Relative path of the persisted attended PNG, if any.
    std::string attended_path;
};

/// Versioned document; see schemas/pipeline_result.schema.json.
[[nodiscard]] nlohmann::json to_json(const PipelineResult& result, const ResultJsonOptions& options = {});

[[nodiscard]] nlohmann::json to_json(const CaseFailure& failure);

[[nodiscard]] nlohmann::json box_json(const BBox& box);

}  // namespace focus
