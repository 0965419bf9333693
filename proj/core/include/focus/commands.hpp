#pragma once

#include "focus/bbox.hpp"
#include "focus/config.hpp"
#include "focus/errors.hpp"
#include "focus/evaluation.hpp"
#include "focus/isolation.hpp"
#include "focus/pipeline.hpp"
#include "focus/workspace.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace focus {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitInput = 2,
    kExitSegmenter = 3,
    kExitProposer = 4,
    kExitDetector = 5,
    kExitAnnotation = 6,
    kExitBind = 7,
};

[[nodiscard]] int exit_code_for(Stage stage) noexcept;

/// Maps any exception escaping a command onto an exit code.
[[nodiscard]] int exit_code_for(const std::exception_ptr& error) noexcept;

/// "x0,y0,x1,y1" with optional surrounding whitespace. Throws
/// std::invalid_argument for anything but four integers and
/// InvalidBoxError for a degenerate box.
[[nodiscard]] BBox parse_box(std::string_view text);

/// Command-line values that take precedence over the config file.
struct ConfigOverrides {
    std::optional<IsolationMode> mode;
    std::optional<std::filesystem::path> prompt_file;
    std::optional<int> parallelism;
    std::optional<ContainmentPolicy> containment;
    std::optional<double> base_tau;
    std::optional<LabelNormalization> normalization;
};

/// flags > config file > defaults (mock backends over <workspace>/fixtures).
/// Throws ConfigError.
[[nodiscard]] RunConfig resolve_run_config(const Workspace& workspace,
                                           const std::optional<std::filesystem::path>& config_file,
                                           const ConfigOverrides& overrides);

struct RunRequest {
    std::filesystem::path image;
    std::string box;
    std::optional<std::filesystem::path> config_file;
    ConfigOverrides overrides;
    Variant variant = Variant::Focus;
    /// Fixture key; defaults to the image file stem.
    std::optional<std::string> subject;
    /// Defaults to a digest of the inputs, so identical runs share an id.
    std::optional<std::string> run_id;
};

/// Runs one image, writes results/<run_id>.json and attended/<run_id>.png
/// and prints the result document to `out`.
int cmd_run(const Workspace& workspace, const RunRequest& request, std::ostream& out,
            std::ostream& err);

enum class EvalVariants { Focus, Baseline, Both };
[[nodiscard]] EvalVariants parse_eval_variants(std::string_view text);

struct EvalRequest {
    std::string dataset = "coco";  ///< "coco" or "voc"
    std::filesystem::path annotations;
    /// Defaults: {"person"} for coco, {"car"} for voc.
    std::set<std::string> targets;
    std::optional<std::filesystem::path> image_root;
    std::optional<std::string> task;
    std::optional<std::filesystem::path> config_file;
    ConfigOverrides overrides;
    EvalVariants variants = EvalVariants::Both;
    std::string report_name = "eval";
    Aggregation aggregation = Aggregation::Macro;
    std::size_t min_count = 3;
    std::size_t top_k = 10;
};

/// Ingests, batch-runs and writes reports/<report_name>/:
///
///   sweep.csv  sweep.json  difficulty.csv  matches.jsonl  results.jsonl
///   discrepancy.json (both variants only)  summary.json
///
/// Reports appear all at once or not at all. Cases that failed under any
/// variant are excluded from scoring and listed in summary.json; the exit
/// code is nonzero only when no case survived.
int cmd_eval(const Workspace& workspace, const EvalRequest& request, std::ostream& out,
             std::ostream& err);

/// Generates the synthetic corpus under `out_dir` (relative to the
/// workspace root).
int cmd_mock_fixtures(const Workspace& workspace, std::uint64_t seed,
                      const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);

}  // namespace focus
