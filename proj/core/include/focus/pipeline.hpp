#pragma once

#include "focus/backend.hpp"
#include "focus/bbox.hpp"
#include "focus/errors.hpp"
#include "focus/eval_case.hpp"
#include "focus/isolation.hpp"
#include "focus/proposal.hpp"

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace focus {

/// Base detector threshold: low enough that every reported cutoff can be
/// evaluated afterwards by post-filtering a single run.
inline constexpr double kDefaultBaseTau = 0.1;

struct PipelineConfig {
    IsolationMode mode = IsolationMode::SegmentMask;
    Rgb fill = kBlack;
    double base_tau = kDefaultBaseTau;
    /// Applied to baseline runs only.
    ContainmentPolicy containment = ContainmentPolicy::center_in();
    TaskPrompt prompt = default_prompt();
    LabelNormalization normalization = LabelNormalization::Exact;
    int parallelism = 1;

    /// Throws ConfigError.
    void validate() const;
};

struct BackendSet {
    std::shared_ptr<const Segmenter> segmenter;  ///< only needed for SegmentMask
    std::shared_ptr<const Proposer> proposer;
    std::shared_ptr<const Detector> detector;
};

enum class Variant { Focus, Baseline };

std::string_view to_string(Variant variant);
Variant parse_variant(std::string_view text);

/// A contract-checked detection in attended-image coordinates, plus the
/// same box mapped back onto the original image.
struct LocatedDetection {
    Detection detection;
    BBox original_box;

    friend bool operator==(const LocatedDetection&, const LocatedDetection&) = default;
};

struct StageTimings {
    std::chrono::microseconds segment{0};
    std::chrono::microseconds isolate{0};
    std::chrono::microseconds propose{0};
    std::chrono::microseconds detect{0};
};

struct RunDiagnostics {
    std::size_t dropped_detections = 0;   ///< rejected by the detection contract
    std::size_t outside_region = 0;       ///< removed by baseline containment filtering
    int segment_retries = 0;
    int propose_retries = 0;
    int detect_retries = 0;
};

struct PipelineResult {
    std::string image_id;
    Variant variant = Variant::Focus;
    BBox input_box;
    std::shared_ptr<const AttendedImage> attended;
    /// Absent when the labels were supplied instead of proposed.
    std::optional<RawProposal> raw_proposal;
    ProposalList proposal;
    bool labels_reused = false;
    std::vector<LocatedDetection> detections;
    StageTimings timings;
    RunDiagnostics diagnostics;
};

/// Failure of one batch case, attributed to the stage that raised it.
struct CaseFailure {
    Stage stage = Stage::Input;
    std::string kind;
    std::string message;
};

struct CaseOutcome {
    std::string case_id;
    std::variant<PipelineResult, CaseFailure> outcome;

    [[nodiscard]] bool ok() const noexcept { return outcome.index() == 0; }
    [[nodiscard]] const PipelineResult& result() const { return std::get<PipelineResult>(outcome); }
    [[nodiscard]] const CaseFailure& failure() const { return std::get<CaseFailure>(outcome); }
};

/// Labels to reuse for baseline runs, keyed by case id.
using LabelBook = std::map<std::string, ProposalList>;

/// Composes region isolation, proposal and detection over a fixed set of
/// backends. Immutable once built; safe to share between threads.
class Pipeline {
public:
    /// Throws ConfigError for an invalid config or a missing backend.
    Pipeline(PipelineConfig config, BackendSet backends);

    [[nodiscard]] const PipelineConfig& config() const noexcept { return config_; }

    /// Full three-stage run. `subject` keys backend fixtures. Stage errors
    /// are rethrown as StageError; an empty proposal aborts before the
    /// detector is called.
    [[nodiscard]] PipelineResult run(const RasterImage& image, const BBox& box,
                                     const std::string& subject) const;

    /// Detects with `labels` over the isolated region, skipping the proposer.
    [[nodiscard]] PipelineResult run_with_labels(const RasterImage& image, const BBox& box,
                                                 const ProposalList& labels,
                                                 const std::string& subject) const;

    /// Detects with `labels` over the whole image, then keeps detections the
    /// containment policy places inside `box`.
    [[nodiscard]] PipelineResult run_baseline(const RasterImage& image, const BBox& box,
                                              const ProposalList& labels,
                                              const std::string& subject) const;

    /// Baseline run whose labels come from a focus-style proposal over the
    /// isolated region.
    [[nodiscard]] PipelineResult run_baseline(const RasterImage& image, const BBox& box,
                                              const std::string& subject) const;

    /// Runs every case with at most config().parallelism in flight. Outcomes
    /// come back in case order; per-case failures never abort the batch.
    /// For baselines, labels found in `reuse` are used instead of proposing.
    [[nodiscard]] std::vector<CaseOutcome> batch_run(std::span<const EvalCase> cases, Variant variant,
                                                     const LabelBook* reuse = nullptr) const;

private:
    struct Trace {
        StageTimings timings;
        RunDiagnostics diagnostics;
    };
    struct Proposed {
        std::shared_ptr<const AttendedImage> attended;
        RawProposal raw;
        ProposalList list;
    };

    std::shared_ptr<const AttendedImage> isolate(const RasterImage& image, const BBox& box,
                                                 const std::string& subject, Trace& trace) const;
    Proposed propose_stage(const RasterImage& image, const BBox& box, const std::string& subject,
                           Trace& trace) const;
    std::vector<LocatedDetection> detect_stage(const AttendedImage& attended,
                                               const ProposalList& labels,
                                               const std::string& subject, Trace& trace) const;
    PipelineResult baseline_with(const RasterImage& image, const BBox& box, ProposalList labels,
                                 std::optional<RawProposal> raw, bool reused,
                                 const std::string& subject, Trace trace) const;
    CaseOutcome run_case(const EvalCase& c, Variant variant, const LabelBook* reuse) const;

    PipelineConfig config_;
    BackendSet backends_;
};

/// Throws Error naming the violated closure property if the result breaks
/// label closure, threshold closure or attended-bounds containment.
void check_result_invariants(const PipelineResult& result, double base_tau);

}  // namespace focus
