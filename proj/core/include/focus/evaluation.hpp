#pragma once

#include "focus/detection.hpp"
#include "focus/eval_case.hpp"
#include "focus/pipeline.hpp"
#include "focus/proposal.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace focus {

/// Score cutoffs reported by default; detectors run once at the base
/// threshold and each cutoff is applied afterwards.
inline constexpr double kDefaultCutoffs[] = {0.2, 0.4, 0.6, 0.8};

/// Recall, precision and F1 of detected labels against the proposal list,
/// which is taken as ground truth. Label sets are sorted.
struct MatchReport {
    double recall = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
    std::vector<std::string> matched;
    std::vector<std::string> missed;
    std::vector<std::string> spurious;
};

/// Set-based match over normalized labels. Detected labels that normalize
/// to nothing are ignored. Precision is 0 when nothing was detected and F1
/// is 0 when recall + precision is 0.
[[nodiscard]] MatchReport match_lists(const ProposalList& proposal,
                                      std::span<const std::string> detected_labels,
                                      LabelNormalization level = LabelNormalization::Exact);

/// Detections with score >= cutoff, order preserved.
[[nodiscard]] std::vector<Detection> filter_by_cutoff(std::span<const Detection> detections,
                                                      double cutoff);

enum class Difficulty { Easy, Medium, Hard };

[[nodiscard]] std::string_view to_string(Difficulty d);

/// Easy for p <= 2, Medium for 3..7, Hard for p >= 8. Throws
/// std::invalid_argument for negative counts.
[[nodiscard]] Difficulty difficulty_of(int person_count);

/// What the harness needs from one successful run.
struct ScoredCase {
    std::string case_id;
    TaskTag task;
    int person_count = 0;
    ProposalList proposal;
    std::vector<Detection> detections;
};

[[nodiscard]] ScoredCase make_scored_case(const EvalCase& c, const PipelineResult& result);

struct MethodResults {
    std::string method;
    std::vector<ScoredCase> cases;
};

enum class Aggregation {
    Macro,  ///< mean of per-image F1
    Micro,  ///< F1 of summed match counts
};

[[nodiscard]] std::string_view to_string(Aggregation a);
[[nodiscard]] Aggregation parse_aggregation(std::string_view text);

struct SweepRow {
    std::string method;
    TaskTag task;
    std::optional<Difficulty> difficulty;
    std::vector<double> f1;  ///< one cell per cutoff
    std::size_t n_images = 0;
};

struct SweepTable {
    std::vector<double> cutoffs;
    Aggregation aggregation = Aggregation::Macro;
    std::vector<SweepRow> rows;

    /// Throws std::out_of_range if the row or cutoff is absent.
    [[nodiscard]] double cell(std::string_view method, const TaskTag& task, double cutoff,
                              std::optional<Difficulty> difficulty = std::nullopt) const;
};

enum class SweepGrouping { Task, TaskAndDifficulty };

/// One row per (method, task[, difficulty]) in method order, then task
/// name, then difficulty. Throws CaseSetMismatchError when the methods do
/// not cover the same case ids.
[[nodiscard]] SweepTable sweep(std::span<const MethodResults> methods,
                               std::span<const double> cutoffs = kDefaultCutoffs,
                               Aggregation aggregation = Aggregation::Macro,
                               SweepGrouping grouping = SweepGrouping::Task,
                               LabelNormalization level = LabelNormalization::Exact);

struct DiscrepancyEntry {
    std::string label;
    double discrepancy = 0.0;  ///< focus_mean - baseline_mean
    double focus_mean = 0.0;
    double baseline_mean = 0.0;
    std::size_t images = 0;
};

/// For every label proposed in at least `min_count` images, compares the
/// mean per-image best detection score (0 when undetected) between focus
/// and baseline runs. Returns the top `k` by discrepancy, ties broken by
/// label. Throws CaseSetMismatchError when the case sets differ.
[[nodiscard]] std::vector<DiscrepancyEntry> discrepancy_report(const MethodResults& baseline,
                                                               const MethodResults& focus,
                                                               std::size_t min_count,
                                                               std::size_t k);

}  // namespace focus
