#pragma once

#include "focus/evaluation.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace focus {

/// Header "method,task,cutoff,f1,n"; cutoffs in shortest form, F1 with six
/// decimals. Rows grouped by difficulty gain a difficulty column after task.
[[nodiscard]] std::string sweep_csv(const SweepTable& table);
[[nodiscard]] nlohmann::json sweep_json(const SweepTable& table);

/// One JSON-lines record per (method, case, cutoff).
[[nodiscard]] std::string match_reports_jsonl(std::span<const MethodResults> methods,
                                              std::span<const double> cutoffs,
                                              LabelNormalization level = LabelNormalization::Exact);

[[nodiscard]] nlohmann::json discrepancy_json(std::span<const DiscrepancyEntry> entries,
                                              std::size_t min_count, std::size_t k);

}  // namespace focus
