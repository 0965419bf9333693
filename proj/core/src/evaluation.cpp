#include "focus/evaluation.hpp"

#include "focus/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

namespace focus {

namespace {

struct Counts {
    std::size_t matched = 0;
    std::size_t proposed = 0;
    std::size_t detected = 0;
};

double f1_of(double recall, double precision) {
    return recall + precision == 0.0 ? 0.0 : 2.0 * recall * precision / (recall + precision);
}

std::set<std::string> normalized_set(std::span<const std::string> labels, LabelNormalization level) {
    std::set<std::string> out;
    for (const auto& l : labels) {
        if (auto n = try_normalize_label(l, level)) {
            out.insert(*std::move(n));
        }
    }
    return out;
}

std::vector<std::string> labels_of(std::span<const Detection> detections) {
    std::vector<std::string> out;
    out.reserve(detections.size());
    for (const auto& d : detections) {
        out.push_back(d.label);
    }
    return out;
}

void require_same_cases(std::span<const MethodResults> methods) {
    if (methods.empty()) {
        return;
    }
    auto ids = [](const MethodResults& m) {
        std::vector<std::string> v;
        for (const auto& c : m.cases) v.push_back(c.case_id);
        std::sort(v.begin(), v.end());
        return v;
    };
    const auto reference = ids(methods.front());
    for (const auto& m : methods.subspan(1)) {
        if (ids(m) != reference) {
            throw CaseSetMismatchError(fmt::format("method '{}' covers a different case set than '{}'",
                                                   m.method, methods.front().method));
        }
    }
}

}  // namespace

MatchReport match_lists(const ProposalList& proposal, std::span<const std::string> detected_labels,
                        LabelNormalization level) {
    const auto truth = normalized_set(proposal.labels(), level);
    const auto found = normalized_set(detected_labels, level);
    MatchReport r;
    std::set_intersection(truth.begin(), truth.end(), found.begin(), found.end(),
                          std::back_inserter(r.matched));
    std::set_difference(truth.begin(), truth.end(), found.begin(), found.end(),
                        std::back_inserter(r.missed));
    std::set_difference(found.begin(), found.end(), truth.begin(), truth.end(),
                        std::back_inserter(r.spurious));
    const auto hits = static_cast<double>(r.matched.size());
    r.recall = hits / static_cast<double>(truth.size());
    r.precision = found.empty() ? 0.0 : hits / static_cast<double>(found.size());
    r.f1 = f1_of(r.recall, r.precision);
    return r;
}

std::vector<Detection> filter_by_cutoff(std::span<const Detection> detections, double cutoff) {
    std::vector<Detection> out;
    std::copy_if(detections.begin(), detections.end(), std::back_inserter(out),
                 [cutoff](const Detection& d) { return d.score >= cutoff; });
    return out;
}

std::string_view to_string(Difficulty d) {
    switch (d) {
        case Difficulty::Easy: return "easy";
        case Difficulty::Medium: return "medium";
        case Difficulty::Hard: return "hard";
    }
    return "unknown";
}

Difficulty difficulty_of(int person_count) {
    if (person_count < 0) {
        throw std::invalid_argument(fmt::format("person count {} is negative", person_count));
    }
    if (person_count <= 2) return Difficulty::Easy;
    if (person_count <= 7) return Difficulty::Medium;
    return Difficulty::Hard;
}

ScoredCase make_scored_case(const EvalCase& c, const PipelineResult& result) {
    ScoredCase out{c.case_id, c.task, c.person_count, result.proposal, {}};
    out.detections.reserve(result.detections.size());
    for (const auto& d : result.detections) {
        out.detections.push_back(d.detection);
    }
    return out;
}

std::string_view to_string(Aggregation a) {
    return a == Aggregation::Macro ? "macro" : "micro";
}

Aggregation parse_aggregation(std::string_view text) {
    if (text == "macro") return Aggregation::Macro;
    if (text == "micro") return Aggregation::Micro;
    throw std::invalid_argument(fmt::format("unknown aggregation '{}' (expected macro or micro)", text));
}

double SweepTable::cell(std::string_view method, const TaskTag& task, double cutoff,
                        std::optional<Difficulty> difficulty) const {
    const auto col = std::find(cutoffs.begin(), cutoffs.end(), cutoff);
    if (col == cutoffs.end()) {
        throw std::out_of_range(fmt::format("cutoff {} not in table", cutoff));
    }
    for (const auto& row : rows) {
        if (row.method == method && row.task == task && row.difficulty == difficulty) {
            return row.f1[static_cast<std::size_t>(col - cutoffs.begin())];
        }
    }
    throw std::out_of_range(fmt::format("no row for ({}, {})", method, task.name()));
}

SweepTable sweep(std::span<const MethodResults> methods, std::span<const double> cutoffs,
                 Aggregation aggregation, SweepGrouping grouping, LabelNormalization level) {
    require_same_cases(methods);
    SweepTable table;
    table.cutoffs.assign(cutoffs.begin(), cutoffs.end());
    table.aggregation = aggregation;

    using GroupKey = std::tuple<std::string, int>;  // task name, difficulty (-1 when ungrouped)
    for (const auto& method : methods) {
        // Case indices per group, in case order, so the reduction order is fixed.
        std::map<GroupKey, std::vector<std::size_t>> groups;
        std::map<std::string, TaskTag> tags;
        for (std::size_t i = 0; i < method.cases.size(); ++i) {
            const auto& c = method.cases[i];
            const int diff = grouping == SweepGrouping::TaskAndDifficulty
                                 ? static_cast<int>(difficulty_of(c.person_count))
                                 : -1;
            groups[{c.task.name(), diff}].push_back(i);
            tags.emplace(c.task.name(), c.task);
        }
        for (const auto& [key, indices] : groups) {
            SweepRow row{method.method, tags.at(std::get<0>(key)), std::nullopt, {}, indices.size()};
            if (std::get<1>(key) >= 0) {
                row.difficulty = static_cast<Difficulty>(std::get<1>(key));
            }
            for (double cutoff : cutoffs) {
                double sum_f1 = 0.0;
                Counts totals;
                for (auto i : indices) {
                    const auto& c = method.cases[i];
                    const auto kept = filter_by_cutoff(c.detections, cutoff);
                    const auto report = match_lists(c.proposal, labels_of(kept), level);
                    sum_f1 += report.f1;
                    totals.matched += report.matched.size();
                    totals.proposed += report.matched.size() + report.missed.size();
                    totals.detected += report.matched.size() + report.spurious.size();
                }
                if (aggregation == Aggregation::Macro) {
                    row.f1.push_back(indices.empty() ? 0.0 : sum_f1 / static_cast<double>(indices.size()));
                } else {
                    const double r = totals.proposed == 0
                                         ? 0.0
                                         : static_cast<double>(totals.matched) / static_cast<double>(totals.proposed);
                    const double p = totals.detected == 0
                                         ? 0.0
                                         : static_cast<double>(totals.matched) / static_cast<double>(totals.detected);
                    row.f1.push_back(f1_of(r, p));
                }
            }
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

std::vector<DiscrepancyEntry> discrepancy_report(const MethodResults& baseline,
                                                 const MethodResults& focus,
                                                 std::size_t min_count, std::size_t k) {
    const MethodResults pair[] = {baseline, focus};
    require_same_cases(pair);

    std::map<std::string, const ScoredCase*> baseline_by_id;
    for (const auto& c : baseline.cases) {
        baseline_by_id.emplace(c.case_id, &c);
    }
    auto best_score = [](const ScoredCase& c, const std::string& label) {
        double best = 0.0;
        for (const auto& d : c.detections) {
            if (d.label == label) best = std::max(best, d.score);
        }
        return best;
    };

    struct Sums {
        double focus = 0.0;
        double baseline = 0.0;
        std::size_t images = 0;
    };
    std::map<std::string, Sums> per_label;
    for (const auto& c : focus.cases) {
        const auto& other = *baseline_by_id.at(c.case_id);
        for (const auto& label : c.proposal.labels()) {
            auto& s = per_label[label];
            s.focus += best_score(c, label);
            s.baseline += best_score(other, label);
            ++s.images;
        }
    }

    std::vector<DiscrepancyEntry> out;
    for (const auto& [label, s] : per_label) {
        if (s.images < min_count || s.images == 0) {
            continue;
        }
        const double n = static_cast<double>(s.images);
        out.push_back({label, s.focus / n - s.baseline / n, s.focus / n, s.baseline / n, s.images});
    }
    std::stable_sort(out.begin(), out.end(), [](const DiscrepancyEntry& a, const DiscrepancyEntry& b) {
        if (a.discrepancy != b.discrepancy) return a.discrepancy > b.discrepancy;
        return a.label < b.label;
    });
    if (out.size() > k) {
        out.resize(k);
    }
    return out;
}

}  // namespace focus
