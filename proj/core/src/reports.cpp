#include "focus/reports.hpp"

#include <fmt/format.h>

namespace focus {

using nlohmann::json;

namespace {

std::string cutoff_text(double c) {
    return fmt::format("{}", c);
}

std::string f1_text(double f) {
    return fmt::format("{:.6f}", f);
}

}  // namespace

std::string sweep_csv(const SweepTable& table) {
    const bool by_difficulty = !table.rows.empty() && table.rows.front().difficulty.has_value();
    std::string out = by_difficulty ? "method,task,difficulty,cutoff,f1,n\n" : "method,task,cutoff,f1,n\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < table.cutoffs.size(); ++i) {
            out += row.method;
            out += ',';
            out += row.task.name();
            out += ',';
            if (by_difficulty) {
                out += row.difficulty ? std::string(to_string(*row.difficulty)) : std::string();
                out += ',';
            }
            out += fmt::format("{},{},{}\n", cutoff_text(table.cutoffs[i]), f1_text(row.f1[i]), row.n_images);
        }
    }
    return out;
}

json sweep_json(const SweepTable& table) {
    json rows = json::array();
    for (const auto& row : table.rows) {
        json r = {{"method", row.method}, {"task", row.task.name()}, {"n", row.n_images}, {"f1", row.f1}};
        if (row.difficulty) {
            r["difficulty"] = to_string(*row.difficulty);
        }
        rows.push_back(std::move(r));
    }
    return {{"cutoffs", table.cutoffs},
            {"aggregation", to_string(table.aggregation)},
            {"rows", std::move(rows)}};
}

std::string match_reports_jsonl(std::span<const MethodResults> methods, std::span<const double> cutoffs,
                                LabelNormalization level) {
    std::string out;
    for (const auto& method : methods) {
        for (const auto& c : method.cases) {
            for (double cutoff : cutoffs) {
                const auto kept = filter_by_cutoff(c.detections, cutoff);
                std::vector<std::string> labels;
                for (const auto& d : kept) labels.push_back(d.label);
                const auto r = match_lists(c.proposal, labels, level);
                const json rec = {{"method", method.method},
                                  {"case_id", c.case_id},
                                  {"task", c.task.name()},
                                  {"cutoff", cutoff},
                                  {"recall", r.recall},
                                  {"precision", r.precision},
                                  {"f1", r.f1},
                                  {"matched", r.matched},
                                  {"missed", r.missed},
                                  {"spurious", r.spurious}};
                out += rec.dump();
                out += '\n';
            }
        }
    }
    return out;
}

json discrepancy_json(std::span<const DiscrepancyEntry> entries, std::size_t min_count, std::size_t k) {
    json items = json::array();
    for (const auto& e : entries) {
        items.push_back({{"label", e.label},
                         {"discrepancy", e.discrepancy},
                         {"focus_mean_best_score", e.focus_mean},
                         {"baseline_mean_best_score", e.baseline_mean},
                         {"images", e.images}});
    }
    return {{"definition",
             "mean per-image best detection score under focus minus the same mean under baseline; "
             "undetected labels score 0"},
            {"min_count", min_count},
            {"k", k},
            {"labels", std::move(items)}};
}

}  // namespace focus
