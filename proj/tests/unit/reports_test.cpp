#include "focus/reports.hpp"

#include <gtest/gtest.h>

namespace focus {
namespace {

MethodResults one_method(std::string name, double score) {
    ScoredCase c{"7-1", TaskTag::granular(), 9, ProposalList::from_labels({"belt", "hat"}),
                 {{"belt", score, BBox(0, 0, 2, 2)}}};
    return {std::move(name), {c}};
}

TEST(SweepCsv, FixedLayout) {
    const std::vector<MethodResults> m = {one_method("baseline", 0.3), one_method("focus", 0.7)};
    const double cutoffs[] = {0.2, 0.5};
    const auto csv = sweep_csv(sweep(m, cutoffs));
    EXPECT_EQ(csv,
              "method,task,cutoff,f1,n\n"
              "baseline,granular,0.2,0.666667,1\n"
              "baseline,granular,0.5,0.000000,1\n"
              "focus,granular,0.2,0.666667,1\n"
              "focus,granular,0.5,0.666667,1\n");
}

TEST(SweepCsv, DifficultyColumn) {
    const std::vector<MethodResults> m = {one_method("focus", 0.7)};
    const double cutoffs[] = {0.6};
    const auto csv = sweep_csv(sweep(m, cutoffs, Aggregation::Macro, SweepGrouping::TaskAndDifficulty));
    EXPECT_EQ(csv, "method,task,difficulty,cutoff,f1,n\nfocus,granular,hard,0.6,0.666667,1\n");
}

TEST(SweepJson, CarriesRows) {
    const std::vector<MethodResults> m = {one_method("focus", 0.7)};
    const auto j = sweep_json(sweep(m, kDefaultCutoffs, Aggregation::Micro));
    EXPECT_EQ(j.at("aggregation"), "micro");
    EXPECT_EQ(j.at("cutoffs").size(), 4u);
    EXPECT_EQ(j.at("rows")[0].at("method"), "focus");
    EXPECT_EQ(j.at("rows")[0].at("n"), 1);
    EXPECT_FALSE(j.at("rows")[0].contains("difficulty"));
}

TEST(MatchJsonl, OneRecordPerCaseAndCutoff) {
    const std::vector<MethodResults> m = {one_method("baseline", 0.3), one_method("focus", 0.7)};
    const auto text = match_reports_jsonl(m, kDefaultCutoffs);
    std::vector<nlohmann::json> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        const auto end = text.find('\n', start);
        lines.push_back(nlohmann::json::parse(text.substr(start, end - start)));
        start = end + 1;
    }
    ASSERT_EQ(lines.size(), 8u);
    EXPECT_EQ(lines[0].at("method"), "baseline");
    EXPECT_EQ(lines[0].at("matched"), nlohmann::json::array({"belt"}));
    EXPECT_EQ(lines[0].at("missed"), nlohmann::json::array({"hat"}));
    EXPECT_EQ(lines[1].at("matched").size(), 0u);
    EXPECT_DOUBLE_EQ(lines[5].at("recall").get<double>(), 0.5);
}

TEST(DiscrepancyJson, Shape) {
    const std::vector<DiscrepancyEntry> e = {{"belt", 0.4, 0.7, 0.3, 5}};
    const auto j = discrepancy_json(e, 3, 10);
    EXPECT_EQ(j.at("min_count"), 3);
    EXPECT_EQ(j.at("k"), 10);
    EXPECT_EQ(j.at("labels")[0].at("label"), "belt");
    EXPECT_EQ(j.at("labels")[0].at("images"), 5);
    EXPECT_TRUE(j.contains("definition"));
}

}  // namespace
}  // namespace focus
