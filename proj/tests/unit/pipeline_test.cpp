#include "focus/errors.hpp"
#include "focus/image_io.hpp"
#include "focus/pipeline.hpp"

#include "test_support.hpp"

#include <fmt/format.h>
#include <gtest/gtest.h>

namespace focus {
namespace {

using testing::FixedDetector;
using testing::FixedProposer;

PipelineConfig crop_config() {
    PipelineConfig c;
    c.mode = IsolationMode::Crop;
    return c;
}

TEST(Pipeline, FocusRunMapsDetectionsBackToOriginal) {
    auto prop = std::make_shared<FixedProposer>("1. Belt\n2. Watch");
    auto det = std::make_shared<FixedDetector>(std::vector<RawDetection>{
        {"belt", 0.8, {1, 1, 4, 4}}, {"watch", 0.05, {0, 0, 2, 2}}, {"tree", 0.9, {0, 0, 2, 2}}});
    const Pipeline p(crop_config(), {nullptr, prop, det});
    const auto img = testing::noise_image(40, 30, 1);
    const auto r = p.run(img, BBox(10, 5, 30, 25), "case");

    EXPECT_EQ(r.variant, Variant::Focus);
    EXPECT_EQ(r.proposal.labels(), (std::vector<std::string>{"belt", "watch"}));
    ASSERT_TRUE(r.raw_proposal.has_value());
    EXPECT_EQ(r.raw_proposal->text, "1. Belt\n2. Watch");
    ASSERT_EQ(r.detections.size(), 1u);
    EXPECT_EQ(r.detections[0].detection.box, BBox(1, 1, 4, 4));
    EXPECT_EQ(r.detections[0].original_box, BBox(11, 6, 14, 9));
    EXPECT_EQ(r.diagnostics.dropped_detections, 2u);
    EXPECT_EQ(r.attended->image.width(), 20);
    EXPECT_EQ(det->last_view(), "attended");
    EXPECT_EQ(prop->last_prompt(), build_prompt(default_prompt()));
    EXPECT_NO_THROW(check_result_invariants(r, p.config().base_tau));
}

TEST(Pipeline, EmptyProposalAbortsBeforeDetection) {
    auto prop = std::make_shared<FixedProposer>(" ... , ");
    auto det = std::make_shared<FixedDetector>(std::vector<RawDetection>{});
    const Pipeline p(crop_config(), {nullptr, prop, det});
    try {
        (void)p.run(testing::noise_image(8, 8, 2), BBox(0, 0, 4, 4), "case");
        FAIL() << "expected StageError";
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), Stage::Propose);
        EXPECT_EQ(e.kind(), "EmptyProposalError");
        EXPECT_THROW(e.rethrow_cause(), EmptyProposalError);
    }
    EXPECT_EQ(det->calls(), 0);
}

template <typename E>
Stage failing_stage(IsolationMode mode, int role) {
    auto bad = std::make_shared<testing::ThrowingBackend<E>>();
    BackendSet set{std::make_shared<testing::RectSegmenter>(), std::make_shared<FixedProposer>("belt"),
                   std::make_shared<FixedDetector>(std::vector<RawDetection>{})};
    if (role == 0) set.segmenter = bad;
    if (role == 1) set.proposer = bad;
    if (role == 2) set.detector = bad;
    PipelineConfig c;
    c.mode = mode;
    try {
        (void)Pipeline(c, set).run(testing::noise_image(8, 8, 3), BBox(1, 1, 6, 6), "case");
    } catch (const StageError& e) {
        return e.stage();
    }
    throw std::logic_error("pipeline did not fail");
}

TEST(Pipeline, FailuresAreAttributedToTheirStage) {
    EXPECT_EQ(failing_stage<BackendUnavailableError>(IsolationMode::SegmentMask, 0), Stage::Segment);
    EXPECT_EQ(failing_stage<BackendUnavailableError>(IsolationMode::SegmentMask, 1), Stage::Propose);
    EXPECT_EQ(failing_stage<ProtocolError>(IsolationMode::SegmentMask, 2), Stage::Detect);
    EXPECT_EQ(failing_stage<FixtureMissError>(IsolationMode::Crop, 1), Stage::Propose);
}

TEST(Pipeline, BoxOutsideImageIsAnInputError) {
    const Pipeline p(crop_config(), {nullptr, std::make_shared<FixedProposer>("belt"),
                                     std::make_shared<FixedDetector>(std::vector<RawDetection>{})});
    try {
        (void)p.run(testing::noise_image(8, 8, 4), BBox(4, 4, 9, 9), "case");
        FAIL();
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), Stage::Input);
    }
}

TEST(Pipeline, ConfigValidation) {
    BackendSet no_seg{nullptr, std::make_shared<FixedProposer>("belt"),
                      std::make_shared<FixedDetector>(std::vector<RawDetection>{})};
    EXPECT_THROW(Pipeline(PipelineConfig{}, no_seg), ConfigError);
    PipelineConfig c = crop_config();
    c.base_tau = 1.5;
    EXPECT_THROW(Pipeline(c, no_seg), ConfigError);
    c = crop_config();
    c.parallelism = 0;
    EXPECT_THROW(Pipeline(c, no_seg), ConfigError);
    c = crop_config();
    c.prompt.task_text = " ";
    EXPECT_THROW(Pipeline(c, no_seg), ConfigError);
}

TEST(Pipeline, BaselineFiltersByContainment) {
    auto det = std::make_shared<FixedDetector>(std::vector<RawDetection>{
        {"belt", 0.6, {12, 12, 16, 16}},   // inside
        {"belt", 0.9, {0, 0, 4, 4}},       // distractor outside
        {"watch", 0.5, {8, 8, 12, 12}}});  // centre (10,10) on the region's corner
    const Pipeline p(crop_config(), {nullptr, std::make_shared<FixedProposer>("belt, watch"), det});
    const auto r = p.run_baseline(testing::noise_image(40, 40, 5), BBox(10, 10, 30, 30),
                                  ProposalList::from_labels({"belt", "watch"}), "case");
    EXPECT_EQ(r.variant, Variant::Baseline);
    EXPECT_TRUE(r.labels_reused);
    EXPECT_EQ(det->last_view(), "full");
    ASSERT_EQ(r.detections.size(), 2u);
    EXPECT_EQ(r.detections[0].original_box, BBox(12, 12, 16, 16));
    EXPECT_EQ(r.diagnostics.outside_region, 1u);
    EXPECT_EQ(r.attended->mode, IsolationMode::Full);
}

TEST(Pipeline, RunWithLabelsSkipsProposer) {
    auto prop = std::make_shared<FixedProposer>("hat");
    auto det = std::make_shared<FixedDetector>(std::vector<RawDetection>{{"belt", 0.6, {0, 0, 2, 2}},
                                                                        {"hat", 0.6, {0, 0, 2, 2}}});
    const Pipeline p(crop_config(), {nullptr, prop, det});
    const auto r = p.run_with_labels(testing::noise_image(10, 10, 6), BBox(0, 0, 5, 5),
                                     ProposalList::from_labels({"belt"}), "case");
    EXPECT_EQ(prop->calls(), 0);
    ASSERT_EQ(r.detections.size(), 1u);
    EXPECT_EQ(r.detections[0].detection.label, "belt");
    EXPECT_FALSE(r.raw_proposal.has_value());
}

class BatchTest : public ::testing::Test {
protected:
    void SetUp() override {
        for (int i = 0; i < 9; ++i) {
            const auto path = dir_ / fmt::format("img{}.png", i);
            write_png(path, testing::noise_image(24 + i, 20, static_cast<std::uint64_t>(i)));
            cases_.push_back({fmt::format("case-{}", i), fmt::format("img{}", i), path, BBox(2, 2, 14, 12),
                              i, TaskTag::granular()});
        }
        cases_.push_back({"missing", "missing", dir_ / "nope.png", BBox(0, 0, 2, 2), 0, TaskTag::granular()});
    }

    Pipeline pipeline(int parallelism) const {
        PipelineConfig c;
        c.parallelism = parallelism;
        return Pipeline(c, {std::make_shared<testing::FuzzSegmenter>(1), std::make_shared<testing::FuzzProposer>(2),
                            std::make_shared<testing::FuzzDetector>(3)});
    }

    testing::TempDir dir_;
    std::vector<EvalCase> cases_;
};

TEST_F(BatchTest, OutcomesInCaseOrderAndIndependentOfParallelism) {
    const auto serial = pipeline(1).batch_run(cases_, Variant::Focus);
    const auto parallel = pipeline(4).batch_run(cases_, Variant::Focus);
    ASSERT_EQ(serial.size(), cases_.size());
    ASSERT_EQ(parallel.size(), cases_.size());
    for (std::size_t i = 0; i < cases_.size(); ++i) {
        EXPECT_EQ(serial[i].case_id, cases_[i].case_id);
        EXPECT_EQ(parallel[i].case_id, cases_[i].case_id);
        ASSERT_EQ(serial[i].ok(), parallel[i].ok());
        if (serial[i].ok()) {
            EXPECT_EQ(serial[i].result().detections, parallel[i].result().detections);
            EXPECT_EQ(serial[i].result().proposal, parallel[i].result().proposal);
        }
    }
    ASSERT_FALSE(serial.back().ok());
    EXPECT_EQ(serial.back().failure().stage, Stage::Input);
}

TEST_F(BatchTest, BaselineReusesLabelBook) {
    const auto p = pipeline(2);
    const auto focus = p.batch_run(cases_, Variant::Focus);
    LabelBook book;
    for (const auto& o : focus) {
        if (o.ok()) book.emplace(o.case_id, o.result().proposal);
    }
    const auto baseline = p.batch_run(cases_, Variant::Baseline, &book);
    for (std::size_t i = 0; i + 1 < cases_.size(); ++i) {
        ASSERT_TRUE(baseline[i].ok());
        EXPECT_TRUE(baseline[i].result().labels_reused);
        EXPECT_EQ(baseline[i].result().proposal, focus[i].result().proposal);
    }
}

TEST(PipelineFuzz, ClosureInvariantsAndDropCounters) {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        auto det = std::make_shared<testing::FuzzDetector>(seed);
        PipelineConfig c;
        c.mode = static_cast<IsolationMode>(seed % 4);
        c.base_tau = 0.05 * static_cast<double>(seed % 5);
        const Pipeline p(c, {std::make_shared<testing::FuzzSegmenter>(seed),
                             std::make_shared<testing::FuzzProposer>(seed), det});
        const auto img = testing::noise_image(32, 24, seed);
        const BBox box(static_cast<int>(seed % 8), 3, 20 + static_cast<int>(seed % 10), 21);
        const auto subject = fmt::format("s{}", seed);
        const auto r = seed % 3 == 0 ? p.run_baseline(img, box, subject) : p.run(img, box, subject);
        EXPECT_NO_THROW(check_result_invariants(r, c.base_tau)) << seed;
        EXPECT_EQ(r.diagnostics.dropped_detections, det->injected()) << seed;
        EXPECT_EQ(r.detections.size() + r.diagnostics.outside_region, det->valid()) << seed;
    }
}

TEST(ResultInvariants, DetectViolations) {
    const Pipeline p(crop_config(), {nullptr, std::make_shared<FixedProposer>("belt"),
                                     std::make_shared<FixedDetector>(std::vector<RawDetection>{
                                         {"belt", 0.5, {0, 0, 2, 2}}})});
    const auto good = p.run(testing::noise_image(10, 10, 7), BBox(2, 2, 8, 8), "case");
    EXPECT_NO_THROW(check_result_invariants(good, 0.1));
    EXPECT_THROW(check_result_invariants(good, 0.6), Error);  // threshold closure
    auto bad_label = good;
    bad_label.detections[0].detection.label = "hat";
    EXPECT_THROW(check_result_invariants(bad_label, 0.1), Error);
    auto bad_box = good;
    bad_box.detections[0].original_box = BBox(0, 0, 2, 2);
    EXPECT_THROW(check_result_invariants(bad_box, 0.1), Error);
}

}  // namespace
}  // namespace focus
