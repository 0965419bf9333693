#include "focus/backend.hpp"
#include "focus/errors.hpp"
#include "focus/image_io.hpp"
#include "focus/mock_backend.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace focus {
namespace {

using nlohmann::json;

class MockBackends : public ::testing::Test {
protected:
    void SetUp() override {
        write_file_text(dir_ / "proposals/img1.json",
                        json{{prompt_digest("List objects."), "belt, watch"},
                             {prompt_digest("List body parts."), "head, left hand"}}
                            .dump());
        write_file_text(dir_ / "proposals/any.json", json{{"*", "hat"}}.dump());
        write_file_text(dir_ / "detections/img1.json",
                        json{{"detections",
                              {{{"label", "belt"}, {"score", 0.9}, {"box", {0, 0, 2, 2}}},
                               {{"label", "watch"}, {"score", 0.05}, {"box", {1, 1, 3, 3}}},
                               {{"label", "jacket"}, {"score", 0.7}, {"box", {0, 0, 4, 4}}}}},
                             {"views", {{"full", {{{"label", "belt"}, {"score", 0.4}, {"box", {1, 0, 2, 1}}}}}}}}
                            .dump());
    }

    testing::TempDir dir_;
    RasterImage img_ = RasterImage::filled(4, 4, kBlack);
};

TEST_F(MockBackends, RectangleMask) {
    MockSegmenter seg(dir_.path(), MaskSource::Rectangle);
    CallContext ctx{"img1"};
    const auto m = segment(seg, img_, BBox(1, 1, 3, 3), ctx);
    EXPECT_EQ(m.popcount(), 4u);
    EXPECT_TRUE(m.at(1, 1) && m.at(2, 1) && m.at(1, 2) && m.at(2, 2));
    EXPECT_EQ(segment(seg, img_, BBox(0, 0, 4, 4), ctx).popcount(), 16u);
}

TEST_F(MockBackends, FixtureMaskPassesThrough) {
    const auto mask = testing::noise_mask(4, 4, 9);
    write_file_bytes(dir_ / "masks/img1.png", encode_mask_png(mask));
    MockSegmenter seg(dir_.path(), MaskSource::Fixture);
    CallContext ctx{"img1"};
    EXPECT_EQ(segment(seg, img_, BBox(0, 0, 2, 2), ctx), mask);
    CallContext other{"img2"};
    EXPECT_THROW((void)segment(seg, img_, BBox(0, 0, 2, 2), other), FixtureMissError);
}

TEST_F(MockBackends, ProposalsKeyedByPromptDigest) {
    MockProposer p(dir_.path());
    CallContext ctx{"img1"};
    EXPECT_EQ(propose(p, img_, "List objects.", ctx).text, "belt, watch");
    EXPECT_EQ(propose(p, img_, "List body parts.", ctx).text, "head, left hand");
    EXPECT_THROW((void)propose(p, img_, "Something else.", ctx), FixtureMissError);
    CallContext any{"any"};
    EXPECT_EQ(propose(p, img_, "Something else.", any).text, "hat");
    CallContext missing{"nobody"};
    EXPECT_THROW((void)propose(p, img_, "List objects.", missing), FixtureMissError);
    EXPECT_THROW((void)propose(p, img_, "  ", ctx), EmptyPromptError);
}

TEST_F(MockBackends, DetectorEnforcesContract) {
    MockDetector d(dir_.path());
    CallContext ctx{"img1", "attended"};
    const auto out = detect(d, img_, ProposalList::from_labels({"belt", "watch"}), 0.1, ctx);
    ASSERT_EQ(out.detections.size(), 1u);
    EXPECT_EQ(out.detections[0].label, "belt");
    EXPECT_EQ(out.dropped, 2u);  // watch below tau, jacket not requested

    const auto only_belt = detect(d, img_, ProposalList::from_labels({"belt"}), 0.0, ctx);
    EXPECT_EQ(only_belt.dropped, 2u);  // watch and jacket both unrequested now

    EXPECT_TRUE(detect(d, img_, ProposalList::from_labels({"belt", "watch"}), 1.0, ctx).detections.empty());
    EXPECT_THROW((void)detect(d, img_, ProposalList::from_labels({"belt"}), 1.5, ctx), std::invalid_argument);
}

TEST_F(MockBackends, DetectorViewOverride) {
    MockDetector d(dir_.path());
    CallContext ctx{"img1", "full"};
    const auto out = detect(d, img_, ProposalList::from_labels({"belt"}), 0.1, ctx);
    ASSERT_EQ(out.detections.size(), 1u);
    EXPECT_DOUBLE_EQ(out.detections[0].score, 0.4);
}

TEST_F(MockBackends, Deterministic) {
    MockDetector d(dir_.path());
    CallContext a{"img1", "attended"};
    CallContext b{"img1", "attended"};
    const auto labels = ProposalList::from_labels({"belt", "watch"});
    EXPECT_EQ(detect(d, img_, labels, 0.0, a).detections, detect(d, img_, labels, 0.0, b).detections);
}

TEST_F(MockBackends, SubjectKeysCannotEscapeFixtureDir) {
    EXPECT_THROW(require_safe_subject("../img1"), FixtureMissError);
    EXPECT_THROW(require_safe_subject(".hidden"), FixtureMissError);
    EXPECT_THROW(require_safe_subject(""), FixtureMissError);
    EXPECT_NO_THROW(require_safe_subject("100-3_a.b"));
    MockProposer p(dir_.path());
    CallContext ctx{"../proposals/img1"};
    EXPECT_THROW((void)propose(p, img_, "List objects.", ctx), FixtureMissError);
}

class WrongSizeSegmenter final : public Segmenter {
public:
    std::string name() const override { return "wrong"; }
    BinaryMask segment(const RasterImage&, const BBox&, CallContext&) const override { return {3, 3}; }
};

TEST(CheckedSegment, ValidatesBoxAndMaskShape) {
    const auto img = RasterImage::filled(4, 4, kBlack);
    CallContext ctx{"x"};
    EXPECT_THROW((void)segment(WrongSizeSegmenter{}, img, BBox(0, 0, 2, 2), ctx), ProtocolError);
    EXPECT_THROW((void)segment(testing::RectSegmenter{}, img, BBox(0, 0, 5, 2), ctx), BoxOutOfBoundsError);
}

TEST(EndpointConfig, Validation) {
    BackendEndpointConfig c;
    c.kind = MockEndpoint{"/tmp", MaskSource::Rectangle};
    EXPECT_NO_THROW(c.validate());
    c.retries = -1;
    EXPECT_THROW(c.validate(), ConfigError);
    c.retries = 0;
    c.timeout = std::chrono::milliseconds(0);
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(EndpointConfig, FactoriesPickImplementation) {
    BackendEndpointConfig c;
    c.kind = MockEndpoint{"/tmp", MaskSource::Rectangle};
    c.role = BackendRole::Detector;
    EXPECT_EQ(make_detector(c)->name(), "mock-detector");
    EXPECT_THROW((void)make_proposer(c), ConfigError);
    c.role = BackendRole::Proposer;
    EXPECT_EQ(make_proposer(c)->name(), "mock-proposer");
    c.role = BackendRole::Segmenter;
    EXPECT_EQ(make_segmenter(c)->name(), "mock-segmenter");
    c.role = BackendRole::Detector;
    c.kind = RemoteEndpoint{"http://127.0.0.1:9", ""};
    EXPECT_EQ(make_detector(c)->name(), "remote-detector@http://127.0.0.1:9");
    c.kind = RemoteEndpoint{"ftp://host", ""};
    EXPECT_THROW((void)make_detector(c), ConfigError);
}

}  // namespace
}  // namespace focus
