#include "focus/errors.hpp"
#include "focus/isolation.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

namespace focus {
namespace {

constexpr Rgb kRed{255, 0, 0};

TEST(ApplyMask, PartitionsPixelsBetweenSourceAndFill) {
    const auto img = testing::noise_image(17, 9, 1);
    const auto mask = testing::noise_mask(17, 9, 2);
    const auto out = apply_mask(img, mask, kRed);
    for (int y = 0; y < 9; ++y) {
        for (int x = 0; x < 17; ++x) {
            EXPECT_EQ(out.at(x, y), mask.at(x, y) ? img.at(x, y) : kRed);
        }
    }
    EXPECT_EQ(apply_mask(out, mask, kRed), out);
}

TEST(ApplyMask, ShapeMismatchThrows) {
    EXPECT_THROW((void)apply_mask(RasterImage::filled(4, 4, kBlack), BinaryMask(4, 5), kRed), MaskShapeError);
}

TEST(ApplyMask, AllOnAndAllOff) {
    const auto img = testing::noise_image(5, 5, 3);
    std::vector<std::uint8_t> ones(25, 1);
    EXPECT_EQ(apply_mask(img, BinaryMask(5, 5, ones), kRed), img);
    EXPECT_EQ(apply_mask(img, BinaryMask(5, 5), kRed), RasterImage::filled(5, 5, kRed));
}

TEST(Crop, CopiesTheBoxAndRejectsOutOfBounds) {
    const auto img = testing::noise_image(10, 8, 4);
    const auto c = crop(img, BBox(2, 1, 6, 4));
    ASSERT_EQ(c.width(), 4);
    ASSERT_EQ(c.height(), 3);
    EXPECT_EQ(c.at(0, 0), img.at(2, 1));
    EXPECT_EQ(c.at(3, 2), img.at(5, 3));
    EXPECT_THROW((void)crop(img, BBox(5, 5, 11, 6)), BoxOutOfBoundsError);
    EXPECT_THROW((void)crop(img, BBox(5, 5, 2, 2)), BoxOutOfBoundsError);
}

TEST(RectangleMask, SetsExactlyTheBox) {
    const auto m = rectangle_mask(6, 6, BBox(1, 2, 4, 5));
    EXPECT_EQ(m.popcount(), 9u);
    EXPECT_TRUE(m.at(1, 2));
    EXPECT_TRUE(m.at(3, 4));
    EXPECT_FALSE(m.at(4, 4));
    EXPECT_FALSE(m.at(0, 2));
}

TEST(IsolateRegion, ModesProduceExpectedGeometry) {
    const auto img = testing::noise_image(20, 10, 5);
    const BBox box(4, 2, 10, 7);
    const auto full = isolate_region(img, box, std::nullopt, IsolationMode::Full);
    EXPECT_EQ(full.image, img);
    EXPECT_EQ(full.offset_x(), 0);

    const auto rect = isolate_region(img, box, std::nullopt, IsolationMode::RectMask, kRed);
    EXPECT_EQ(rect.image.width(), 20);
    EXPECT_EQ(rect.image.at(4, 2), img.at(4, 2));
    EXPECT_EQ(rect.image.at(3, 2), kRed);
    EXPECT_EQ(rect.offset_x(), 0);

    const auto cropped = isolate_region(img, box, std::nullopt, IsolationMode::Crop);
    EXPECT_EQ(cropped.image, crop(img, box));
    EXPECT_EQ(cropped.offset_x(), 4);
    EXPECT_EQ(cropped.offset_y(), 2);

    const auto mask = testing::noise_mask(20, 10, 6);
    const auto seg = isolate_region(img, box, mask, IsolationMode::SegmentMask, kRed);
    EXPECT_EQ(seg.image, crop(apply_mask(img, mask, kRed), box));
    EXPECT_EQ(seg.offset_x(), 4);
}

TEST(IsolateRegion, MaskPresenceMustMatchMode) {
    const auto img = testing::noise_image(8, 8, 7);
    const BBox box(1, 1, 5, 5);
    EXPECT_THROW((void)isolate_region(img, box, std::nullopt, IsolationMode::SegmentMask), MissingMaskError);
    EXPECT_THROW((void)isolate_region(img, box, BinaryMask(8, 8), IsolationMode::Crop), SpuriousMaskError);
    EXPECT_THROW((void)isolate_region(img, box, BinaryMask(7, 8), IsolationMode::SegmentMask), MaskShapeError);
    EXPECT_THROW((void)isolate_region(img, BBox(4, 4, 9, 9), std::nullopt, IsolationMode::Crop),
                 BoxOutOfBoundsError);
}

TEST(AttendedImage, CoordinateRoundTrip) {
    const auto img = testing::noise_image(30, 30, 8);
    for (auto mode : {IsolationMode::Full, IsolationMode::RectMask, IsolationMode::Crop}) {
        const auto a = isolate_region(img, BBox(7, 9, 20, 25), std::nullopt, mode);
        const BBox inner(1, 2, 5, 6);
        EXPECT_EQ(a.to_attended(a.to_original(inner)), inner) << to_string(mode);
    }
    const auto a = isolate_region(img, BBox(7, 9, 20, 25), std::nullopt, IsolationMode::Crop);
    EXPECT_EQ(a.to_original(BBox(0, 0, 13, 16)), BBox(7, 9, 20, 25));
}

TEST(IsolationMode, NamesRoundTrip) {
    for (auto m : {IsolationMode::Full, IsolationMode::RectMask, IsolationMode::Crop, IsolationMode::SegmentMask}) {
        EXPECT_EQ(parse_isolation_mode(to_string(m)), m);
    }
    EXPECT_THROW((void)parse_isolation_mode("blur"), std::invalid_argument);
}

}  // namespace
}  // namespace focus
