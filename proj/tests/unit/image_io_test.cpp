#include "focus/codec.hpp"
#include "focus/errors.hpp"
#include "focus/image_io.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>

namespace focus {
namespace {

TEST(Png, RoundTripIsLossless) {
    const auto img = testing::noise_image(23, 11, 1);
    EXPECT_EQ(decode_image(encode_png(img)), img);
    EXPECT_EQ(encode_png(img), encode_png(img));
}

TEST(Jpeg, DecodesToSameSizeApproximately) {
    const auto img = RasterImage::filled(16, 8, {200, 100, 50});
    const auto back = decode_image(encode_jpeg(img, 95));
    ASSERT_EQ(back.width(), 16);
    ASSERT_EQ(back.height(), 8);
    EXPECT_LE(std::abs(back.at(3, 3).r - 200), 4);
    EXPECT_LE(std::abs(back.at(3, 3).g - 100), 4);
}

TEST(Decode, RejectsGarbage) {
    const std::vector<std::uint8_t> junk = {1, 2, 3, 4, 5};
    EXPECT_THROW((void)decode_image(junk), ImageCodecError);
    std::vector<std::uint8_t> truncated = encode_png(testing::noise_image(8, 8, 2));
    truncated.resize(truncated.size() / 2);
    EXPECT_THROW((void)decode_image(truncated), ImageCodecError);
}

TEST(MaskPng, RoundTrip) {
    const auto m = testing::noise_mask(13, 7, 3);
    EXPECT_EQ(decode_mask_png(encode_mask_png(m)), m);
}

TEST(Files, WriteCreatesParentsAndReadsBack) {
    testing::TempDir dir;
    const auto img = testing::noise_image(4, 4, 4);
    write_png(dir / "a/b/c.png", img);
    EXPECT_EQ(read_image(dir / "a/b/c.png"), img);
    EXPECT_THROW((void)read_file_bytes(dir / "missing.png"), std::runtime_error);
}

TEST(Codec, Base64KnownVectors) {
    const std::string s = "foobar";
    const std::vector<std::uint8_t> bytes(s.begin(), s.end());
    EXPECT_EQ(base64_encode(bytes), "Zm9vYmFy");
    EXPECT_EQ(base64_encode(std::span(bytes).first(4)), "Zm9vYg==");
    EXPECT_EQ(base64_decode("Zm9vYg=="), std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 4));
    EXPECT_EQ(base64_decode(""), std::vector<std::uint8_t>{});
    EXPECT_THROW((void)base64_decode("Zm9v!"), ProtocolError);
}

TEST(Codec, Sha256KnownVectors) {
    EXPECT_EQ(sha256_hex(std::string_view("")), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex(std::string_view("abc")), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // namespace
}  // namespace focus
