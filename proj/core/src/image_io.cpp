#include "focus/image_io.hpp"

#include "focus/errors.hpp"

#include <png.h>
// jpeglib.h expects size_t and FILE to be declared first
#include <cstdio>
#include <jpeglib.h>

#include <algorithm>
#include <csetjmp>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>

namespace focus {

namespace {

bool is_png(std::span<const std::uint8_t> bytes) {
    static constexpr std::uint8_t sig[] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    return bytes.size() >= sizeof(sig) && std::memcmp(bytes.data(), sig, sizeof(sig)) == 0;
}

bool is_jpeg(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= 3 && bytes[0] == 0xff && bytes[1] == 0xd8 && bytes[2] == 0xff;
}

struct PngImage {
    png_image image{};
    PngImage() {
        image.version = PNG_IMAGE_VERSION;
    }
    ~PngImage() { png_image_free(&image); }
    PngImage(const PngImage&) = delete;
    PngImage& operator=(const PngImage&) = delete;
};

std::vector<std::uint8_t> decode_png_raw(std::span<const std::uint8_t> bytes, png_uint_32 format,
                                         int& width, int& height) {
    PngImage png;
    if (png_image_begin_read_from_memory(&png.image, bytes.data(), bytes.size()) == 0) {
        throw ImageCodecError(std::string("PNG decode failed: ") + png.image.message);
    }
    png.image.format = format;
    std::vector<std::uint8_t> out(PNG_IMAGE_SIZE(png.image));
    if (png_image_finish_read(&png.image, nullptr, out.data(), 0, nullptr) == 0) {
        throw ImageCodecError(std::string("PNG decode failed: ") + png.image.message);
    }
    width = static_cast<int>(png.image.width);
    height = static_cast<int>(png.image.height);
    return out;
}

std::vector<std::uint8_t> encode_png_raw(const std::uint8_t* data, int width, int height,
                                         png_uint_32 format) {
    PngImage png;
    png.image.width = static_cast<png_uint_32>(width);
    png.image.height = static_cast<png_uint_32>(height);
    png.image.format = format;
    png_alloc_size_t size = 0;
    if (png_image_write_to_memory(&png.image, nullptr, &size, 0, data, 0, nullptr) == 0) {
        throw ImageCodecError(std::string("PNG encode failed: ") + png.image.message);
    }
    std::vector<std::uint8_t> out(size);
    if (png_image_write_to_memory(&png.image, out.data(), &size, 0, data, 0, nullptr) == 0) {
        throw ImageCodecError(std::string("PNG encode failed: ") + png.image.message);
    }
    out.resize(size);
    return out;
}

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr info) {
    auto* err = reinterpret_cast<JpegErrorManager*>(info->err);
    (*info->err->format_message)(info, err->message);
    std::longjmp(err->jump, 1);
}

RasterImage decode_jpeg(std::span<const std::uint8_t> bytes) {
    jpeg_decompress_struct info{};
    JpegErrorManager err{};
    info.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    // Nothing with a destructor may live across the setjmp below.
    std::vector<std::uint8_t> pixels;
    int width = 0;
    int height = 0;
    if (setjmp(err.jump) != 0) {
        jpeg_destroy_decompress(&info);
        throw ImageCodecError(std::string("JPEG decode failed: ") + err.message);
    }
    jpeg_create_decompress(&info);
    jpeg_mem_src(&info, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&info, TRUE);
    info.out_color_space = JCS_RGB;
    jpeg_start_decompress(&info);
    width = static_cast<int>(info.output_width);
    height = static_cast<int>(info.output_height);
    pixels.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
    while (info.output_scanline < info.output_height) {
        JSAMPROW row = pixels.data() + static_cast<std::size_t>(info.output_scanline) *
                                           static_cast<std::size_t>(width) * 3;
        jpeg_read_scanlines(&info, &row, 1);
    }
    jpeg_finish_decompress(&info);
    jpeg_destroy_decompress(&info);
    return {width, height, std::move(pixels)};
}

}  // namespace

std::vector<std::uint8_t> encode_png(const RasterImage& image) {
    return encode_png_raw(image.bytes().data(), image.width(), image.height(), PNG_FORMAT_RGB);
}

std::vector<std::uint8_t> encode_jpeg(const RasterImage& image, int quality) {
    jpeg_compress_struct info{};
    JpegErrorManager err{};
    info.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    unsigned char* buffer = nullptr;
    unsigned long size = 0;
    if (setjmp(err.jump) != 0) {
        jpeg_destroy_compress(&info);
        std::free(buffer);
        throw ImageCodecError(std::string("JPEG encode failed: ") + err.message);
    }
    jpeg_create_compress(&info);
    jpeg_mem_dest(&info, &buffer, &size);
    info.image_width = static_cast<JDIMENSION>(image.width());
    info.image_height = static_cast<JDIMENSION>(image.height());
    info.input_components = 3;
    info.in_color_space = JCS_RGB;
    jpeg_set_defaults(&info);
    jpeg_set_quality(&info, quality, TRUE);
    jpeg_start_compress(&info, TRUE);
    const auto* data = image.bytes().data();
    while (info.next_scanline < info.image_height) {
        auto* row = const_cast<JSAMPROW>(data + static_cast<std::size_t>(info.next_scanline) *
                                                    static_cast<std::size_t>(image.width()) * 3);
        jpeg_write_scanlines(&info, &row, 1);
    }
    jpeg_finish_compress(&info);
    jpeg_destroy_compress(&info);
    std::vector<std::uint8_t> out(buffer, buffer + size);
    std::free(buffer);
    return out;
}

RasterImage decode_image(std::span<const std::uint8_t> bytes) {
    if (is_png(bytes)) {
        int width = 0;
        int height = 0;
        auto pixels = decode_png_raw(bytes, PNG_FORMAT_RGB, width, height);
        return {width, height, std::move(pixels)};
    }
    if (is_jpeg(bytes)) {
        return decode_jpeg(bytes);
    }
    throw ImageCodecError("unrecognised image format (expected PNG or JPEG)");
}

std::vector<std::uint8_t> encode_mask_png(const BinaryMask& mask) {
    std::vector<std::uint8_t> grey(mask.bits().size());
    std::transform(mask.bits().begin(), mask.bits().end(), grey.begin(),
                   [](std::uint8_t bit) -> std::uint8_t { return bit != 0 ? 255 : 0; });
    return encode_png_raw(grey.data(), mask.width(), mask.height(), PNG_FORMAT_GRAY);
}

BinaryMask decode_mask_png(std::span<const std::uint8_t> bytes) {
    if (!is_png(bytes)) {
        throw ImageCodecError("mask must be a PNG document");
    }
    int width = 0;
    int height = 0;
    auto grey = decode_png_raw(bytes, PNG_FORMAT_GRAY, width, height);
    for (auto& v : grey) {
        v = v >= 128 ? 1 : 0;
    }
    return {width, height, std::move(grey)};
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_file_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw std::runtime_error("short write to " + path.string());
    }
}

void write_file_text(const std::filesystem::path& path, const std::string& text) {
    write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

RasterImage read_image(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    try {
        return decode_image(bytes);
    } catch (const ImageCodecError& e) {
        throw ImageCodecError(path.string() + ": " + e.what());
    }
}

void write_png(const std::filesystem::path& path, const RasterImage& image) {
    write_file_bytes(path, encode_png(image));
}

}  // namespace focus
