#include "synact/formats/png_io.hpp"

#include "synact/error.hpp"

#include <png.h>

#include <cstring>
#include <fstream>

namespace synact {

namespace {

struct WriteSink {
    std::vector<std::uint8_t>* out;
};

void write_cb(png_structp png, png_bytep data, png_size_t len) {
    auto* sink = static_cast<WriteSink*>(png_get_io_ptr(png));
    sink->out->insert(sink->out->end(), data, data + len);
}

void flush_cb(png_structp) {}

struct ReadSource {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;
};

void read_cb(png_structp png, png_bytep data, png_size_t len) {
    auto* src = static_cast<ReadSource*>(png_get_io_ptr(png));
    if (src->pos + len > src->bytes.size()) png_error(png, "truncated PNG stream");
    std::memcpy(data, src->bytes.data() + src->pos, len);
    src->pos += len;
}

void error_cb(png_structp png, png_const_charp msg) {
    // libpng requires this not to return; unwind through its setjmp buffer.
    auto* text = static_cast<std::string*>(png_get_error_ptr(png));
    if (text) *text = msg;
    png_longjmp(png, 1);
}

void warning_cb(png_structp, png_const_charp) {}

std::vector<std::uint8_t> encode(int width, int height, int bit_depth, int color_type,
                                 const std::uint8_t* rows, std::size_t row_bytes) {
    std::vector<std::uint8_t> out;
    std::string err;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, error_cb, warning_cb);
    if (!png) throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    std::vector<png_bytep> row_ptrs(height);
    WriteSink sink{&out};
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encode failed: " + err);
    }
    png_set_write_fn(png, &sink, write_cb, flush_cb);
    png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16) png_set_swap(png);  // rows are host little-endian
    for (int y = 0; y < height; ++y) row_ptrs[y] = const_cast<png_bytep>(rows + y * row_bytes);
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const Texture& image) {
    image.validate();
    if (image.width == 0 || image.height == 0) throw ContractError("cannot encode an empty image");
    return encode(image.width, image.height, 8, PNG_COLOR_TYPE_RGB, image.pixels.data(),
                  static_cast<std::size_t>(image.width) * 3);
}

Texture decode_png(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw FormatError("not a PNG stream");
    std::string err;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, error_cb, warning_cb);
    if (!png) throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    ReadSource src{bytes};
    Texture tex;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("PNG decode failed: " + err);
    }
    png_set_read_fn(png, &src, read_cb);
    png_read_info(png, info);
    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int color = png_get_color_type(png, info);
    if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
    png_read_update_info(png, info);
    if (png_get_rowbytes(png, info) != static_cast<png_size_t>(w) * 3) png_error(png, "unexpected row layout");
    tex = Texture(static_cast<int>(w), static_cast<int>(h));
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = tex.pixels.data() + static_cast<std::size_t>(y) * w * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return tex;
}

std::vector<std::uint8_t> encode_png_gray16(int width, int height, std::span<const std::uint16_t> values) {
    if (values.size() != static_cast<std::size_t>(width) * height)
        throw ContractError("depth buffer size does not match dimensions");
    return encode(width, height, 16, PNG_COLOR_TYPE_GRAY, reinterpret_cast<const std::uint8_t*>(values.data()),
                  static_cast<std::size_t>(width) * 2);
}

std::vector<std::uint16_t> decode_png_gray16(std::span<const std::uint8_t> bytes, int& width, int& height) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw FormatError("not a PNG stream");
    std::string err;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, error_cb, warning_cb);
    if (!png) throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    ReadSource src{bytes};
    std::vector<std::uint16_t> out;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("PNG decode failed: " + err);
    }
    png_set_read_fn(png, &src, read_cb);
    png_read_info(png, info);
    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    if (png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY || png_get_bit_depth(png, info) != 16)
        png_error(png, "expected 16-bit grayscale");
    png_set_swap(png);
    png_read_update_info(png, info);
    out.resize(static_cast<std::size_t>(w) * h);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = reinterpret_cast<png_bytep>(out.data() + static_cast<std::size_t>(y) * w);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    width = static_cast<int>(w);
    height = static_cast<int>(h);
    return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string read_file_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

void write_file_text(const std::filesystem::path& path, std::string_view text) {
    write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void write_png(const std::filesystem::path& path, const Texture& image) {
    write_file_bytes(path, encode_png(image));
}

Texture read_png(const std::filesystem::path& path) {
    return decode_png(read_file_bytes(path));
}

}  // namespace synact
