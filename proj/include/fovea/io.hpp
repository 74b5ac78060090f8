#pragma once

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <png.h>
#include <jpeglib.h>

#include "fovea/error.hpp"
#include "fovea/image.hpp"

namespace fovea {

namespace detail {

inline std::vector<unsigned char> read_all(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FileNotFound(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline bool is_png(const std::vector<unsigned char>& bytes)
{
    return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

inline bool is_jpeg(const std::vector<unsigned char>& bytes)
{
    return bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF;
}

struct PngReadSource
{
    const std::vector<unsigned char>* bytes;
    std::size_t offset;
};

inline void png_read_from_memory(png_structp png, png_bytep out, png_size_t count)
{
    auto* src = static_cast<PngReadSource*>(png_get_io_ptr(png));
    if (src->offset + count > src->bytes->size())
        png_error(png, "truncated stream");
    std::memcpy(out, src->bytes->data() + src->offset, count);
    src->offset += count;
}

struct PngErrorState
{
    std::jmp_buf jump;
    char message[256] = {};
};

inline void png_on_error(png_structp png, png_const_charp msg)
{
    auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
    std::snprintf(state->message, sizeof(state->message), "%s", msg);
    std::longjmp(state->jump, 1);
}

inline void png_on_warning(png_structp, png_const_charp) {}

// Only C objects live between setjmp and any longjmp below.
inline RgbImage decode_png(const std::vector<unsigned char>& bytes, const std::string& path)
{
    PngErrorState err;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_on_error, png_on_warning);
    if (!png)
        throw DecodeError(path, "libpng init failed");
    png_infop info = png_create_info_struct(png);
    std::vector<png_bytep> rows;
    std::vector<unsigned char> buffer;
    PngReadSource src{&bytes, 0};
    png_uint_32 width = 0;
    png_uint_32 height = 0;

    if (setjmp(err.jump)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DecodeError(path, err.message);
    }

    png_set_read_fn(png, &src, png_read_from_memory);
    png_read_info(png, info);

    width = png_get_image_width(png, info);
    height = png_get_image_height(png, info);
    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);

    // 16-bit samples keep their high byte only.
    if (bit_depth == 16)
        png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    if ((color_type & PNG_COLOR_MASK_ALPHA) || png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    if (png_get_rowbytes(png, info) != static_cast<png_size_t>(width) * 3)
        png_error(png, "unexpected row layout");

    buffer.resize(static_cast<std::size_t>(width) * height * 3);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y)
        rows[y] = buffer.data() + static_cast<std::size_t>(y) * width * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    RgbImage img(static_cast<int>(width), static_cast<int>(height));
    auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i)
        px[i] = Rgb{buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]};
    return img;
}

struct JpegErrorState
{
    jpeg_error_mgr mgr;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX] = {};
};

inline void jpeg_on_error(j_common_ptr cinfo)
{
    auto* state = reinterpret_cast<JpegErrorState*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, state->message);
    std::longjmp(state->jump, 1);
}

inline RgbImage decode_jpeg(const std::vector<unsigned char>& bytes, const std::string& path)
{
    jpeg_decompress_struct cinfo;
    JpegErrorState err;
    cinfo.err = jpeg_std_error(&err.mgr);
    err.mgr.error_exit = jpeg_on_error;
    std::vector<unsigned char> buffer;

    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw DecodeError(path, err.message);
    }

    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    const auto width = cinfo.output_width;
    const auto height = cinfo.output_height;
    buffer.resize(static_cast<std::size_t>(width) * height * 3);
    while (cinfo.output_scanline < height) {
        JSAMPROW row = buffer.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);

    RgbImage img(static_cast<int>(width), static_cast<int>(height));
    auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i)
        px[i] = Rgb{buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]};
    return img;
}

inline void write_png(const std::string& path, const void* data, int width, int height, png_uint_32 format)
{
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = format;
    if (!png_image_write_to_file(&image, path.c_str(), 0, data, 0, nullptr)) {
        std::string reason = image.message[0] ? image.message : "libpng write failed";
        png_image_free(&image);
        std::error_code ec;
        std::filesystem::remove(path, ec);
        throw WriteError(path, reason);
    }
}

} // namespace detail

/// Decodes a PNG or JPEG file into 8-bit RGB.
inline RgbImage load_image(const std::string& path)
{
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec))
        throw FileNotFound(path);
    const auto bytes = detail::read_all(path);
    if (detail::is_png(bytes))
        return detail::decode_png(bytes, path);
    if (detail::is_jpeg(bytes))
        return detail::decode_jpeg(bytes, path);
    throw DecodeError(path, "unsupported format");
}

inline void save_png(const RgbImage& img, const std::string& path)
{
    static_assert(sizeof(Rgb) == 3, "Rgb must be tightly packed");
    detail::write_png(path, img.pixels().data(), img.width(), img.height(), PNG_FORMAT_RGB);
}

inline void save_png(const GrayImage& img, const std::string& path)
{
    detail::write_png(path, img.pixels().data(), img.width(), img.height(), PNG_FORMAT_GRAY);
}

} // namespace fovea
