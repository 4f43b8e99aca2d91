#include "infodensity/image/raster.hpp"

#include <png.h>
#include <jpeglib.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>

#include <fmt/format.h>

#include "infodensity/error.hpp"
#include "infodensity/util/hash.hpp"

namespace infodensity::image {

namespace {

Raster decode_png(std::string_view bytes) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()))
        throw ValidationError(fmt::format("PNG decode failed: {}", img.message));
    img.format = PNG_FORMAT_RGB;
    Raster r(static_cast<int>(img.width), static_cast<int>(img.height));
    if (!png_image_finish_read(&img, nullptr, r.rgb.data(), 0, nullptr)) {
        png_image_free(&img);
        throw ValidationError(fmt::format("PNG decode failed: {}", img.message));
    }
    return r;
}

struct JpegError {
    jpeg_error_mgr mgr;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegError*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

// Kept free of objects with non-trivial destructors: longjmp skips them.
bool decode_jpeg_raw(const unsigned char* data, unsigned long size, std::vector<std::uint8_t>& out,
                     int& width, int& height, char* message) {
    jpeg_decompress_struct cinfo;
    JpegError err;
    cinfo.err = jpeg_std_error(&err.mgr);
    err.mgr.error_exit = jpeg_error_exit;
    if (setjmp(err.jump)) {
        std::strncpy(message, err.message, JMSG_LENGTH_MAX);
        jpeg_destroy_decompress(&cinfo);
        return false;
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, data, size);
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    width = static_cast<int>(cinfo.output_width);
    height = static_cast<int>(cinfo.output_height);
    out.resize(static_cast<std::size_t>(width) * height * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = out.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return true;
}

Raster decode_jpeg(std::string_view bytes) {
    Raster r;
    char message[JMSG_LENGTH_MAX] = {};
    if (!decode_jpeg_raw(reinterpret_cast<const unsigned char*>(bytes.data()),
                         static_cast<unsigned long>(bytes.size()), r.rgb, r.width, r.height, message))
        throw ValidationError(fmt::format("JPEG decode failed: {}", message));
    return r;
}

} // namespace

Raster decode_image(std::string_view bytes) {
    static constexpr unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSig, 8) == 0) return decode_png(bytes);
    if (bytes.size() >= 3 && static_cast<unsigned char>(bytes[0]) == 0xFF &&
        static_cast<unsigned char>(bytes[1]) == 0xD8 && static_cast<unsigned char>(bytes[2]) == 0xFF)
        return decode_jpeg(bytes);
    throw ValidationError("unsupported image format (expected PNG or JPEG)");
}

Raster load_image(const std::filesystem::path& path) {
    std::string bytes;
    try {
        bytes = read_file_bytes(path.string());
    } catch (const std::exception& e) {
        throw ValidationError(e.what());
    }
    try {
        return decode_image(bytes);
    } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

std::string encode_png(const Raster& raster) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(raster.width);
    img.height = static_cast<png_uint_32>(raster.height);
    img.format = PNG_FORMAT_RGB;
    png_alloc_size_t size = 0;
    if (!png_image_write_get_memory_size(img, size, 0, raster.rgb.data(), 0, nullptr))
        throw std::runtime_error(fmt::format("PNG encode failed: {}", img.message));
    std::string out(size, '\0');
    if (!png_image_write_to_memory(&img, out.data(), &size, 0, raster.rgb.data(), 0, nullptr))
        throw std::runtime_error(fmt::format("PNG encode failed: {}", img.message));
    out.resize(size);
    return out;
}

void save_png(const Raster& raster, const std::filesystem::path& path) {
    const auto bytes = encode_png(raster);
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write " + path.string());
    const auto written = std::fwrite(bytes.data(), 1, bytes.size(), f);
    std::fclose(f);
    if (written != bytes.size()) throw std::runtime_error("short write " + path.string());
}

Raster crop(const Raster& raster, int x, int y, int w, int h) {
    if (x < 0 || y < 0 || w <= 0 || h <= 0 || x + w > raster.width || y + h > raster.height)
        throw std::out_of_range("crop rectangle outside raster");
    Raster out(w, h);
    for (int row = 0; row < h; ++row)
        std::memcpy(out.pixel(0, row), raster.pixel(x, y + row), static_cast<std::size_t>(w) * 3);
    return out;
}

} // namespace infodensity::image
