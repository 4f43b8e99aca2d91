#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace infodensity::image {

/// Interleaved 8-bit RGB, row-major.
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    Raster() = default;
    Raster(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::uint8_t* pixel(int x, int y) { return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
    const std::uint8_t* pixel(int x, int y) const {
        return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
    void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        auto* p = pixel(x, y);
        p[0] = r;
        p[1] = g;
        p[2] = b;
    }
};

/// Decodes PNG or JPEG (sniffed from the signature). Grayscale and palette
/// inputs are promoted to RGB; alpha is composited away. Throws
/// ValidationError for anything else.
Raster decode_image(std::string_view bytes);
Raster load_image(const std::filesystem::path& path);

std::string encode_png(const Raster& raster);
void save_png(const Raster& raster, const std::filesystem::path& path);

/// Sub-rectangle copy; the rectangle must lie inside the raster.
Raster crop(const Raster& raster, int x, int y, int w, int h);

} // namespace infodensity::image
