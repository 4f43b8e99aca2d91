#include "infodensity/image/features.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "infodensity/error.hpp"
#include "infodensity/simd/kernels.hpp"

namespace infodensity::image {

namespace {

// BT.601 chroma written as weighted channel differences so grey pixels give
// exactly zero.
inline double chroma_b(double r, double g, double b) { return 0.168736 * (b - r) + 0.331264 * (b - g); }
inline double chroma_r(double r, double g, double b) { return 0.418688 * (r - g) + 0.081312 * (r - b); }

} // namespace

double max_chroma_magnitude() {
    static const double value = [] {
        double best = 0.0;
        for (int corner = 0; corner < 8; ++corner) {
            const double r = corner & 1, g = (corner >> 1) & 1, b = (corner >> 2) & 1;
            best = std::max(best, std::hypot(chroma_b(r, g, b), chroma_r(r, g, b)));
        }
        return best;
    }();
    return value;
}

ImageFeatures compute_image_features(const Raster& raster) {
    if (raster.width < 3 || raster.height < 3)
        throw ValidationError(
            fmt::format("image {}x{} is smaller than 3x3", raster.width, raster.height));
    const auto w = static_cast<std::size_t>(raster.width);
    const auto h = static_cast<std::size_t>(raster.height);
    const double pixels = static_cast<double>(w * h);
    const double chroma_scale = 1.0 / max_chroma_magnitude();

    std::vector<double> luma(w * h);
    double sum_c = 0.0;
    for (std::size_t i = 0; i < w * h; ++i) {
        const double r = raster.rgb[3 * i] / 255.0;
        const double g = raster.rgb[3 * i + 1] / 255.0;
        const double b = raster.rgb[3 * i + 2] / 255.0;
        luma[i] = 0.299 * r + 0.587 * g + 0.114 * b;
        sum_c += std::hypot(chroma_b(r, g, b), chroma_r(r, g, b)) * chroma_scale;
    }

    // Moments about the first pixel, so flat images give exact zeros.
    const double y0 = luma[0];
    double sum_d = 0.0, sum_d2 = 0.0;
    for (double y : luma) {
        sum_d += y - y0;
        sum_d2 += (y - y0) * (y - y0);
    }
    const double mean_d = sum_d / pixels;

    ImageFeatures f;
    f.width = raster.width;
    f.height = raster.height;
    f.light = y0 + mean_d;
    f.color = sum_c / pixels;
    f.contrast = std::sqrt(std::max(0.0, sum_d2 / pixels - mean_d * mean_d));

    const auto& k = simd::kernels();
    std::vector<double> sobel(w - 2), laplace(w - 2);
    double sum_s = 0.0, sum_s2 = 0.0, sum_l = 0.0;
    for (std::size_t y = 1; y + 1 < h; ++y) {
        k.stencil_row(&luma[(y - 1) * w], &luma[y * w], &luma[(y + 1) * w], w, sobel.data(),
                      laplace.data());
        for (std::size_t x = 0; x < w - 2; ++x) {
            sum_s += sobel[x];
            sum_s2 += sobel[x] * sobel[x];
            sum_l += laplace[x];
        }
    }
    const double interior = static_cast<double>((w - 2) * (h - 2));
    f.blur = sum_s / interior;
    f.si = std::sqrt(std::max(0.0, sum_s2 / interior - f.blur * f.blur));
    f.structure = sum_l / interior;
    return f;
}

std::array<double, 5> feature_distribution(std::span<const ImageFeatures> features) {
    if (features.size() < 2)
        throw ValidationError("feature_distribution needs at least two images");
    auto pick = [](const ImageFeatures& f, std::size_t i) {
        switch (i) {
        case 0: return f.light;
        case 1: return f.contrast;
        case 2: return f.color;
        case 3: return f.blur;
        default: return f.si;
        }
    };
    std::array<double, 5> out{};
    const double n = static_cast<double>(features.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double lo = pick(features[0], i), hi = lo, mean = 0.0;
        for (const auto& f : features) {
            const double v = pick(f, i);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            mean += v;
        }
        mean /= n;
        const double range = hi - lo;
        if (range <= 0.0) continue;
        double var = 0.0;
        for (const auto& f : features) var += (pick(f, i) - mean) * (pick(f, i) - mean);
        out[i] = (var / n) / (range * range);
    }
    return out;
}

std::string image_features_csv(std::span<const std::string> ids,
                               std::span<const ImageFeatures> features) {
    std::string out = "id,light,contrast,color,blur,si,structure\n";
    for (std::size_t i = 0; i < ids.size() && i < features.size(); ++i) {
        const auto& f = features[i];
        out += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", ids[i], f.light,
                           f.contrast, f.color, f.blur, f.si, f.structure);
    }
    return out;
}

} // namespace infodensity::image
