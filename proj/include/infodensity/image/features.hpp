#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "infodensity/image/raster.hpp"

namespace infodensity::image {

/// Low-level statistics of one image, all on the BT.601 luma plane
/// Y = (0.299 R + 0.587 G + 0.114 B) / 255 unless noted.
struct ImageFeatures {
    double light = 0.0;      ///< mean Y
    double contrast = 0.0;   ///< population stddev of Y
    double color = 0.0;      ///< mean |(Cb, Cr)|, scaled so the RGB gamut maps to [0, 1]
    double blur = 0.0;       ///< mean Sobel magnitude (interior pixels)
    double si = 0.0;         ///< stddev of Sobel magnitude (interior pixels)
    double structure = 0.0;  ///< mean |4-neighbour Laplacian| (interior pixels)
    int width = 0;
    int height = 0;
};

/// Largest chroma magnitude attainable from RGB input; the `color` scale.
double max_chroma_magnitude();

/// Throws ValidationError for rasters smaller than 3x3.
ImageFeatures compute_image_features(const Raster& raster);

/// Order of the diversity spread vector.
inline constexpr std::array<const char*, 5> kSpreadFeatureNames = {"light", "contrast", "color",
                                                                   "blur", "si"};

/// Per-feature population variance across images divided by the squared
/// observed range (0 when the range is 0). Requires at least two images.
std::array<double, 5> feature_distribution(std::span<const ImageFeatures> features);

/// `id,light,contrast,color,blur,si,structure` with a header row.
std::string image_features_csv(std::span<const std::string> ids,
                               std::span<const ImageFeatures> features);

} // namespace infodensity::image
