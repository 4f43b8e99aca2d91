#pragma once

#include <optional>

namespace infodensity {

inline constexpr double kImageTokenWeight = 167.0;

/// Per-modality information shares used to combine image and text scores.
struct TokenWeights {
    double w_img = kImageTokenWeight;
    double w_txt = 0.0;
    bool operator==(const TokenWeights&) const = default;
};

/// (w_img * img + w_txt * txt) / (w_img + w_txt). An absent text score
/// (modality inapplicable) contributes 0 while its weight stays in the
/// denominator.
inline double weighted_combine(double img, std::optional<double> txt, const TokenWeights& w) {
    return (w.w_img * img + w.w_txt * txt.value_or(0.0)) / (w.w_img + w.w_txt);
}

} // namespace infodensity
