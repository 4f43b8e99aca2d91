#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "infodensity/calibrate/calibrate.hpp"

namespace infodensity::calibrate {

double plcc(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ValidationError(fmt::format("correlation: lengths {} and {} differ", a.size(), b.size()));
    if (a.size() < 3) throw ValidationError("correlation needs at least 3 points");
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) throw ValidationError("correlation undefined for a constant vector");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double srcc(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ValidationError(fmt::format("correlation: lengths {} and {} differ", a.size(), b.size()));
    const auto ra = average_ranks(a), rb = average_ranks(b);
    return plcc(ra, rb);
}

CorrelationResult correlate(std::span<const double> a, std::span<const double> b) {
    CorrelationResult r;
    r.srcc = srcc(a, b);
    r.plcc = plcc(a, b);
    r.mean_corr = (r.srcc + r.plcc) / 2.0;
    return r;
}

} // namespace infodensity::calibrate
