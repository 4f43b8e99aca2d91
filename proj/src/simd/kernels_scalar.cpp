#include "kernels_impl.hpp"

#include <cmath>

namespace infodensity::simd::detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

double l2sq_scalar(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

void stencil_row_scalar(const double* above, const double* row, const double* below,
                        std::size_t width, double* sobel, double* laplace) {
    for (std::size_t x = 1; x + 1 < width; ++x) {
        const double gx = (above[x + 1] - above[x - 1]) + 2.0 * (row[x + 1] - row[x - 1]) +
                          (below[x + 1] - below[x - 1]);
        const double gy = (below[x - 1] + 2.0 * below[x] + below[x + 1]) -
                          (above[x - 1] + 2.0 * above[x] + above[x + 1]);
        sobel[x - 1] = std::sqrt(gx * gx + gy * gy);
        const double lap = (above[x] + below[x] + row[x - 1] + row[x + 1]) - 4.0 * row[x];
        laplace[x - 1] = std::fabs(lap);
    }
}

} // namespace infodensity::simd::detail
