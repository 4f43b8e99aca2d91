#include "kernels_impl.hpp"

#include <immintrin.h>

#include <cmath>

namespace infodensity::simd::detail {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

} // namespace

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double sum = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

double l2sq_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
        acc0 = _mm256_fmadd_pd(d0, d0, acc0);
        acc1 = _mm256_fmadd_pd(d1, d1, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc0 = _mm256_fmadd_pd(d, d, acc0);
    }
    double sum = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

// Per-pixel arithmetic follows the scalar kernel operation for operation
// (no fused multiply-add), so outputs match it bit for bit.
void stencil_row_avx2(const double* above, const double* row, const double* below,
                      std::size_t width, double* sobel, double* laplace) {
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d four = _mm256_set1_pd(4.0);
    const __m256d sign = _mm256_set1_pd(-0.0);
    std::size_t x = 1;
    for (; x + 4 < width; x += 4) {
        const __m256d al = _mm256_loadu_pd(above + x - 1);
        const __m256d ac = _mm256_loadu_pd(above + x);
        const __m256d ar = _mm256_loadu_pd(above + x + 1);
        const __m256d rl = _mm256_loadu_pd(row + x - 1);
        const __m256d rc = _mm256_loadu_pd(row + x);
        const __m256d rr = _mm256_loadu_pd(row + x + 1);
        const __m256d bl = _mm256_loadu_pd(below + x - 1);
        const __m256d bc = _mm256_loadu_pd(below + x);
        const __m256d br = _mm256_loadu_pd(below + x + 1);

        __m256d gx = _mm256_add_pd(_mm256_sub_pd(ar, al),
                                   _mm256_mul_pd(two, _mm256_sub_pd(rr, rl)));
        gx = _mm256_add_pd(gx, _mm256_sub_pd(br, bl));
        const __m256d gb = _mm256_add_pd(_mm256_add_pd(bl, _mm256_mul_pd(two, bc)), br);
        const __m256d ga = _mm256_add_pd(_mm256_add_pd(al, _mm256_mul_pd(two, ac)), ar);
        const __m256d gy = _mm256_sub_pd(gb, ga);
        const __m256d mag =
            _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(gx, gx), _mm256_mul_pd(gy, gy)));
        _mm256_storeu_pd(sobel + x - 1, mag);

        __m256d lap = _mm256_add_pd(_mm256_add_pd(_mm256_add_pd(ac, bc), rl), rr);
        lap = _mm256_sub_pd(lap, _mm256_mul_pd(four, rc));
        _mm256_storeu_pd(laplace + x - 1, _mm256_andnot_pd(sign, lap));
    }
    if (x + 1 < width) {
        stencil_row_scalar(above + x - 1, row + x - 1, below + x - 1, width - (x - 1),
                           sobel + x - 1, laplace + x - 1);
    }
}

} // namespace infodensity::simd::detail
