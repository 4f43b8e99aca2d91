#include "kernels_impl.hpp"

#include <arm_neon.h>

namespace infodensity::simd::detail {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

double l2sq_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float64x2_t d0 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        const float64x2_t d1 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
        acc0 = vfmaq_f64(acc0, d0, d0);
        acc1 = vfmaq_f64(acc1, d1, d1);
    }
    double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

void stencil_row_neon(const double* above, const double* row, const double* below,
                      std::size_t width, double* sobel, double* laplace) {
    const float64x2_t two = vdupq_n_f64(2.0);
    const float64x2_t four = vdupq_n_f64(4.0);
    std::size_t x = 1;
    for (; x + 2 < width; x += 2) {
        const float64x2_t al = vld1q_f64(above + x - 1);
        const float64x2_t ac = vld1q_f64(above + x);
        const float64x2_t ar = vld1q_f64(above + x + 1);
        const float64x2_t rl = vld1q_f64(row + x - 1);
        const float64x2_t rc = vld1q_f64(row + x);
        const float64x2_t rr = vld1q_f64(row + x + 1);
        const float64x2_t bl = vld1q_f64(below + x - 1);
        const float64x2_t bc = vld1q_f64(below + x);
        const float64x2_t br = vld1q_f64(below + x + 1);

        float64x2_t gx = vaddq_f64(vsubq_f64(ar, al), vmulq_f64(two, vsubq_f64(rr, rl)));
        gx = vaddq_f64(gx, vsubq_f64(br, bl));
        const float64x2_t gb = vaddq_f64(vaddq_f64(bl, vmulq_f64(two, bc)), br);
        const float64x2_t ga = vaddq_f64(vaddq_f64(al, vmulq_f64(two, ac)), ar);
        const float64x2_t gy = vsubq_f64(gb, ga);
        vst1q_f64(sobel + x - 1,
                  vsqrtq_f64(vaddq_f64(vmulq_f64(gx, gx), vmulq_f64(gy, gy))));

        float64x2_t lap = vaddq_f64(vaddq_f64(vaddq_f64(ac, bc), rl), rr);
        lap = vsubq_f64(lap, vmulq_f64(four, rc));
        vst1q_f64(laplace + x - 1, vabsq_f64(lap));
    }
    if (x + 1 < width) {
        stencil_row_scalar(above + x - 1, row + x - 1, below + x - 1, width - (x - 1),
                           sobel + x - 1, laplace + x - 1);
    }
}

} // namespace infodensity::simd::detail
