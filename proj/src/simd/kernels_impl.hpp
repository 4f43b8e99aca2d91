#pragma once

#include <cstddef>

namespace infodensity::simd::detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
double l2sq_scalar(const double* a, const double* b, std::size_t n);
void stencil_row_scalar(const double* above, const double* row, const double* below,
                        std::size_t width, double* sobel, double* laplace);

#ifdef INFODENSITY_HAVE_AVX2
double dot_avx2(const double* a, const double* b, std::size_t n);
double l2sq_avx2(const double* a, const double* b, std::size_t n);
void stencil_row_avx2(const double* above, const double* row, const double* below,
                      std::size_t width, double* sobel, double* laplace);
#endif

#ifdef INFODENSITY_HAVE_NEON
double dot_neon(const double* a, const double* b, std::size_t n);
double l2sq_neon(const double* a, const double* b, std::size_t n);
void stencil_row_neon(const double* above, const double* row, const double* below,
                      std::size_t width, double* sobel, double* laplace);
#endif

} // namespace infodensity::simd::detail
