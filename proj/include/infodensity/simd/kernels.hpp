#pragma once

// Data-parallel inner loops shared by the embedding, clustering and image
// feature code. Every kernel has a scalar reference implementation; vector
// variants are selected at runtime and are equivalence-tested against it.

#include <cstddef>
#include <string_view>

namespace infodensity::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
    Isa isa;

    double (*dot)(const double* a, const double* b, std::size_t n);

    /// Squared Euclidean distance.
    double (*l2sq)(const double* a, const double* b, std::size_t n);

    /// 3x3 stencils over one interior row of a luma plane. `above`, `row`
    /// and `below` are consecutive rows of length `width` (>= 3). For every
    /// x in [1, width-1) writes the Sobel gradient magnitude to
    /// sobel[x-1] and the absolute 4-neighbour Laplacian response to
    /// laplace[x-1].
    void (*stencil_row)(const double* above, const double* row, const double* below,
                        std::size_t width, double* sobel, double* laplace);
};

/// Table selected for this CPU (honours INFODENSITY_SIMD=scalar|avx2|neon).
const KernelTable& kernels();

const KernelTable& scalar_kernels();

/// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

/// Overrides the dispatched table; used by tests and benchmarks.
void force_isa(Isa isa);

} // namespace infodensity::simd
