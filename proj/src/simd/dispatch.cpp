#include "infodensity/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"

namespace infodensity::simd {

namespace {

const KernelTable kScalar{Isa::scalar, detail::dot_scalar, detail::l2sq_scalar,
                          detail::stencil_row_scalar};

#ifdef INFODENSITY_HAVE_AVX2
const KernelTable kAvx2{Isa::avx2, detail::dot_avx2, detail::l2sq_avx2,
                        detail::stencil_row_avx2};
#endif

#ifdef INFODENSITY_HAVE_NEON
const KernelTable kNeon{Isa::neon, detail::dot_neon, detail::l2sq_neon,
                        detail::stencil_row_neon};
#endif

const KernelTable* detect() {
    const char* env = std::getenv("INFODENSITY_SIMD");
    const std::string forced = env ? env : "";
    if (forced == "scalar") return &kScalar;
    if (forced == "avx2" && avx2_kernels()) return avx2_kernels();
    if (forced == "neon" && neon_kernels()) return neon_kernels();
    if (const auto* t = avx2_kernels()) return t;
    if (const auto* t = neon_kernels()) return t;
    return &kScalar;
}

std::atomic<const KernelTable*>& active() {
    static std::atomic<const KernelTable*> table{detect()};
    return table;
}

} // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
    }
    return "unknown";
}

const KernelTable& scalar_kernels() { return kScalar; }

const KernelTable* avx2_kernels() {
#ifdef INFODENSITY_HAVE_AVX2
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &kAvx2 : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable* neon_kernels() {
#ifdef INFODENSITY_HAVE_NEON
    return &kNeon;
#else
    return nullptr;
#endif
}

const KernelTable& kernels() { return *active().load(std::memory_order_acquire); }

void force_isa(Isa isa) {
    const KernelTable* table = &kScalar;
    if (isa == Isa::avx2 && avx2_kernels()) table = avx2_kernels();
    if (isa == Isa::neon && neon_kernels()) table = neon_kernels();
    active().store(table, std::memory_order_release);
}

} // namespace infodensity::simd
