#include <doctest.h>

#include <cmath>
#include <vector>

#include "infodensity/simd/kernels.hpp"
#include "infodensity/util/rng.hpp"

using namespace infodensity;

namespace {

std::vector<const simd::KernelTable*> vector_tables() {
    std::vector<const simd::KernelTable*> out;
    if (auto* t = simd::avx2_kernels()) out.push_back(t);
    if (auto* t = simd::neon_kernels()) out.push_back(t);
    return out;
}

std::vector<double> random_vec(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.unit() * 2.0 - 1.0;
    return v;
}

} // namespace

TEST_CASE("scalar kernels match definitions") {
    const auto& k = simd::scalar_kernels();
    const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
    CHECK(k.dot(a.data(), b.data(), 3) == 32.0);
    CHECK(k.l2sq(a.data(), b.data(), 3) == 27.0);
    CHECK(k.dot(a.data(), b.data(), 0) == 0.0);
}

TEST_CASE("vector dot and l2sq agree with scalar for every length") {
    const auto& s = simd::scalar_kernels();
    Rng rng(1);
    for (const auto* t : vector_tables()) {
        CAPTURE(simd::isa_name(t->isa));
        for (std::size_t n = 0; n <= 67; ++n) {
            const auto a = random_vec(rng, n), b = random_vec(rng, n);
            const double tol = 1e-12 * static_cast<double>(n + 1);
            CHECK(std::fabs(t->dot(a.data(), b.data(), n) - s.dot(a.data(), b.data(), n)) <= tol);
            CHECK(std::fabs(t->l2sq(a.data(), b.data(), n) - s.l2sq(a.data(), b.data(), n)) <= tol);
        }
    }
}

TEST_CASE("vector stencil agrees with scalar for every width") {
    const auto& s = simd::scalar_kernels();
    Rng rng(2);
    for (const auto* t : vector_tables()) {
        CAPTURE(simd::isa_name(t->isa));
        for (std::size_t w = 3; w <= 41; ++w) {
            const auto above = random_vec(rng, w), row = random_vec(rng, w), below = random_vec(rng, w);
            std::vector<double> s1(w - 2), l1(w - 2), s2(w - 2), l2(w - 2);
            s.stencil_row(above.data(), row.data(), below.data(), w, s1.data(), l1.data());
            t->stencil_row(above.data(), row.data(), below.data(), w, s2.data(), l2.data());
            for (std::size_t x = 0; x < w - 2; ++x) {
                CHECK(s2[x] == doctest::Approx(s1[x]).epsilon(1e-14));
                CHECK(l2[x] == doctest::Approx(l1[x]).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("force_isa switches the dispatched table") {
    const auto original = simd::kernels().isa;
    simd::force_isa(simd::Isa::scalar);
    CHECK(simd::kernels().isa == simd::Isa::scalar);
    if (simd::avx2_kernels()) {
        simd::force_isa(simd::Isa::avx2);
        CHECK(simd::kernels().isa == simd::Isa::avx2);
    }
    simd::force_isa(original);
}
