#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "infodensity/diversity/diversity.hpp"
#include "infodensity/error.hpp"
#include "infodensity/simd/kernels.hpp"
#include "infodensity/util/rng.hpp"

namespace infodensity::diversity {

namespace {

double l2sq(const std::vector<double>& a, const std::vector<double>& b) {
    return simd::kernels().l2sq(a.data(), b.data(), a.size());
}

// Index of the nearest centroid; ties go to the lowest index.
std::size_t nearest(const std::vector<double>& x, const std::vector<std::vector<double>>& centroids,
                    double& dist) {
    std::size_t best = 0;
    dist = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = l2sq(x, centroids[c]);
        if (d < dist) {
            dist = d;
            best = c;
        }
    }
    return best;
}

std::vector<std::vector<double>> plus_plus_init(Vectors vectors, std::size_t k, Rng& rng) {
    const auto n = vectors.size();
    std::vector<std::vector<double>> centroids;
    centroids.reserve(k);
    centroids.push_back(vectors[rng.below(n)]);
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = l2sq(vectors[i], centroids[0]);
    while (centroids.size() < k) {
        double total = 0.0;
        for (double d : d2) total += d;
        std::size_t pick = 0;
        if (total <= 0.0) {
            pick = rng.below(n);
        } else {
            const double target = rng.unit() * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > target && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        }
        centroids.push_back(vectors[pick]);
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], l2sq(vectors[i], centroids.back()));
    }
    return centroids;
}

} // namespace

std::size_t default_k(std::size_t n) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n)))));
}

ClusterAssignment kmeans(Vectors vectors, std::size_t k, std::uint64_t seed, std::size_t max_iter) {
    const auto n = vectors.size();
    if (k < 1 || k > n)
        throw ValidationError(fmt::format("kmeans: k={} must lie in [1, {}]", k, n));
    const auto dim = vectors[0].size();
    for (const auto& v : vectors)
        if (v.size() != dim) throw std::invalid_argument("kmeans: vectors differ in dimension");

    Rng rng(seed);
    ClusterAssignment out;
    out.k = k;
    out.centroids = plus_plus_init(vectors, k, rng);
    out.labels.assign(n, 0);

    bool first = true;
    for (std::size_t iter = 0; iter < std::max<std::size_t>(1, max_iter); ++iter) {
        bool changed = false;
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = 0.0;
            const auto c = nearest(vectors[i], out.centroids, d);
            inertia += d;
            if (c != out.labels[i]) changed = true;
            out.labels[i] = c;
        }
        out.inertia_history.push_back(inertia);
        out.iterations = iter + 1;
        if (!changed && !first) break;
        first = false;

        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto& s = sums[out.labels[i]];
            for (std::size_t d = 0; d < dim; ++d) s[d] += vectors[i][d];
            ++counts[out.labels[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            for (auto& x : sums[c]) x /= static_cast<double>(counts[c]);
            out.centroids[c] = std::move(sums[c]);
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            // Farthest point from its own centroid, taken from a cluster that can spare it.
            std::size_t far = n;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[out.labels[i]] < 2) continue;
                const double d = l2sq(vectors[i], out.centroids[out.labels[i]]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            if (far == n) continue;
            --counts[out.labels[far]];
            out.centroids[c] = vectors[far];
            out.labels[far] = c;
            counts[c] = 1;
        }
    }

    // Inertia against the returned centroids.
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) inertia += l2sq(vectors[i], out.centroids[out.labels[i]]);
    out.inertia = inertia;
    if (inertia < out.inertia_history.back()) out.inertia_history.push_back(inertia);
    return out;
}

std::vector<std::vector<std::size_t>> intra_cluster_sort(const ClusterAssignment& assignment, Vectors vectors) {
    std::vector<std::vector<std::size_t>> members(assignment.k);
    for (std::size_t i = 0; i < assignment.labels.size(); ++i) members[assignment.labels[i]].push_back(i);
    const auto& kern = simd::kernels();
    for (auto& m : members) {
        std::vector<double> mean(m.size(), 0.0);
        for (std::size_t a = 0; a < m.size(); ++a) {
            const auto& u = vectors[m[a]];
            const double nu = std::sqrt(kern.dot(u.data(), u.data(), u.size()));
            double s = 0.0;
            for (std::size_t b = 0; b < m.size(); ++b) {
                const auto& v = vectors[m[b]];
                const double nv = std::sqrt(kern.dot(v.data(), v.data(), v.size()));
                s += kern.dot(u.data(), v.data(), u.size()) / (nu * nv);
            }
            mean[a] = s / static_cast<double>(m.size());
        }
        std::vector<std::size_t> order(m.size());
        for (std::size_t a = 0; a < order.size(); ++a) order[a] = a;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return mean[x] > mean[y]; });
        std::vector<std::size_t> sorted;
        sorted.reserve(m.size());
        for (auto a : order) sorted.push_back(m[a]);
        m = std::move(sorted);
    }
    return members;
}

} // namespace infodensity::diversity
