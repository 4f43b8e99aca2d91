#include <algorithm>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

#include "infodensity/corpus/manifest.hpp"
#include "infodensity/error.hpp"
#include "infodensity/util/rng.hpp"

namespace infodensity::corpus {

AlignedSubset sample_align(const BenchmarkManifest& benchmark, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ValidationError("sample_align: n must be >= 1");
    if (benchmark.samples.empty()) throw ValidationError("sample_align: empty benchmark");

    AlignedSubset subset;
    subset.parent = benchmark.name;
    subset.seed = seed;
    subset.prng = std::string(Rng::kAlgorithm);

    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < benchmark.samples.size(); ++i)
        if (benchmark.samples[i].usable) usable.push_back(i);
    subset.excluded = benchmark.samples.size() - usable.size();

    if (usable.size() > n) {
        Rng rng(seed);
        for (std::size_t i = 0; i < n; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.below(usable.size() - i));
            std::swap(usable[i], usable[j]);
        }
        usable.resize(n);
        std::sort(usable.begin(), usable.end());
    }
    subset.sample_ids.reserve(usable.size());
    for (auto i : usable) subset.sample_ids.push_back(benchmark.samples[i].id);
    return subset;
}

Json to_json(const AlignedSubset& s) {
    return Json{{"parent", s.parent},
                {"seed", s.seed},
                {"sample_ids", s.sample_ids},
                {"excluded", s.excluded},
                {"prng", s.prng}};
}

AlignedSubset aligned_subset_from_json(const Json& j) {
    AlignedSubset s;
    s.parent = j.at("parent").get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.sample_ids = j.at("sample_ids").get<std::vector<std::string>>();
    s.excluded = j.at("excluded").get<std::size_t>();
    s.prng = j.at("prng").get<std::string>();
    return s;
}

std::vector<const Sample*> resolve(const BenchmarkManifest& benchmark, const AlignedSubset& subset) {
    std::unordered_map<std::string, const Sample*> by_id;
    for (const auto& s : benchmark.samples) by_id.emplace(s.id, &s);
    std::vector<const Sample*> out;
    out.reserve(subset.sample_ids.size());
    for (const auto& id : subset.sample_ids) {
        auto it = by_id.find(id);
        if (it == by_id.end())
            throw ValidationError(fmt::format("aligned id '{}' not in benchmark '{}'", id, benchmark.name));
        out.push_back(it->second);
    }
    return out;
}

} // namespace infodensity::corpus
