#include <cstdio>
#include <stdexcept>

#include <fmt/format.h>

#include "infodensity/diversity/diversity.hpp"
#include "infodensity/error.hpp"

namespace infodensity::diversity {

DedupResult semantic_dedup(const std::vector<std::vector<std::size_t>>& sorted_clusters,
                           std::span<const std::string> ids, Vectors vectors, double tau) {
    if (!(tau > -1.0 && tau <= 1.0)) throw ValidationError(fmt::format("tau {} outside (-1, 1]", tau));
    if (ids.size() != vectors.size()) throw std::invalid_argument("semantic_dedup: ids/vectors size mismatch");

    DedupResult out;
    out.tau = tau;
    std::vector<std::size_t> kept;
    std::size_t seen = 0;
    for (const auto& cluster : sorted_clusters) {
        for (auto i : cluster) {
            ++seen;
            std::size_t best = kept.size();
            double best_cos = -2.0;
            for (std::size_t j = 0; j < kept.size(); ++j) {
                const double c = embed::cosine(vectors[i], vectors[kept[j]]);
                if (c > best_cos) {
                    best_cos = c;
                    best = j;
                }
            }
            if (best < kept.size() && best_cos > tau) {
                out.removed_ids.push_back(ids[i]);
                out.audit.push_back({ids[i], ids[kept[best]], best_cos});
            } else {
                kept.push_back(i);
                out.kept_ids.push_back(ids[i]);
            }
        }
    }
    if (seen != ids.size()) throw std::invalid_argument("semantic_dedup: clusters do not cover every item");
    out.survival_ratio = seen == 0 ? 0.0 : static_cast<double>(kept.size()) / static_cast<double>(seen);
    return out;
}

std::string dedup_audit_csv(const DedupResult& result) {
    std::string out = "removed_id,kept_id,cosine\n";
    auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + "\"";
    };
    for (const auto& a : result.audit)
        out += fmt::format("{},{},{:.17g}\n", quote(a.removed_id), quote(a.kept_id), a.cosine);
    return out;
}

} // namespace infodensity::diversity
