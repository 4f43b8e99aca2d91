#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infodensity/corpus/manifest.hpp"
#include "infodensity/embed/embedder.hpp"
#include "infodensity/image/features.hpp"
#include "infodensity/text/features.hpp"
#include "infodensity/util/jsonl.hpp"
#include "infodensity/weights.hpp"

namespace infodensity::diversity {

using Vectors = std::span<const std::vector<double>>;

struct ClusterAssignment {
    std::size_t k = 0;
    std::vector<std::size_t> labels;
    std::vector<std::vector<double>> centroids;
    double inertia = 0.0;
    std::vector<double> inertia_history;  ///< after every assignment step
    std::size_t iterations = 0;
};

/// round(sqrt(n)), at least 1.
std::size_t default_k(std::size_t n);

/// k-means++ seeding from Rng(seed), then Lloyd iterations until the
/// assignment stops changing or max_iter is reached. Distance ties go to the
/// lower cluster index. A cluster left empty is re-seeded with the point
/// farthest from its own centroid.
ClusterAssignment kmeans(Vectors vectors, std::size_t k, std::uint64_t seed, std::size_t max_iter = 100);

/// Per cluster, member indices sorted by descending mean cosine to all
/// members (self included); ties keep input order.
std::vector<std::vector<std::size_t>> intra_cluster_sort(const ClusterAssignment& assignment, Vectors vectors);

struct DedupAudit {
    std::string removed_id;
    std::string kept_id;  ///< most similar already-kept item
    double cosine = 0.0;
};

struct DedupResult {
    std::vector<std::string> kept_ids;
    std::vector<std::string> removed_ids;
    double tau = 0.0;
    double survival_ratio = 0.0;
    std::vector<DedupAudit> audit;
};

/// Walks clusters in order (cluster 0 first) and each cluster in its sorted
/// order. An item is dropped when its cosine to any already-kept item,
/// across all clusters, is strictly greater than tau.
DedupResult semantic_dedup(const std::vector<std::vector<std::size_t>>& sorted_clusters,
                           std::span<const std::string> ids, Vectors vectors, double tau);

std::string dedup_audit_csv(const DedupResult& result);

struct DiversityConfig {
    std::optional<std::size_t> k;  ///< default_k(n) when unset
    double tau_image = 0.92;
    double tau_text = 0.90;
    std::uint64_t seed = 0;
    std::size_t max_iter = 100;
};

struct ModalityDiversity {
    ClusterAssignment clusters;
    DedupResult dedup;
};

ModalityDiversity modality_diversity(std::span<const std::string> ids, Vectors vectors, double tau,
                                     const DiversityConfig& config);

struct DiversityResult {
    double img = 0.0;
    std::optional<double> txt;  ///< absent when the text modality is inapplicable
    double combined = 0.0;
    ModalityDiversity image_detail;
    std::optional<ModalityDiversity> text_detail;
};

/// Embeds each sample's image and question text, clusters and dedups each
/// modality independently and combines the survival ratios with `weights`.
DiversityResult diversity_model_eval(std::span<const corpus::Sample* const> samples, embed::Embedder& embedder,
                                     const DiversityConfig& config, const TokenWeights& weights,
                                     bool text_applicable = true);

Json to_json(const DiversityResult& result, const DiversityConfig& config);

struct DataDiversityFeatures {
    std::array<double, 5> image_spread{};
    std::array<double, text::kQuestionTypeCount> qtype_ratios{};
};

DataDiversityFeatures diversity_data_features(std::span<const image::ImageFeatures> images,
                                              std::span<const std::string> questions);

} // namespace infodensity::diversity
