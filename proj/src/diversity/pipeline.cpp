#include <algorithm>
#include <future>

#include <fmt/format.h>

#include "infodensity/diversity/diversity.hpp"
#include "infodensity/error.hpp"
#include "infodensity/util/hash.hpp"

namespace infodensity::diversity {

ModalityDiversity modality_diversity(std::span<const std::string> ids, Vectors vectors, double tau,
                                     const DiversityConfig& config) {
    if (vectors.empty()) throw ValidationError("diversity needs at least one item");
    const auto k = std::min(config.k.value_or(default_k(vectors.size())), vectors.size());
    ModalityDiversity out;
    out.clusters = kmeans(vectors, k, config.seed, config.max_iter);
    const auto sorted = intra_cluster_sort(out.clusters, vectors);
    out.dedup = semantic_dedup(sorted, ids, vectors, tau);
    return out;
}

DiversityResult diversity_model_eval(std::span<const corpus::Sample* const> samples, embed::Embedder& embedder,
                                     const DiversityConfig& config, const TokenWeights& weights,
                                     bool text_applicable) {
    if (samples.empty()) throw ValidationError("diversity needs at least one sample");
    std::vector<std::string> ids;
    std::vector<embed::Payload> images;
    std::vector<std::string> questions;
    for (const auto* s : samples) {
        ids.push_back(s->id);
        std::string bytes;
        try {
            bytes = read_file_bytes(s->image_path.string());
        } catch (const std::exception& e) {
            throw ValidationError(fmt::format("sample {}: {}", s->id, e.what()));
        }
        images.push_back({s->image_ref, std::move(bytes)});
        questions.push_back(s->question);
    }
    auto values = [](const std::vector<embed::EmbeddingVector>& vs) {
        std::vector<std::vector<double>> out;
        out.reserve(vs.size());
        for (const auto& v : vs) out.push_back(v.values);
        return out;
    };
    const auto img_vecs = values(embedder.embed(embed::Modality::image, images));
    std::vector<std::vector<double>> txt_vecs;
    if (text_applicable) txt_vecs = values(embedder.embed_texts(questions));

    // Modalities are independent; cluster them concurrently.
    auto txt_future = std::async(std::launch::async, [&]() -> std::optional<ModalityDiversity> {
        if (!text_applicable) return std::nullopt;
        return modality_diversity(ids, txt_vecs, config.tau_text, config);
    });
    DiversityResult out;
    out.image_detail = modality_diversity(ids, img_vecs, config.tau_image, config);
    out.text_detail = txt_future.get();
    out.img = out.image_detail.dedup.survival_ratio;
    if (out.text_detail) out.txt = out.text_detail->dedup.survival_ratio;
    out.combined = weighted_combine(out.img, out.txt, weights);
    return out;
}

Json to_json(const DiversityResult& result, const DiversityConfig& config) {
    auto modality = [&](const ModalityDiversity& m) {
        return Json{{"k", m.clusters.k},
                    {"iterations", m.clusters.iterations},
                    {"inertia", m.clusters.inertia},
                    {"tau", m.dedup.tau},
                    {"kept", m.dedup.kept_ids.size()},
                    {"removed", m.dedup.removed_ids.size()},
                    {"survival_ratio", m.dedup.survival_ratio}};
    };
    Json j{{"img", result.img},
           {"txt", result.txt ? Json(*result.txt) : Json(nullptr)},
           {"combined", result.combined},
           {"seed", config.seed},
           {"dedup_scope", "global"},
           {"image", modality(result.image_detail)}};
    j["text"] = result.text_detail ? modality(*result.text_detail) : Json(nullptr);
    return j;
}

DataDiversityFeatures diversity_data_features(std::span<const image::ImageFeatures> images,
                                              std::span<const std::string> questions) {
    DataDiversityFeatures out;
    out.image_spread = image::feature_distribution(images);
    out.qtype_ratios = text::qtype_ratios(questions);
    return out;
}

} // namespace infodensity::diversity
