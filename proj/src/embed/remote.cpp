#include <fmt/format.h>

#include "infodensity/embed/embedder.hpp"
#include "infodensity/error.hpp"
#include "infodensity/util/hash.hpp"
#include "infodensity/util/http.hpp"
#include "infodensity/util/jsonl.hpp"
#include "infodensity/util/parallel.hpp"

namespace infodensity::embed {

namespace {

// POST {endpoint}/embed {"modality": ..., "inputs": [...]} -> {"vectors": [[...]], "dim": N}
class RemoteBackend final : public Backend {
public:
    explicit RemoteBackend(ProviderConfig config) : config_(std::move(config)) {}

    std::string id() const override { return "remote:" + config_.endpoint; }

    std::vector<std::vector<float>> embed(Modality modality, std::span<const Payload> payloads) override {
        const std::size_t batches = (payloads.size() + config_.batch_size - 1) / config_.batch_size;
        std::vector<std::vector<std::vector<float>>> results(batches);
        parallel_for_bounded(batches, config_.max_concurrency, [&](std::size_t b) {
            const auto begin = b * config_.batch_size;
            const auto end = std::min(payloads.size(), begin + config_.batch_size);
            results[b] = fetch(modality, payloads.subspan(begin, end - begin));
        });
        std::vector<std::vector<float>> out;
        out.reserve(payloads.size());
        for (auto& batch : results)
            for (auto& v : batch) out.push_back(std::move(v));
        return out;
    }

private:
    std::vector<std::vector<float>> fetch(Modality modality, std::span<const Payload> batch) const {
        Json inputs = Json::array();
        for (const auto& p : batch)
            inputs.push_back(modality == Modality::image ? base64_encode(p.bytes) : p.bytes);
        const Json body{{"modality", modality_name(modality)}, {"inputs", std::move(inputs)}};
        RetryPolicy policy;
        policy.max_retries = config_.max_retries;
        policy.timeout = config_.timeout;
        const auto res = post_json(config_.endpoint, "/embed", body.dump(), {}, policy);
        if (res.status != 200)
            throw ProviderError(fmt::format("embed endpoint returned HTTP {}", res.status));
        Json doc;
        try {
            doc = Json::parse(res.body);
        } catch (const Json::parse_error& e) {
            throw ProviderError(fmt::format("embed endpoint returned malformed JSON: {}", e.what()));
        }
        if (!doc.contains("vectors") || !doc["vectors"].is_array() || !doc.contains("dim"))
            throw ProviderError("embed response lacks 'vectors' or 'dim'");
        const auto dim = doc["dim"].get<std::size_t>();
        std::vector<std::vector<float>> out;
        for (const auto& v : doc["vectors"]) {
            auto vec = v.get<std::vector<float>>();
            if (vec.size() != dim)
                throw ProviderError(fmt::format("embed response vector dim {} != declared {}", vec.size(), dim));
            out.push_back(std::move(vec));
        }
        if (out.size() != batch.size())
            throw ProviderError(fmt::format("embed response has {} vectors for {} inputs", out.size(),
                                            batch.size()));
        return out;
    }

    ProviderConfig config_;
};

} // namespace

std::unique_ptr<Backend> make_remote_backend(const ProviderConfig& config) {
    return std::make_unique<RemoteBackend>(config);
}

} // namespace infodensity::embed
