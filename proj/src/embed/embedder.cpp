#include "infodensity/embed/embedder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "infodensity/embed/file_store.hpp"
#include "infodensity/error.hpp"
#include "infodensity/simd/kernels.hpp"
#include "infodensity/util/hash.hpp"

namespace infodensity::embed {

std::unique_ptr<Backend> make_remote_backend(const ProviderConfig& config);  // remote.cpp

namespace {

class FileBackend final : public Backend {
public:
    explicit FileBackend(const std::filesystem::path& path)
        : path_(path), store_(FileStore::read(path)) {}

    std::string id() const override { return "file:" + path_.filename().string(); }

    std::vector<std::vector<float>> embed(Modality modality, std::span<const Payload> payloads) override {
        std::vector<std::vector<float>> out;
        out.reserve(payloads.size());
        for (const auto& p : payloads) {
            const auto key = fmt::format("{}:{}", modality_name(modality), p.key);
            auto it = store_.vectors.find(key);
            if (it == store_.vectors.end())
                throw ProviderError(fmt::format("embedding store {} has no id '{}'", path_.string(), key));
            out.push_back(it->second);
        }
        return out;
    }

private:
    std::filesystem::path path_;
    FileStore store_;
};

} // namespace

std::string_view modality_name(Modality m) { return m == Modality::text ? "text" : "image"; }

void ProviderConfig::validate() const {
    if (mode == Mode::remote) {
        if (endpoint.empty()) throw ValidationError("remote embedding provider needs an endpoint");
        if (!store_path.empty())
            throw ValidationError("remote embedding provider must not set store_path");
    } else {
        if (store_path.empty()) throw ValidationError("file embedding provider needs store_path");
        if (!endpoint.empty()) throw ValidationError("file embedding provider must not set endpoint");
    }
    if (batch_size == 0) throw ValidationError("embedding batch_size must be >= 1");
    if (max_concurrency == 0) throw ValidationError("embedding max_concurrency must be >= 1");
}

std::unique_ptr<Backend> make_backend(const ProviderConfig& config) {
    config.validate();
    if (config.mode == ProviderConfig::Mode::file) return std::make_unique<FileBackend>(config.store_path);
    return make_remote_backend(config);
}

std::vector<double> normalize_quantized(std::span<const float> raw) {
    double norm2 = 0.0;
    for (float f : raw) norm2 += static_cast<double>(f) * f;
    const double norm = std::sqrt(norm2);
    std::vector<double> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        out[i] = static_cast<double>(static_cast<float>(raw[i] / norm));
    return out;
}

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size())
        throw std::invalid_argument(fmt::format("cosine: dim mismatch {} vs {}", u.size(), v.size()));
    const auto& k = simd::kernels();
    const double uu = k.dot(u.data(), u.data(), u.size());
    const double vv = k.dot(v.data(), v.data(), v.size());
    if (uu == 0.0 || vv == 0.0) throw std::invalid_argument("cosine: zero vector");
    const double c = k.dot(u.data(), v.data(), u.size()) / (std::sqrt(uu) * std::sqrt(vv));
    return std::clamp(c, -1.0, 1.0);
}

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) { return cosine(u.values, v.values); }

Embedder::Embedder(std::shared_ptr<Backend> backend) : backend_(std::move(backend)) {}

std::optional<std::size_t> Embedder::dim() const {
    std::lock_guard lock(mutex_);
    return dim_;
}

std::string Embedder::cache_key(Modality modality, const Payload& payload) const {
    std::string material(modality_name(modality));
    material += '\0';
    material += payload.bytes;
    return sha256_hex(material);
}

EmbeddingVector Embedder::admit(std::vector<float> raw) {
    if (raw.size() < 2) throw ProviderError(fmt::format("embedding has dim {} (< 2)", raw.size()));
    double norm2 = 0.0;
    for (float f : raw) {
        if (!std::isfinite(f)) throw ProviderError("embedding has non-finite component");
        norm2 += static_cast<double>(f) * f;
    }
    if (norm2 == 0.0) throw ProviderError("embedding is the zero vector");
    if (!dim_) dim_ = raw.size();
    if (raw.size() != *dim_)
        throw ProviderError(fmt::format("embedding dim {} differs from run dim {}", raw.size(), *dim_));
    return EmbeddingVector{normalize_quantized(raw), backend_->id()};
}

std::vector<EmbeddingVector> Embedder::embed(Modality modality, std::span<const Payload> payloads) {
    std::vector<EmbeddingVector> out(payloads.size());
    std::vector<std::string> keys(payloads.size());
    std::vector<std::size_t> missing;
    {
        std::lock_guard lock(mutex_);
        for (std::size_t i = 0; i < payloads.size(); ++i) {
            keys[i] = cache_key(modality, payloads[i]);
            if (auto it = cache_.find(keys[i]); it != cache_.end()) {
                out[i] = EmbeddingVector{it->second, backend_->id()};
                ++hits_;
            } else {
                missing.push_back(i);
            }
        }
    }
    if (missing.empty()) return out;

    // Identical payloads inside one call are fetched once.
    std::vector<Payload> request;
    std::unordered_map<std::string, std::size_t> slot;
    for (auto i : missing) {
        if (slot.emplace(keys[i], request.size()).second) request.push_back(payloads[i]);
    }
    auto raw = backend_->embed(modality, request);
    if (raw.size() != request.size())
        throw ProviderError(fmt::format("provider returned {} vectors for {} inputs", raw.size(),
                                        request.size()));

    std::lock_guard lock(mutex_);
    std::vector<EmbeddingVector> fetched;
    fetched.reserve(raw.size());
    for (auto& r : raw) fetched.push_back(admit(std::move(r)));
    for (auto i : missing) {
        const auto& v = fetched[slot.at(keys[i])];
        cache_.emplace(keys[i], v.values);
        out[i] = v;
        ++misses_;
    }
    return out;
}

std::vector<EmbeddingVector> Embedder::embed_texts(std::span<const std::string> texts) {
    std::vector<Payload> payloads;
    payloads.reserve(texts.size());
    for (const auto& t : texts) payloads.push_back(Payload{t, t});
    return embed(Modality::text, payloads);
}

std::vector<EmbeddingVector> Embedder::embed_images(std::span<const std::string> image_refs,
                                                    const std::filesystem::path& base_dir) {
    std::vector<Payload> payloads;
    payloads.reserve(image_refs.size());
    for (const auto& ref : image_refs) {
        const auto path = base_dir.empty() ? std::filesystem::path(ref) : base_dir / ref;
        std::string bytes;
        try {
            bytes = read_file_bytes(path.string());
        } catch (const std::exception& e) {
            throw ValidationError(e.what());
        }
        payloads.push_back(Payload{ref, std::move(bytes)});
    }
    return embed(Modality::image, payloads);
}

void Embedder::save_cache(const std::filesystem::path& path) const {
    std::lock_guard lock(mutex_);
    FileStore store;
    std::vector<std::string> keys;
    keys.reserve(cache_.size());
    for (const auto& [k, _] : cache_) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    for (const auto& k : keys) {
        const auto& v = cache_.at(k);
        store.put(k, std::vector<float>(v.begin(), v.end()));
    }
    store.write(path);
}

void Embedder::load_cache(const std::filesystem::path& path) {
    auto store = FileStore::read(path);
    std::lock_guard lock(mutex_);
    if (store.ids.empty()) return;
    if (dim_ && *dim_ != store.dim)
        throw ProviderError(fmt::format("cache dim {} differs from run dim {}", store.dim, *dim_));
    dim_ = store.dim;
    for (const auto& id : store.ids) {
        const auto& v = store.vectors.at(id);
        cache_[id] = std::vector<double>(v.begin(), v.end());
    }
}

} // namespace infodensity::embed
