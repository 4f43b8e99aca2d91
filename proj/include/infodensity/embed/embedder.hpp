#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace infodensity::embed {

enum class Modality { text, image };

std::string_view modality_name(Modality m);

/// L2-normalized embedding. Components are float32-representable so the
/// vector survives the binary store unchanged.
struct EmbeddingVector {
    std::vector<double> values;
    std::string source;

    std::size_t dim() const { return values.size(); }
    bool operator==(const EmbeddingVector&) const = default;
};

/// Something to embed. `key` identifies it in a precomputed store (the text
/// itself, or an image reference); `bytes` is the content sent to a remote
/// service and hashed for the cache.
struct Payload {
    std::string key;
    std::string bytes;
};

/// Raw provider: returns one vector per payload, in order.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string id() const = 0;
    virtual std::vector<std::vector<float>> embed(Modality modality,
                                                  std::span<const Payload> payloads) = 0;
};

struct ProviderConfig {
    enum class Mode { remote, file };
    Mode mode = Mode::file;
    std::string endpoint;              // remote
    std::filesystem::path store_path;  // file
    std::size_t batch_size = 32;
    std::chrono::milliseconds timeout{30000};
    std::size_t max_retries = 3;
    std::size_t max_concurrency = 4;

    /// Throws ValidationError unless exactly one mode's fields are populated.
    void validate() const;
};

std::unique_ptr<Backend> make_backend(const ProviderConfig& config);

/// Backend wrapper adding normalization, dimension checks and a
/// content-addressed cache keyed by SHA-256 of (modality, bytes).
class Embedder {
public:
    explicit Embedder(std::shared_ptr<Backend> backend);

    std::vector<EmbeddingVector> embed_texts(std::span<const std::string> texts);

    /// Reads each image file (relative refs resolved against base_dir).
    std::vector<EmbeddingVector> embed_images(std::span<const std::string> image_refs,
                                              const std::filesystem::path& base_dir = {});

    std::vector<EmbeddingVector> embed(Modality modality, std::span<const Payload> payloads);

    /// Run dimension, fixed by the first vector seen.
    std::optional<std::size_t> dim() const;
    std::string source() const { return backend_->id(); }

    std::size_t cache_hits() const { return hits_; }
    std::size_t cache_misses() const { return misses_; }

    /// Cache persistence uses the binary store format with hex digests as ids.
    void save_cache(const std::filesystem::path& path) const;
    void load_cache(const std::filesystem::path& path);

private:
    std::string cache_key(Modality modality, const Payload& payload) const;
    EmbeddingVector admit(std::vector<float> raw);

    std::shared_ptr<Backend> backend_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, std::vector<double>> cache_;
    std::optional<std::size_t> dim_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
};

/// u.v / (|u| |v|), clamped to [-1, 1]. Throws std::invalid_argument on a
/// dimension mismatch or an all-zero vector.
double cosine(std::span<const double> u, std::span<const double> v);
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

/// Normalizes to unit length and rounds each component to float32.
std::vector<double> normalize_quantized(std::span<const float> raw);

} // namespace infodensity::embed
