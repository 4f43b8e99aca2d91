#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "infodensity/util/dates.hpp"
#include "infodensity/util/jsonl.hpp"

namespace infodensity::corpus {

inline constexpr std::size_t kMaxOptions = 26;

/// Label for option i: 0 -> 'A', 1 -> 'B', ...
constexpr char option_label(std::size_t i) { return static_cast<char>('A' + i); }

/// One multiple-choice item.
struct Sample {
    std::string id;
    std::string image_ref;              // as written in the manifest
    std::filesystem::path image_path;   // resolved against the manifest directory
    std::string question;
    std::vector<std::string> options;
    char answer = 'A';
    std::optional<std::string> category;
    bool usable = true;                 // false when the image is missing

    std::size_t answer_index() const { return static_cast<std::size_t>(answer - 'A'); }

    bool operator==(const Sample& o) const {
        return id == o.id && image_ref == o.image_ref && question == o.question &&
               options == o.options && answer == o.answer && category == o.category;
    }
};

struct BenchmarkManifest {
    std::string name;
    Date release_date{};
    std::string notes;
    std::vector<Sample> samples;
    std::filesystem::path base_dir;
    std::vector<std::string> warnings;

    std::size_t unusable_count() const;
    const Sample* find(const std::string& id) const;

    bool operator==(const BenchmarkManifest& o) const {
        return name == o.name && release_date == o.release_date && notes == o.notes &&
               samples == o.samples;
    }
};

struct LoadOptions {
    bool check_images = true;
};

/// Reads a line-delimited manifest. The first record must carry `__meta__`.
/// Throws ValidationError on malformed lines (with line number), duplicate ids,
/// answers outside the option labels, or more than 26 options. Missing image
/// files only add a warning and mark the sample unusable.
BenchmarkManifest load_benchmark(const std::filesystem::path& manifest_path,
                                 const LoadOptions& options = {});

/// Writes the manifest in the same format load_benchmark reads.
void save_benchmark(const BenchmarkManifest& manifest, const std::filesystem::path& path);

Json sample_to_json(const Sample& s);

/// The seeded subset every paradigm operates on.
struct AlignedSubset {
    std::string parent;
    std::uint64_t seed = 0;
    std::vector<std::string> sample_ids;
    std::size_t excluded = 0;   // unusable samples dropped before sampling
    std::string prng;

    bool operator==(const AlignedSubset&) const = default;
};

/// Unusable samples are dropped first. If at most n remain they are all
/// returned; otherwise a uniform subset of n is drawn with a partial
/// Fisher-Yates shuffle over Rng(seed). Output keeps manifest order.
AlignedSubset sample_align(const BenchmarkManifest& benchmark, std::size_t n = 1000,
                           std::uint64_t seed = 0);

Json to_json(const AlignedSubset& subset);
AlignedSubset aligned_subset_from_json(const Json& j);

/// Samples of `benchmark` named by `subset`, in subset order.
std::vector<const Sample*> resolve(const BenchmarkManifest& benchmark, const AlignedSubset& subset);

inline constexpr double kTextRedundancyMinOptions = 2.75;

struct ApplicabilityReport {
    bool is_mcq = false;
    bool is_multimodal = false;
    double mean_options = 0.0;
    bool text_redundancy_applicable = false;
};

ApplicabilityReport applicability(const BenchmarkManifest& benchmark);

Json to_json(const ApplicabilityReport& report);
ApplicabilityReport applicability_from_json(const Json& j);

} // namespace infodensity::corpus
