#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infodensity/corpus/manifest.hpp"
#include "infodensity/error.hpp"
#include "infodensity/util/jsonl.hpp"

namespace infodensity::humaneval {

/// 0 original label correct, 1 question fallacy (no option is right / cannot
/// tell), 2 annotation fallacy (another option is right), 3 ambiguity
/// fallacy (the original and others are right).
using FallacyCode = int;

inline constexpr std::size_t kAnnotatorsPerSample = 5;

/// Combines five annotators' codes. Rules, first match wins:
///   three or more 0            -> 0
///   exactly two 0 and two 1    -> 0
///   a nonzero code 3+ times    -> that code
///   otherwise the most frequent nonzero code, ties broken 2 > 3 > 1
/// Throws ValidationError unless given exactly five codes in [0, 3].
FallacyCode merge_fallacy(std::span<const FallacyCode> codes);

struct FallacyScores {
    double d_fal = 0.0;
    double p_que = 0.0;
    double p_ano = 0.0;
    double p_amb = 0.0;
    std::size_t conditioning = 0;  ///< samples the model got wrong
};

/// Fractions of merged codes 1/2/3 among samples with difficult[i] set.
FallacyScores compute_fallacy(std::span<const FallacyCode> merged, std::span<const bool> difficult);

// ---------------------------------------------------------------------------

struct AnnotationRecord {
    std::string annotator;
    std::string sample_id;
    std::optional<FallacyCode> fallacy;
    std::optional<double> difficulty;
    std::optional<bool> redundancy_img_blind;  ///< answerable without the image
    std::optional<bool> redundancy_txt_blind;  ///< answerable without the text
    std::string timestamp;
};

struct DiversityAnnotation {
    std::string annotator;
    double image_score = 0.0;
    double text_score = 0.0;
    std::string timestamp;
};

Json to_json(const AnnotationRecord& r);
AnnotationRecord annotation_from_json(const Json& j);
Json to_json(const DiversityAnnotation& d);
DiversityAnnotation diversity_annotation_from_json(const Json& j);

/// x in {0, 0.5, ..., 5}.
bool on_half_grid(double x);

/// Rejected because an equivalent record already exists (HTTP 409).
struct ConflictError : ValidationError {
    using ValidationError::ValidationError;
};

struct NotFoundError : ValidationError {
    using ValidationError::ValidationError;
};

/// Gating: model-incorrect samples need fallacy + difficulty; model-correct
/// samples need difficulty + redundancy (the text-blind answer only when
/// text redundancy applies). Optional fields may always be filled in.
std::vector<std::string> mandatory_fields(bool model_correct, bool text_applicable);
void validate_annotation(const AnnotationRecord& r, bool model_correct, bool text_applicable);

// ---------------------------------------------------------------------------

/// Append-only JSONL label store. Line 1 is a schema header; each later line
/// is {"kind":"label",...} or {"kind":"diversity",...}. Writes are
/// serialized; the first record for a key wins.
class LabelStore {
public:
    static constexpr std::string_view kSchema = "annotation-store/v1";

    explicit LabelStore(std::filesystem::path path);

    void append(const AnnotationRecord& r);
    void append(const DiversityAnnotation& d);

    std::vector<AnnotationRecord> labels() const;
    std::vector<DiversityAnnotation> diversity() const;
    bool has_label(const std::string& annotator, const std::string& sample_id) const;
    bool has_diversity(const std::string& annotator) const;
    std::size_t count_for(const std::string& annotator) const;

    /// Raw file contents.
    std::string export_text() const;
    const std::filesystem::path& path() const { return path_; }

private:
    void write_line(const Json& j);

    std::filesystem::path path_;
    mutable std::mutex mutex_;
    std::vector<AnnotationRecord> labels_;
    std::vector<DiversityAnnotation> diversity_;
    std::map<std::pair<std::string, std::string>, std::size_t> label_index_;
};

// ---------------------------------------------------------------------------

struct Task {
    const corpus::Sample* sample = nullptr;
    bool model_correct = false;
};

/// Per-annotator shuffled task queues over a shared label store. The cursor
/// is derived from the store, so sessions resume after a restart.
class AnnotationService {
public:
    AnnotationService(std::vector<Task> tasks, bool text_applicable, LabelStore& store);

    /// The annotator's shuffled order (seeded from the annotator id).
    std::vector<std::size_t> order_for(const std::string& annotator) const;

    /// Next unlabeled task, or nullopt once all are labeled.
    std::optional<Task> next(const std::string& annotator) const;

    void submit(AnnotationRecord record);
    void submit(DiversityAnnotation annotation);

    Json task_json(const Task& task) const;
    Json progress() const;

    const Task* find(const std::string& sample_id) const;
    std::size_t size() const { return tasks_.size(); }
    bool text_applicable() const { return text_applicable_; }
    LabelStore& store() { return store_; }

private:
    std::vector<Task> tasks_;
    std::map<std::string, std::size_t> by_id_;
    bool text_applicable_;
    LabelStore& store_;
    mutable std::mutex mutex_;
};

// ---------------------------------------------------------------------------

struct HumanScores {
    std::optional<double> difficulty;      ///< mean rating over all labels, 0-5
    std::optional<double> redundancy_img;  ///< fraction answerable without the image
    std::optional<double> redundancy_txt;  ///< fraction answerable without the text
    std::optional<double> diversity_img;   ///< mean dataset-level image score, 0-5
    std::optional<double> diversity_txt;
    std::optional<FallacyScores> fallacy;
    std::map<std::string, double> difficulty_per_sample;
    std::size_t samples_missing_fallacy = 0;
    bool partial = false;
};

/// Scores over a store. `tasks` supplies the model-incorrect flag that
/// conditions the fallacy rates; samples without five fallacy codes mark the
/// result partial and are left out of the merge.
HumanScores human_scores(std::span<const AnnotationRecord> labels, std::span<const DiversityAnnotation> diversity,
                         std::span<const Task> tasks);

Json to_json(const HumanScores& s);

// ---------------------------------------------------------------------------

class AnnotationServer {
public:
    explicit AnnotationServer(AnnotationService& service);
    ~AnnotationServer();

    AnnotationServer(const AnnotationServer&) = delete;
    AnnotationServer& operator=(const AnnotationServer&) = delete;

    /// Binds and serves on a background thread; returns the bound port
    /// (pass 0 for an ephemeral one).
    int start(const std::string& host, int port);
    /// Serves on the calling thread until stop().
    void listen(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace infodensity::humaneval
