#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "infodensity/corpus/manifest.hpp"
#include "infodensity/util/jsonl.hpp"
#include "infodensity/weights.hpp"

namespace infodensity::modeleval {

enum class Condition { full, no_image, no_text };

std::string_view condition_name(Condition c);
Condition condition_from_name(std::string_view name);

inline constexpr std::array<std::uint64_t, 5> kDefaultSeeds = {11, 22, 33, 44, 55};

struct ModelEndpoint {
    std::string name;
    std::string base_url;
    std::string model_id;
    std::string auth_env;  ///< environment variable holding the bearer token; empty = no auth
    std::size_t max_concurrency = 4;
    double temperature = 0.7;
    std::chrono::milliseconds timeout{60000};
    std::size_t max_retries = 3;

    void validate() const;
};

Json to_json(const ModelEndpoint& e);
ModelEndpoint endpoint_from_json(const Json& j);

// ---------------------------------------------------------------------------
// Chat transport

struct ChatMessage {
    std::string role;  ///< "user" or "assistant"
    std::string text;
};

struct ChatRequest {
    std::string model_id;
    std::vector<ChatMessage> messages;
    std::optional<std::string> image;  ///< raw PNG/JPEG bytes, attached to the first user message
    double temperature = 0.7;
    std::uint64_t seed = 0;
};

/// Returns the assistant's reply text; throws ProviderError on transport or
/// HTTP failure.
class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
};

/// POST {base_url}/chat/completions in the common chat-completions shape.
std::shared_ptr<ChatClient> make_http_chat_client(const ModelEndpoint& endpoint);

using ChatClientFactory = std::function<std::shared_ptr<ChatClient>(const ModelEndpoint&)>;

/// Builds the request body make_http_chat_client sends (exposed for tests).
Json chat_request_body(const ChatRequest& request);

// ---------------------------------------------------------------------------
// Prompting

inline constexpr std::string_view kNeutralInstruction = "Select the correct option.";

struct QueryOptions {
    /// Present the options rotated by the seed's index so every run sees a
    /// different order. Answers are mapped back to the original labels.
    bool rotate_options = false;
};

/// Question (or the neutral instruction under no_text), lettered options and
/// the output-format instruction. `rotation` shifts which option is shown first.
std::string build_prompt(const corpus::Sample& sample, Condition condition, std::size_t rotation = 0);

/// Follow-up sent once when the first reply cannot be parsed.
std::string reask_prompt(std::size_t option_count);

struct ParsedAnswer {
    std::optional<char> best;
    std::optional<char> alternative;
};

/// Case-insensitive "Best: X" / "Alternative: Y" extraction. Letters beyond
/// the option count are rejected; an alternative equal to best is dropped.
ParsedAnswer parse_best_alt(std::string_view reply, std::size_t option_count);

// ---------------------------------------------------------------------------
// Records and verdicts

struct InferenceRecord {
    std::string sample_id;
    std::string model;
    std::uint64_t seed = 0;
    Condition condition = Condition::full;
    std::optional<char> best;         ///< absent = refusal or error
    std::optional<char> alternative;
    std::string raw;                  ///< last reply received
    std::size_t attempts = 0;
    std::size_t rotation = 0;
    std::optional<std::string> error; ///< provider failure message

    bool refused() const { return !best && !error; }
    bool operator==(const InferenceRecord&) const = default;
};

Json to_json(const InferenceRecord& r);
InferenceRecord record_from_json(const Json& j);

InferenceRecord query_best_alt(const corpus::Sample& sample, ChatClient& client, const ModelEndpoint& endpoint,
                               std::uint64_t seed, Condition condition, const QueryOptions& options = {},
                               std::size_t seed_index = 0);

struct Verdict {
    std::string sample_id;
    std::string model;
    Condition condition = Condition::full;
    bool correct = false;
    bool refusal = false;
    bool error = false;
    std::vector<InferenceRecord> runs;
};

/// correct iff there is at least one run and every run's best equals `gold`.
Verdict verdict_from_runs(std::vector<InferenceRecord> runs, char gold);

Verdict circular_verdict(const corpus::Sample& sample, ChatClient& client, const ModelEndpoint& endpoint,
                         Condition condition, std::span<const std::uint64_t> seeds = kDefaultSeeds,
                         const QueryOptions& options = {});

// ---------------------------------------------------------------------------
// Record log

/// Append-only JSONL store of InferenceRecords. The first line is a schema
/// header; appends from several threads are serialized.
class RecordLog {
public:
    static constexpr std::string_view kSchema = "inference-record/v1";

    explicit RecordLog(std::filesystem::path path);

    void append(const InferenceRecord& record);
    const std::vector<InferenceRecord>& records() const { return records_; }

    /// Latest record for (sample, model, seed, condition), if any.
    std::optional<InferenceRecord> find(const std::string& sample_id, const std::string& model,
                                        std::uint64_t seed, Condition condition) const;

    static std::vector<InferenceRecord> load(const std::filesystem::path& path);

private:
    std::filesystem::path path_;
    mutable std::mutex mutex_;
    std::vector<InferenceRecord> records_;
};

/// Runs the 5-seed protocol for every sample under one condition with at
/// most endpoint.max_concurrency requests in flight. Records already in
/// `log` (when given) are reused instead of re-queried, and new ones are
/// appended. Output follows `samples` order.
std::vector<Verdict> run_condition(std::span<const corpus::Sample* const> samples, ChatClient& client,
                                   const ModelEndpoint& endpoint, Condition condition,
                                   std::span<const std::uint64_t> seeds = kDefaultSeeds,
                                   const QueryOptions& options = {}, RecordLog* log = nullptr);

/// Rebuilds verdicts purely from stored records.
std::vector<Verdict> verdicts_from_records(std::span<const InferenceRecord> records,
                                           std::span<const corpus::Sample* const> samples,
                                           const std::string& model, Condition condition,
                                           std::span<const std::uint64_t> seeds = kDefaultSeeds);

// ---------------------------------------------------------------------------
// Aggregates

struct AmbiguityOptions {
    bool require_non_unanimous = true;
};

struct SampleDifficulty {
    std::string sample_id;
    std::size_t models_correct = 0;
    bool junior = false;
    bool extreme = false;
    bool ambiguity = false;
};

struct DifficultyBreakdown {
    double p_junior = 0.0;
    double p_extreme = 0.0;
    double p_ambiguity = 0.0;
    double p_overlap = 0.0;
    double d_dif = 0.0;
    std::vector<SampleDifficulty> samples;
};

inline constexpr double kOverlapWarning = 0.03;

/// `per_model[m]` holds model m's full-condition verdicts; all three must
/// cover the same sample ids. Ambiguity compares each model's first-seed run.
DifficultyBreakdown difficulty_breakdown(std::span<const std::vector<Verdict>> per_model,
                                         const AmbiguityOptions& options = {});

struct RedundancyAccuracies {
    double acc_no_image = 0.0;
    std::optional<double> acc_no_text;  ///< absent when text redundancy is inapplicable
    double d_red = 0.0;
};

RedundancyAccuracies redundancy_accuracies(std::span<const Verdict> no_image,
                                           std::optional<std::span<const Verdict>> no_text,
                                           const TokenWeights& weights);

double accuracy(std::span<const Verdict> verdicts);

Json to_json(const DifficultyBreakdown& b);
Json to_json(const RedundancyAccuracies& r);

} // namespace infodensity::modeleval
