#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "infodensity/calibrate/calibrate.hpp"
#include "infodensity/corpus/manifest.hpp"
#include "infodensity/embed/embedder.hpp"
#include "infodensity/humaneval/humaneval.hpp"
#include "infodensity/modeleval/modeleval.hpp"
#include "infodensity/report/config.hpp"
#include "infodensity/report/density.hpp"
#include "infodensity/text/features.hpp"

namespace infodensity::report {

/// One benchmark's working directory:
///
///   run.lock      held while a stage runs
///   config.txt    resolved configuration
///   manifest/     source.json, subset.json, applicability.json
///   records/      inference.jsonl, difficulty.json, redundancy.json, diversity.json, dedup audits
///   features/     image.csv, text.csv, token_weights.json, data_summary.json, embeddings.bin
///   labels/       labels.jsonl, human_scores.json
///   reports/      report.json, report.csv, report.md
class RunDir {
public:
    /// Creates the layout if needed and takes the lock; throws ValidationError
    /// when another process holds it.
    explicit RunDir(std::filesystem::path root);
    ~RunDir();

    RunDir(const RunDir&) = delete;
    RunDir& operator=(const RunDir&) = delete;

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path manifest() const { return root_ / "manifest"; }
    std::filesystem::path records() const { return root_ / "records"; }
    std::filesystem::path features() const { return root_ / "features"; }
    std::filesystem::path labels() const { return root_ / "labels"; }
    std::filesystem::path reports() const { return root_ / "reports"; }
    std::filesystem::path config_path() const { return root_ / "config.txt"; }

    /// The run's stored configuration (defaults when none was saved yet).
    Config load_config() const;
    void save_config(const Config& config) const;

private:
    std::filesystem::path root_;
    std::filesystem::path lock_;
};

/// Swappable provider construction, so tests can run every stage offline.
struct Providers {
    modeleval::ChatClientFactory chat = modeleval::make_http_chat_client;
    std::function<std::shared_ptr<embed::Backend>(const embed::ProviderConfig&)> embed =
        [](const embed::ProviderConfig& c) { return std::shared_ptr<embed::Backend>(embed::make_backend(c)); };
    std::shared_ptr<const text::ParseProvider> parser = std::make_shared<text::HeuristicParser>();
    std::shared_ptr<const text::Tokenizer> tokenizer = std::make_shared<text::DefaultTokenizer>();
};

struct LoadedRun {
    corpus::BenchmarkManifest benchmark;
    corpus::AlignedSubset subset;
    corpus::ApplicabilityReport applicability;
    std::vector<const corpus::Sample*> samples;  ///< aligned subset, manifest order
};

/// Loads the benchmark, validates it, draws the aligned subset and records
/// everything under manifest/.
void ingest(RunDir& run, const Config& config, const std::filesystem::path& manifest_path);

/// Re-reads the ingested benchmark; throws ValidationError if the manifest
/// file changed since ingest.
LoadedRun load_run(const RunDir& run);

embed::ProviderConfig embed_provider_config(const Config& config);
std::vector<modeleval::ModelEndpoint> model_endpoints(const Config& config);

/// Embedder over the configured backend, warm-started from the run's cache.
std::unique_ptr<embed::Embedder> open_embedder(const RunDir& run, const Config& config, const Providers& providers);

/// Image and text features plus the Data-Eval summary. Embedding-based text
/// features run only when features.embedding is true.
void features_stage(RunDir& run, const Config& config, const Providers& providers);

/// Embeds every aligned image, question and option and stores the cache.
void embed_stage(RunDir& run, const Config& config, const Providers& providers);

void diversity_stage(RunDir& run, const Config& config, const Providers& providers);

/// Three-model full-condition verdicts and the difficulty breakdown.
void model_eval_difficulty(RunDir& run, const Config& config, const Providers& providers);

/// Ablation model's no_image (and no_text when applicable) verdicts.
void model_eval_redundancy(RunDir& run, const Config& config, const Providers& providers);

/// Annotation tasks for the aligned subset; model_correct comes from the
/// difficulty stage (majority of the three models correct).
std::vector<humaneval::Task> annotation_tasks(const RunDir& run, const LoadedRun& loaded);

/// Human scores from labels/labels.jsonl into labels/human_scores.json.
humaneval::HumanScores merge_labels(RunDir& run);

/// Builds the report purely from persisted artifacts and writes
/// reports/report.{json,csv,md}.
DimensionReport report_stage(RunDir& run, const Config& config);

struct CalibrationOutputs {
    calibrate::Calibration difficulty;
    std::optional<calibrate::DiversityCalibration> diversity;
};

/// Collects Data-Eval features and Model-Eval scores from several runs
/// into typed tables (written to out_dir) and fits the calibrations.
CalibrationOutputs calibrate_runs(const std::vector<std::filesystem::path>& runs, const std::filesystem::path& out_dir,
                                  const Config& config);

std::vector<DimensionReport> load_reports(const std::vector<std::filesystem::path>& paths);

} // namespace infodensity::report
