#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "infodensity/embed/embedder.hpp"
#include "infodensity/modeleval/modeleval.hpp"
#include "infodensity/report/pipeline.hpp"

namespace fixtures {

namespace fs = std::filesystem;
using namespace infodensity;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

/// Embedding backend with explicit vectors for chosen "<modality>:<key>"
/// entries and a hash-of-bytes vector for everything else, so identical
/// content always embeds identically.
class MockBackend final : public embed::Backend {
public:
    explicit MockBackend(std::size_t dim = 32) : dim_(dim) {}

    std::string id() const override { return "mock-hash/v1"; }
    std::vector<std::vector<float>> embed(embed::Modality modality, std::span<const embed::Payload> payloads) override;

    void set(embed::Modality modality, const std::string& key, std::vector<float> v);

    std::atomic<std::size_t> calls{0};
    std::atomic<std::size_t> items{0};
    bool fail = false;

private:
    std::size_t dim_;
    std::map<std::string, std::vector<float>> fixed_;
};

/// Chat client answering from a callback.
class ScriptedChat final : public modeleval::ChatClient {
public:
    using Script = std::function<std::string(const modeleval::ChatRequest&)>;
    explicit ScriptedChat(Script script) : script_(std::move(script)) {}
    std::string complete(const modeleval::ChatRequest& request) override;
    std::atomic<std::size_t> calls{0};

private:
    Script script_;
};

struct PublishedRow {
    std::string benchmark;
    double fal_all, fal_que, fal_ano, fal_amb;
    double dif_all, dif_jun, dif_ext, dif_amb;
    double red_all, red_img;
    std::optional<double> red_txt;
    double div_all, div_img, div_txt;
    std::string released;
    double w_txt;
};

std::vector<PublishedRow> load_published_scores(const fs::path& csv);

/// Location of tests/data (compiled in).
fs::path data_dir();

// ---------------------------------------------------------------------------
// 30-sample mock benchmark
//
// Samples s00..s29, four options "sNN alpha|beta|gamma|delta", gold cycling
// A,B,C,D, questions "What is in picture NN?" (6 tokens each). Images are
// 8x8 PNGs; s00..s04 share identical pixels, the rest are distinct.
//
// Three scripted models (m1, m2, m3) under the full condition:
//   s00..s11  all correct, unanimous                      (s00: m1 needs one re-ask)
//   s12..s14  m1, m3 correct; m2 swaps best/alt           ambiguity
//   s15       m1 correct; m2, m3 swap best/alt            junior + ambiguity (overlap)
//   s16..s19  m1 correct; m2 wrong on the last seed; m3 wrong   junior
//   s20..s23  m1, m3 wrong; m2 refuses on the third seed        junior + extreme
//   s24..s29  m1, m2 correct; m3 wrong
// => p_junior 9/30, p_extreme 4/30, p_ambiguity 4/30, p_overlap 1/30.
//
// Ablation model m1: no_image correct on i % 3 == 0 except s27 (wrong on one
// seed) => 9/30; no_text correct on i % 5 == 0 => 6/30.

inline constexpr std::size_t kMockSamples = 30;

fs::path write_mock_corpus(const fs::path& dir);

/// Reply for (model, request) following the table above.
std::string mock_reply(const std::string& model, const modeleval::ChatRequest& request);

/// Providers wired to the scripted models and a MockBackend.
report::Providers mock_providers(std::shared_ptr<MockBackend> backend = nullptr);

/// Configuration naming the three mock models.
report::Config mock_config(const fs::path& store);

/// Five annotators labelling every task through the service; fallacy codes
/// for the nine model-incorrect samples merge to
///   s15 -> 2, s16 -> 3, s17 -> 2, s18 -> 0, s19 -> 1, s20..s23 -> 0
/// => d_fal 4/9, que 1/9, ano 2/9, amb 1/9.
void annotate_mock(const report::RunDir& run, const report::LoadedRun& loaded);

/// Writes the corpus under `work/corpus` and runs every stage into
/// `work/run`: ingest, features, diversity, both model-eval stages,
/// annotation, merge-labels and report. Returns the run directory.
fs::path run_mock_pipeline(const fs::path& work, std::shared_ptr<MockBackend> backend = nullptr);

} // namespace fixtures
