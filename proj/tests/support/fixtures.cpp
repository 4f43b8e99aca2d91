#include "fixtures.hpp"

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include <fmt/format.h>

#include "infodensity/corpus/manifest.hpp"
#include "infodensity/error.hpp"
#include "infodensity/humaneval/humaneval.hpp"
#include "infodensity/image/raster.hpp"
#include "infodensity/util/rng.hpp"

namespace fixtures {

TempDir::TempDir() {
    auto tmpl = (fs::temp_directory_path() / "infodensity-test-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::vector<std::vector<float>> MockBackend::embed(embed::Modality modality, std::span<const embed::Payload> payloads) {
    ++calls;
    if (fail) throw ProviderError("mock backend failure");
    std::vector<std::vector<float>> out;
    for (const auto& p : payloads) {
        ++items;
        const auto key = std::string(embed::modality_name(modality)) + ":" + p.key;
        if (const auto it = fixed_.find(key); it != fixed_.end()) {
            out.push_back(it->second);
            continue;
        }
        Rng rng(seed_from_string(std::string(embed::modality_name(modality)) + "\n" + p.bytes));
        std::vector<float> v(dim_);
        for (auto& x : v) x = static_cast<float>(rng.unit() * 2.0 - 1.0);
        out.push_back(std::move(v));
    }
    return out;
}

void MockBackend::set(embed::Modality modality, const std::string& key, std::vector<float> v) {
    fixed_[std::string(embed::modality_name(modality)) + ":" + key] = std::move(v);
}

std::string ScriptedChat::complete(const modeleval::ChatRequest& request) {
    ++calls;
    return script_(request);
}

fs::path data_dir() { return FIXTURES_DATA_DIR; }

std::vector<PublishedRow> load_published_scores(const fs::path& csv) {
    std::ifstream in(csv);
    if (!in) throw std::runtime_error("cannot open " + csv.string());
    std::string line;
    std::getline(in, line);
    std::vector<PublishedRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> c;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) c.push_back(cell);
        if (c.size() != 17) throw std::runtime_error("bad published score row: " + line);
        auto d = [&](int i) { return std::stod(c[i]); };
        PublishedRow r{c[0],  d(1),  d(2),  d(3),  d(4),  d(5),  d(6),  d(7),  d(8), d(9), d(10), std::nullopt,
                    d(12), d(13), d(14), c[15], d(16)};
        if (!c[11].empty()) r.red_txt = d(11);
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------------------

namespace {

char letter(std::size_t i) { return static_cast<char>('A' + i % 4); }

std::string answer(char best, char alt) { return fmt::format("Best: {}\nAlternative: {}", best, alt); }

constexpr const char* kRefusal = "I cannot answer this question.";

} // namespace

fs::path write_mock_corpus(const fs::path& dir) {
    fs::create_directories(dir / "images");
    corpus::BenchmarkManifest m;
    m.name = "MockBench";
    m.release_date = *parse_iso_date("2024-03-01");
    m.notes = "scripted fixture";
    m.base_dir = dir;
    for (std::size_t i = 0; i < kMockSamples; ++i) {
        image::Raster r(8, 8);
        Rng rng(i < 5 ? 1000 : 1000 + i);
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x)
                r.set(x, y, static_cast<std::uint8_t>(rng.below(256)), static_cast<std::uint8_t>(rng.below(256)),
                      static_cast<std::uint8_t>(rng.below(256)));
        const auto ref = fmt::format("images/s{:02d}.png", i);
        image::save_png(r, dir / ref);
        corpus::Sample s;
        s.id = fmt::format("s{:02d}", i);
        s.image_ref = ref;
        s.image_path = dir / ref;
        s.question = fmt::format("What is in picture {}?", i);
        for (const char* word : {"alpha", "beta", "gamma", "delta"}) s.options.push_back(fmt::format("{} {}", s.id, word));
        s.answer = letter(i);
        s.category = i % 2 ? "odd" : "even";
        m.samples.push_back(std::move(s));
    }
    const auto path = dir / "manifest.jsonl";
    corpus::save_benchmark(m, path);
    return path;
}

std::string mock_reply(const std::string& model, const modeleval::ChatRequest& request) {
    static const std::regex id_re(R"(\bs(\d\d) alpha)");
    const auto& prompt = request.messages.front().text;
    std::smatch m;
    if (!std::regex_search(prompt, m, id_re)) return "no sample id in prompt";
    const auto i = static_cast<std::size_t>(std::stoi(m[1].str()));
    const auto seed_idx = static_cast<std::size_t>(request.seed / 11 - 1);
    const bool reask = request.messages.size() > 1;
    const char g = letter(i);
    auto o = [&](std::size_t k) { return letter(i + k); };

    const bool no_text = prompt.find(modeleval::kNeutralInstruction) != std::string::npos;
    const bool no_image = !request.image.has_value();
    if (no_text) return i % 5 == 0 ? answer(g, o(1)) : answer(o(2), o(1));
    if (no_image) {
        const bool ok = i % 3 == 0 && !(i == 27 && seed_idx == 1);
        return ok ? answer(g, o(1)) : answer(o(1), o(2));
    }

    if (i == 0 && model == "m1" && !reask) return "Hmm, hard to say.";
    if (i >= 12 && i <= 14 && model == "m2") return answer(o(1), g);
    if (i == 15 && model != "m1") return answer(o(1), g);
    if (i >= 16 && i <= 19) {
        if (model == "m2") return seed_idx == 4 ? answer(o(2), o(3)) : answer(g, o(2));
        if (model == "m3") return answer(o(3), o(2));
    }
    if (i >= 20 && i <= 23) {
        if (model == "m1") return answer(o(2), o(3));
        if (model == "m2") return seed_idx == 2 ? std::string(kRefusal) : answer(g, o(1));
        return answer(o(3), o(1));
    }
    if (i >= 24 && model == "m3") return answer(o(1), o(2));
    return answer(g, o(1));
}

report::Providers mock_providers(std::shared_ptr<MockBackend> backend) {
    report::Providers p;
    p.chat = [](const modeleval::ModelEndpoint& e) -> std::shared_ptr<modeleval::ChatClient> {
        return std::make_shared<ScriptedChat>([name = e.name](const modeleval::ChatRequest& r) { return mock_reply(name, r); });
    };
    if (!backend) backend = std::make_shared<MockBackend>();
    p.embed = [backend](const embed::ProviderConfig&) -> std::shared_ptr<embed::Backend> { return backend; };
    return p;
}

report::Config mock_config(const fs::path& store) {
    report::Config c;
    for (int k = 1; k <= 3; ++k) {
        const auto prefix = fmt::format("model.{}.", k);
        c.set(prefix + "name", fmt::format("m{}", k));
        c.set(prefix + "base_url", "http://mock.invalid/v1");
        c.set(prefix + "model_id", fmt::format("mock-{}", k));
    }
    c.set("embed.store", store.string());
    return c;
}

void annotate_mock(const report::RunDir& run, const report::LoadedRun& loaded) {
    static const std::map<std::string, std::array<int, 5>> codes = {
        {"s15", {0, 0, 1, 2, 3}}, {"s16", {0, 1, 1, 3, 3}}, {"s17", {2, 2, 2, 0, 1}}, {"s18", {0, 0, 0, 1, 1}},
        {"s19", {1, 1, 1, 0, 2}}, {"s20", {0, 0, 0, 0, 0}}, {"s21", {0, 0, 0, 0, 0}}, {"s22", {0, 0, 0, 0, 0}},
        {"s23", {0, 0, 0, 0, 0}}};
    humaneval::LabelStore store(run.labels() / "labels.jsonl");
    humaneval::AnnotationService service(report::annotation_tasks(run, loaded),
                                         loaded.applicability.text_redundancy_applicable, store);
    for (int k = 0; k < 5; ++k) {
        const auto annotator = fmt::format("a{}", k + 1);
        while (const auto task = service.next(annotator)) {
            humaneval::AnnotationRecord r;
            r.annotator = annotator;
            r.sample_id = task->sample->id;
            r.difficulty = 0.5 * (k + 1);
            if (task->model_correct) {
                r.redundancy_img_blind = k == 0;
                r.redundancy_txt_blind = false;
            } else {
                r.fallacy = codes.at(r.sample_id)[static_cast<std::size_t>(k)];
            }
            service.submit(r);
        }
        service.submit(humaneval::DiversityAnnotation{annotator, 4.0, 3.0, ""});
    }
}

} // namespace fixtures

namespace fixtures {

fs::path run_mock_pipeline(const fs::path& work, std::shared_ptr<MockBackend> backend) {
    const auto manifest = write_mock_corpus(work / "corpus");
    const auto root = work / "run";
    const auto providers = mock_providers(std::move(backend));
    report::RunDir run(root);
    const auto config = mock_config(work / "unused-store.bin");
    report::ingest(run, config, manifest);
    report::features_stage(run, config, providers);
    report::diversity_stage(run, config, providers);
    report::model_eval_difficulty(run, config, providers);
    report::model_eval_redundancy(run, config, providers);
    annotate_mock(run, report::load_run(run));
    report::merge_labels(run);
    report::report_stage(run, run.load_config());
    return root;
}

} // namespace fixtures
