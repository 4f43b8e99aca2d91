#include "infodensity/report/pipeline.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "infodensity/diversity/diversity.hpp"
#include "infodensity/error.hpp"
#include "infodensity/image/features.hpp"
#include "infodensity/report/emit.hpp"
#include "infodensity/util/hash.hpp"
#include "infodensity/util/rng.hpp"

namespace infodensity::report {

namespace fs = std::filesystem;

namespace {

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::optional<double> mean_present(const std::vector<std::optional<double>>& v) {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& x : v)
        if (x) {
            s += *x;
            ++n;
        }
    if (n == 0) return std::nullopt;
    return s / static_cast<double>(n);
}

std::string csv_opt(const std::optional<double>& v) { return v ? fmt::format("{:.17g}", *v) : std::string(); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

diversity::DiversityConfig diversity_config(const Config& config) {
    diversity::DiversityConfig d;
    if (const auto k = config.get_or("diversity.k", ""); !k.empty()) d.k = config.get_u64("diversity.k");
    d.tau_image = config.get_double("diversity.tau_image");
    d.tau_text = config.get_double("diversity.tau_text");
    d.seed = config.get_u64("seed");
    d.max_iter = config.get_u64("diversity.max_iter");
    return d;
}

TokenWeights ensure_token_weights(const RunDir& run, const LoadedRun& loaded, const Providers& providers) {
    const auto path = run.features() / "token_weights.json";
    if (fs::exists(path)) {
        const auto j = read_json_file(path);
        return TokenWeights{j.at("w_img").get<double>(), j.at("w_txt").get<double>()};
    }
    std::vector<std::string> questions;
    for (const auto* s : loaded.samples) questions.push_back(s->question);
    const auto w = token_weights(questions, *providers.tokenizer);
    write_json_file(path, Json{{"w_img", w.w_img}, {"w_txt", w.w_txt}, {"tokenizer", providers.tokenizer->id()}});
    return w;
}

std::size_t count_errors(const std::vector<modeleval::Verdict>& verdicts) {
    std::size_t n = 0;
    for (const auto& v : verdicts)
        for (const auto& r : v.runs) n += r.error.has_value();
    return n;
}

std::size_t count_refusals(const std::vector<modeleval::Verdict>& verdicts) {
    std::size_t n = 0;
    for (const auto& v : verdicts)
        for (const auto& r : v.runs) n += r.refused();
    return n;
}

std::optional<Json> read_optional(const fs::path& path) {
    if (!fs::exists(path)) return std::nullopt;
    return read_json_file(path);
}

} // namespace

// ---------------------------------------------------------------------------

void ingest(RunDir& run, const Config& config, const fs::path& manifest_path) {
    const auto bench = corpus::load_benchmark(manifest_path);
    const auto subset = corpus::sample_align(bench, config.get_u64("sample_size"), config.get_u64("seed"));
    const auto appl = corpus::applicability(bench);
    const auto digest = sha256_hex(read_file_bytes(manifest_path.string()));
    write_json_file(run.manifest() / "source.json",
                    Json{{"manifest", fs::absolute(manifest_path).lexically_normal().string()},
                         {"sha256", digest},
                         {"name", bench.name},
                         {"release_date", format_iso_date(bench.release_date)},
                         {"samples", bench.samples.size()},
                         {"unusable", bench.unusable_count()},
                         {"warnings", bench.warnings}});
    write_json_file(run.manifest() / "subset.json", corpus::to_json(subset));
    write_json_file(run.manifest() / "applicability.json", corpus::to_json(appl));
    run.save_config(config);
}

LoadedRun load_run(const RunDir& run) {
    const auto source_path = run.manifest() / "source.json";
    if (!fs::exists(source_path))
        throw ValidationError(fmt::format("{} has not been ingested", run.root().string()));
    const auto source = read_json_file(source_path);
    const auto manifest = fs::path(source.at("manifest").get<std::string>());
    if (sha256_hex(read_file_bytes(manifest.string())) != source.at("sha256").get<std::string>())
        throw ValidationError(fmt::format("manifest {} changed since ingest", manifest.string()));
    LoadedRun out;
    out.benchmark = corpus::load_benchmark(manifest);
    out.subset = corpus::aligned_subset_from_json(read_json_file(run.manifest() / "subset.json"));
    out.applicability = corpus::applicability_from_json(read_json_file(run.manifest() / "applicability.json"));
    out.samples = corpus::resolve(out.benchmark, out.subset);
    return out;
}

embed::ProviderConfig embed_provider_config(const Config& config) {
    embed::ProviderConfig p;
    const auto mode = config.get("embed.mode");
    if (mode == "file") p.mode = embed::ProviderConfig::Mode::file;
    else if (mode == "remote") p.mode = embed::ProviderConfig::Mode::remote;
    else throw ValidationError(fmt::format("embed.mode must be file or remote, not '{}'", mode));
    if (p.mode == embed::ProviderConfig::Mode::file) p.store_path = config.get("embed.store");
    else p.endpoint = config.get("embed.endpoint");
    p.batch_size = config.get_u64("embed.batch_size");
    p.max_concurrency = config.get_u64("embed.max_concurrency");
    p.validate();
    return p;
}

std::vector<modeleval::ModelEndpoint> model_endpoints(const Config& config) {
    std::vector<modeleval::ModelEndpoint> out;
    for (int i = 1; i <= 3; ++i) {
        const auto prefix = fmt::format("model.{}.", i);
        const auto name = config.find(prefix + "name");
        if (!name) continue;
        modeleval::ModelEndpoint e;
        e.name = *name;
        e.base_url = config.get(prefix + "base_url");
        e.model_id = config.get(prefix + "model_id");
        e.auth_env = config.get_or(prefix + "auth_env", "");
        if (config.find(prefix + "max_concurrency")) e.max_concurrency = config.get_u64(prefix + "max_concurrency");
        if (config.find(prefix + "temperature")) e.temperature = config.get_double(prefix + "temperature");
        if (config.find(prefix + "timeout_ms"))
            e.timeout = std::chrono::milliseconds(config.get_u64(prefix + "timeout_ms"));
        if (config.find(prefix + "max_retries")) e.max_retries = config.get_u64(prefix + "max_retries");
        e.validate();
        out.push_back(std::move(e));
    }
    return out;
}

std::unique_ptr<embed::Embedder> open_embedder(const RunDir& run, const Config& config, const Providers& providers) {
    auto embedder = std::make_unique<embed::Embedder>(providers.embed(embed_provider_config(config)));
    const auto cache = run.features() / "embeddings.bin";
    if (fs::exists(cache)) embedder->load_cache(cache);
    return embedder;
}

// ---------------------------------------------------------------------------

void features_stage(RunDir& run, const Config& config, const Providers& providers) {
    const auto loaded = load_run(run);
    const auto& samples = loaded.samples;
    if (samples.empty()) throw ValidationError("aligned subset is empty");

    std::vector<std::string> ids;
    std::vector<image::ImageFeatures> img;
    std::vector<image::Raster> rasters;
    const bool with_embedding = config.get_bool("features.embedding");
    for (const auto* s : samples) {
        ids.push_back(s->id);
        auto raster = image::load_image(s->image_path);
        img.push_back(image::compute_image_features(raster));
        if (with_embedding) rasters.push_back(std::move(raster));
    }
    write_text_file(run.features() / "image.csv", image::image_features_csv(ids, img));

    std::unique_ptr<embed::Embedder> embedder;
    if (with_embedding) embedder = open_embedder(run, config, providers);
    const int grid = static_cast<int>(config.get_u64("region.grid"));

    std::vector<text::TextFeatures> tf;
    std::vector<std::string> questions;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto* s = samples[i];
        text::TextFeatures f;
        f.token_count = providers.tokenizer->count(s->question);
        f.qtype = text::classify_question(s->question);
        f.non_english = text::leads_with_non_english(s->question);
        const auto depth = text::grammar_depth(s->question, *providers.parser);
        f.grammar_depth = depth.depth;
        f.grammar_fallback = depth.fallback;
        if (embedder) {
            if (s->options.size() >= 2) f.option_closeness = text::option_closeness(s->options, *embedder);
            f.region_entropy = text::region_entropy(s->question, rasters[i], s->image_ref, *embedder, *providers.parser, grid);
        }
        questions.push_back(s->question);
        tf.push_back(f);
    }
    if (embedder) embedder->save_cache(run.features() / "embeddings.bin");

    std::string csv = fmt::format("# tokenizer={} parser={}\n", providers.tokenizer->id(), providers.parser->id());
    csv += "id,token_count,qtype,non_english,grammar_depth,grammar_fallback,option_closeness,region_entropy\n";
    for (std::size_t i = 0; i < tf.size(); ++i) {
        const auto& f = tf[i];
        csv += fmt::format("{},{},{},{},{},{},{},{}\n", csv_field(ids[i]), f.token_count,
                           text::kQuestionTypeNames[static_cast<std::size_t>(f.qtype)], f.non_english ? 1 : 0,
                           f.grammar_depth, f.grammar_fallback ? 1 : 0, csv_opt(f.option_closeness),
                           csv_opt(f.region_entropy));
    }
    write_text_file(run.features() / "text.csv", csv);

    const auto w = token_weights(questions, *providers.tokenizer);
    write_json_file(run.features() / "token_weights.json",
                    Json{{"w_img", w.w_img}, {"w_txt", w.w_txt}, {"tokenizer", providers.tokenizer->id()}});

    std::vector<double> structure, depth;
    std::vector<std::optional<double>> closeness, region;
    for (const auto& f : img) structure.push_back(f.structure);
    for (const auto& f : tf) {
        depth.push_back(static_cast<double>(f.grammar_depth));
        closeness.push_back(f.option_closeness);
        region.push_back(f.region_entropy);
    }
    Json summary{{"paradigm", "data"},
                 {"kind", "data_summary"},
                 {"benchmark", loaded.benchmark.name},
                 {"samples", samples.size()},
                 {"tokenizer", providers.tokenizer->id()},
                 {"parser", providers.parser->id()}};
    summary["difficulty"] = Json{{"structure", mean_of(structure)},
                                 {"grammar", mean_of(depth)},
                                 {"option", opt_json(mean_present(closeness))},
                                 {"region", opt_json(mean_present(region))}};
    if (img.size() >= 2) {
        const auto dd = diversity::diversity_data_features(img, questions);
        Json spread = Json::object(), ratios = Json::object();
        for (std::size_t k = 0; k < dd.image_spread.size(); ++k) spread[image::kSpreadFeatureNames[k]] = dd.image_spread[k];
        for (std::size_t k = 0; k < dd.qtype_ratios.size(); ++k) ratios[text::kQuestionTypeNames[k]] = dd.qtype_ratios[k];
        summary["diversity_image"] = spread;
        summary["diversity_text"] = ratios;
    } else {
        summary["diversity_image"] = nullptr;
        summary["diversity_text"] = nullptr;
    }
    write_json_file(run.features() / "data_summary.json", summary);
}

void embed_stage(RunDir& run, const Config& config, const Providers& providers) {
    const auto loaded = load_run(run);
    auto embedder = open_embedder(run, config, providers);
    std::vector<embed::Payload> images;
    std::vector<std::string> texts;
    for (const auto* s : loaded.samples) {
        images.push_back({s->image_ref, read_file_bytes(s->image_path.string())});
        texts.push_back(s->question);
        for (const auto& o : s->options) texts.push_back(o);
    }
    embedder->embed(embed::Modality::image, images);
    embedder->embed_texts(texts);
    embedder->save_cache(run.features() / "embeddings.bin");
    write_json_file(run.features() / "embed_manifest.json",
                    Json{{"source", embedder->source()},
                         {"dim", embedder->dim() ? Json(*embedder->dim()) : Json(nullptr)},
                         {"images", images.size()},
                         {"texts", texts.size()}});
}

void diversity_stage(RunDir& run, const Config& config, const Providers& providers) {
    const auto loaded = load_run(run);
    const auto weights = ensure_token_weights(run, loaded, providers);
    auto embedder = open_embedder(run, config, providers);
    const auto cfg = diversity_config(config);
    const auto result = diversity::diversity_model_eval(loaded.samples, *embedder, cfg, weights);
    embedder->save_cache(run.features() / "embeddings.bin");

    auto doc = diversity::to_json(result, cfg);
    doc["paradigm"] = "model";
    doc["kind"] = "diversity";
    doc["embedding_source"] = embedder->source();
    doc["weights"] = Json{{"w_img", weights.w_img}, {"w_txt", weights.w_txt}};
    doc["config_digest"] = config.digest();
    write_json_file(run.records() / "diversity.json", doc);
    write_text_file(run.records() / "dedup_audit_image.csv", diversity::dedup_audit_csv(result.image_detail.dedup));
    if (result.text_detail)
        write_text_file(run.records() / "dedup_audit_text.csv", diversity::dedup_audit_csv(result.text_detail->dedup));
}

void model_eval_difficulty(RunDir& run, const Config& config, const Providers& providers) {
    const auto loaded = load_run(run);
    const auto endpoints = model_endpoints(config);
    if (endpoints.size() != 3)
        throw ValidationError(fmt::format("difficulty needs 3 configured models (model.1..3), found {}", endpoints.size()));
    const auto seeds = config.get_u64_list("modeleval.seeds");
    modeleval::QueryOptions qopts;
    qopts.rotate_options = config.get_bool("modeleval.rotate_options");
    modeleval::AmbiguityOptions aopts;
    aopts.require_non_unanimous = config.get_bool("modeleval.ambiguity_non_unanimous");

    modeleval::RecordLog log(run.records() / "inference.jsonl");
    std::vector<std::vector<modeleval::Verdict>> per_model;
    std::size_t errors = 0, refusals = 0;
    for (const auto& ep : endpoints) {
        auto client = providers.chat(ep);
        per_model.push_back(
            modeleval::run_condition(loaded.samples, *client, ep, modeleval::Condition::full, seeds, qopts, &log));
        errors += count_errors(per_model.back());
        refusals += count_refusals(per_model.back());
    }
    const auto b = modeleval::difficulty_breakdown(per_model, aopts);

    auto doc = modeleval::to_json(b);
    doc["paradigm"] = "model";
    doc["kind"] = "difficulty";
    Json models = Json::array();
    for (const auto& ep : endpoints) models.push_back(ep.name);
    doc["models"] = models;
    Json per = Json::array();
    for (const auto& s : b.samples)
        per.push_back(Json{{"sample_id", s.sample_id},
                           {"models_correct", s.models_correct},
                           {"junior", s.junior},
                           {"extreme", s.extreme},
                           {"ambiguity", s.ambiguity}});
    doc["per_sample"] = per;
    doc["seeds"] = seeds;
    doc["rotate_options"] = qopts.rotate_options;
    doc["ambiguity_non_unanimous"] = aopts.require_non_unanimous;
    doc["refusals"] = refusals;
    doc["provider_errors"] = errors;
    doc["config_digest"] = config.digest();
    write_json_file(run.records() / "difficulty.json", doc);
    if (errors > 0)
        throw ProviderError(fmt::format("{} model calls failed; their verdicts count as incorrect (see records)", errors));
}

void model_eval_redundancy(RunDir& run, const Config& config, const Providers& providers) {
    const auto loaded = load_run(run);
    const auto endpoints = model_endpoints(config);
    if (endpoints.empty()) throw ValidationError("no model endpoints configured (model.1.*)");
    const auto wanted = config.get_or("modeleval.ablation_model", "");
    const modeleval::ModelEndpoint* ep = &endpoints.front();
    if (!wanted.empty()) {
        ep = nullptr;
        for (const auto& e : endpoints)
            if (e.name == wanted) ep = &e;
        if (!ep) throw ValidationError(fmt::format("ablation model '{}' is not configured", wanted));
    }
    const auto seeds = config.get_u64_list("modeleval.seeds");
    modeleval::QueryOptions qopts;
    qopts.rotate_options = config.get_bool("modeleval.rotate_options");
    const auto weights = ensure_token_weights(run, loaded, providers);

    modeleval::RecordLog log(run.records() / "inference.jsonl");
    auto client = providers.chat(*ep);
    const auto no_image =
        modeleval::run_condition(loaded.samples, *client, *ep, modeleval::Condition::no_image, seeds, qopts, &log);
    std::optional<std::vector<modeleval::Verdict>> no_text;
    if (loaded.applicability.text_redundancy_applicable)
        no_text = modeleval::run_condition(loaded.samples, *client, *ep, modeleval::Condition::no_text, seeds, qopts, &log);
    const auto acc = modeleval::redundancy_accuracies(
        no_image, no_text ? std::optional<std::span<const modeleval::Verdict>>(*no_text) : std::nullopt, weights);
    const auto errors = count_errors(no_image) + (no_text ? count_errors(*no_text) : 0);

    auto doc = modeleval::to_json(acc);
    doc["paradigm"] = "model";
    doc["kind"] = "redundancy";
    doc["model"] = ep->name;
    doc["text_applicable"] = loaded.applicability.text_redundancy_applicable;
    doc["weights"] = Json{{"w_img", weights.w_img}, {"w_txt", weights.w_txt}};
    doc["seeds"] = seeds;
    doc["provider_errors"] = errors;
    doc["config_digest"] = config.digest();
    write_json_file(run.records() / "redundancy.json", doc);
    if (errors > 0)
        throw ProviderError(fmt::format("{} model calls failed; their verdicts count as incorrect (see records)", errors));
}

std::vector<humaneval::Task> annotation_tasks(const RunDir& run, const LoadedRun& loaded) {
    const auto path = run.records() / "difficulty.json";
    if (!fs::exists(path))
        throw ValidationError("annotation needs model verdicts; run `model-eval difficulty` first");
    const auto doc = read_json_file(path);
    std::map<std::string, bool> correct;
    for (const auto& s : doc.at("per_sample")) correct[s.at("sample_id").get<std::string>()] = !s.at("junior").get<bool>();
    std::vector<humaneval::Task> tasks;
    for (const auto* s : loaded.samples) {
        const auto it = correct.find(s->id);
        if (it == correct.end()) throw ValidationError(fmt::format("no model verdict for sample {}", s->id));
        tasks.push_back({s, it->second});
    }
    return tasks;
}

humaneval::HumanScores merge_labels(RunDir& run) {
    const auto loaded = load_run(run);
    const auto tasks = annotation_tasks(run, loaded);
    const auto store_path = run.labels() / "labels.jsonl";
    if (!fs::exists(store_path)) throw ValidationError(fmt::format("no label store at {}", store_path.string()));
    humaneval::LabelStore store(store_path);
    const auto labels = store.labels();
    const auto div = store.diversity();
    const auto scores = humaneval::human_scores(labels, div, tasks);
    auto doc = humaneval::to_json(scores);
    doc["paradigm"] = "human";
    doc["kind"] = "human_scores";
    doc["labels"] = labels.size();
    write_json_file(run.labels() / "human_scores.json", doc);
    return scores;
}

// ---------------------------------------------------------------------------

DimensionReport report_stage(RunDir& run, const Config& config) {
    const auto source = read_json_file(run.manifest() / "source.json");
    const auto subset = corpus::aligned_subset_from_json(read_json_file(run.manifest() / "subset.json"));
    const auto weights_path = run.features() / "token_weights.json";
    if (!fs::exists(weights_path))
        throw ValidationError("token weights missing; run `features` (or a model-eval/diversity stage) first");
    const auto wj = read_json_file(weights_path);

    DimensionReport r;
    r.benchmark = source.at("name").get<std::string>();
    r.release_date = *parse_iso_date(source.at("release_date").get<std::string>());
    r.weights = TokenWeights{wj.at("w_img").get<double>(), wj.at("w_txt").get<double>()};
    r.config_digest = config.digest();
    r.excluded_samples = subset.excluded;
    r.aligned_samples = subset.sample_ids.size();
    r.providers["tokenizer"] = wj.value("tokenizer", "");
    r.seeds["alignment"] = subset.seed;
    r.seeds["prng"] = subset.prng;
    std::vector<std::string> extra;

    if (const auto d = read_optional(run.records() / "difficulty.json")) {
        r.difficulty = DifficultyDim{d->at("d_dif").get<double>(), d->at("p_junior").get<double>(),
                                     d->at("p_extreme").get<double>(), d->at("p_ambiguity").get<double>(),
                                     d->at("p_overlap").get<double>()};
        r.provenance["difficulty"] = "model";
        r.providers["difficulty_models"] = d->at("models");
        r.seeds["modeleval"] = d->at("seeds");
        if (const auto e = d->value("provider_errors", std::size_t{0}); e > 0)
            extra.push_back(fmt::format("{} difficulty model calls failed and count as incorrect", e));
    }
    if (const auto d = read_optional(run.records() / "redundancy.json")) {
        std::optional<double> txt;
        if (!d->at("acc_no_text").is_null()) txt = d->at("acc_no_text").get<double>();
        r.redundancy = RedundancyDim{d->at("d_red").get<double>(), d->at("acc_no_image").get<double>(), txt};
        r.provenance["redundancy"] = "model";
        r.providers["ablation_model"] = d->at("model");
        if (const auto e = d->value("provider_errors", std::size_t{0}); e > 0)
            extra.push_back(fmt::format("{} ablation model calls failed and count as incorrect", e));
    }
    if (const auto d = read_optional(run.records() / "diversity.json")) {
        std::optional<double> txt;
        if (!d->at("txt").is_null()) txt = d->at("txt").get<double>();
        r.diversity = DiversityDim{d->at("combined").get<double>(), d->at("img").get<double>(), txt};
        r.provenance["diversity"] = "model";
        r.providers["embedding"] = d->at("embedding_source");
        r.seeds["diversity"] = d->at("seed");
        r.seeds["dedup_scope"] = d->at("dedup_scope");
        r.seeds["tau_image"] = d->at("image").at("tau");
        if (!d->at("text").is_null()) r.seeds["tau_text"] = d->at("text").at("tau");
    }
    if (const auto h = read_optional(run.labels() / "human_scores.json")) {
        if (h->value("paradigm", "") != "human") throw ValidationError("human_scores.json is not a human artifact");
        if (const auto& f = h->at("fallacy"); !f.is_null()) {
            r.fallacy = FallacyDim{f.at("d_fal").get<double>(), f.at("p_que").get<double>(), f.at("p_ano").get<double>(),
                                   f.at("p_amb").get<double>()};
            r.provenance["fallacy"] = "human";
        }
        if (h->value("partial", false)) extra.push_back("human labels incomplete; fallacy uses fully labeled samples only");
    }

    r.warnings = derive_warnings(r);
    for (auto& w : extra) r.warnings.push_back(std::move(w));
    for (auto& v : check_identities(r)) r.warnings.push_back("identity check failed: " + v);

    EmitOptions opts;
    opts.include_index = config.get_bool("report.index");
    const std::vector<DimensionReport> one{r};
    emit_report(one, ReportFormat::json, run.reports() / "report.json", opts);
    emit_report(one, ReportFormat::csv, run.reports() / "report.csv", opts);
    emit_report(one, ReportFormat::markdown, run.reports() / "report.md", opts);
    return r;
}

// ---------------------------------------------------------------------------

CalibrationOutputs calibrate_runs(const std::vector<fs::path>& runs, const fs::path& out_dir, const Config& config) {
    using calibrate::Paradigm;
    calibrate::FeatureTable dif_features{"difficulty", {"structure", "grammar", "option", "region"}, {}};
    calibrate::FeatureTable img_features{"diversity_image", {}, {}};
    calibrate::FeatureTable txt_features{"diversity_text", {}, {}};
    for (auto n : image::kSpreadFeatureNames) img_features.feature_names.emplace_back(n);
    for (auto n : text::kQuestionTypeNames) txt_features.feature_names.emplace_back(n);
    calibrate::ModelScores dif_scores{"difficulty", {}}, img_scores{"diversity_img", {}}, txt_scores{"diversity_txt", {}};
    bool all_diversity = true;

    for (const auto& root : runs) {
        RunDir run(root);
        const auto summary = calibrate::load_artifact(run.features() / "data_summary.json", Paradigm::data);
        const auto bench = summary.at("benchmark").get<std::string>();
        if (dif_features.rows.count(bench)) throw ValidationError(fmt::format("benchmark '{}' given twice", bench));
        std::vector<double> row;
        for (const auto& name : dif_features.feature_names) {
            const auto& v = summary.at("difficulty").at(name);
            row.push_back(v.is_null() ? std::nan("") : v.get<double>());
        }
        dif_features.rows[bench] = row;
        const auto dif = calibrate::load_artifact(run.records() / "difficulty.json", Paradigm::model);
        dif_scores.scores[bench] = dif.at("d_dif").get<double>();

        const auto div_path = run.records() / "diversity.json";
        if (!fs::exists(div_path) || summary.at("diversity_image").is_null()) {
            all_diversity = false;
            continue;
        }
        const auto div = calibrate::load_artifact(div_path, Paradigm::model);
        std::vector<double> irow, trow;
        for (const auto& n : img_features.feature_names) irow.push_back(summary.at("diversity_image").at(n).get<double>());
        for (const auto& n : txt_features.feature_names) trow.push_back(summary.at("diversity_text").at(n).get<double>());
        img_features.rows[bench] = irow;
        txt_features.rows[bench] = trow;
        img_scores.scores[bench] = div.at("img").get<double>();
        if (div.at("txt").is_null()) all_diversity = false;
        else txt_scores.scores[bench] = div.at("txt").get<double>();
    }

    calibrate::CalibrationConfig cc;
    const auto reg = config.get("calibrate.regressor");
    if (reg == "forest") cc.regressor = calibrate::Regressor::forest;
    else if (reg == "linear") cc.regressor = calibrate::Regressor::linear;
    else throw ValidationError(fmt::format("calibrate.regressor must be forest or linear, not '{}'", reg));
    cc.forest.n_trees = config.get_u64("forest.n_trees");
    cc.forest.max_depth = config.get_u64("forest.max_depth");
    cc.forest.bootstrap = config.get_bool("forest.bootstrap");
    cc.forest.seed = config.get_u64("seed");

    fs::create_directories(out_dir);
    write_json_file(out_dir / "difficulty_features.json", calibrate::to_json(dif_features));
    write_json_file(out_dir / "difficulty_scores.json", calibrate::to_json(dif_scores));

    CalibrationOutputs out{calibrate::calibrate_difficulty(dif_features, dif_scores, cc), std::nullopt};
    write_json_file(out_dir / "calibration_difficulty.json", calibrate::to_json(out.difficulty));
    write_text_file(out_dir / "calibration_difficulty.csv", calibrate::calibration_csv(out.difficulty));
    if (all_diversity && img_scores.scores.size() >= 2) {
        write_json_file(out_dir / "diversity_image_features.json", calibrate::to_json(img_features));
        write_json_file(out_dir / "diversity_text_features.json", calibrate::to_json(txt_features));
        write_json_file(out_dir / "diversity_image_scores.json", calibrate::to_json(img_scores));
        write_json_file(out_dir / "diversity_text_scores.json", calibrate::to_json(txt_scores));
        out.diversity = calibrate::calibrate_diversity(img_features, txt_features, img_scores, txt_scores, cc);
        write_json_file(out_dir / "calibration_diversity_image.json", calibrate::to_json(out.diversity->image));
        write_json_file(out_dir / "calibration_diversity_text.json", calibrate::to_json(out.diversity->text));
    }
    return out;
}

std::vector<DimensionReport> load_reports(const std::vector<fs::path>& paths) {
    std::vector<DimensionReport> out;
    for (auto p : paths) {
        if (fs::is_directory(p)) p = p / "reports" / "report.json";
        for (auto& r : reports_from_document(read_json_file(p))) out.push_back(std::move(r));
    }
    return out;
}

} // namespace infodensity::report
