#include <csignal>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "infodensity/calibrate/calibrate.hpp"
#include "infodensity/error.hpp"
#include "infodensity/humaneval/humaneval.hpp"
#include "infodensity/report/emit.hpp"
#include "infodensity/report/pipeline.hpp"

namespace fs = std::filesystem;
using namespace infodensity;

namespace {

struct Common {
    std::string run;
    std::string config_file;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c, bool needs_run = true) {
    if (needs_run) cmd->add_option("--run", c.run, "run directory")->required();
    cmd->add_option("--config", c.config_file, "key = value configuration file");
    cmd->add_option("--set", c.overrides, "override, key=value (repeatable)");
}

report::Config resolve_config(const Common& c, const report::Config& base) {
    auto config = base;
    if (!c.config_file.empty())
        for (const auto& [k, v] : report::Config::load(c.config_file).values()) config.set(k, v);
    for (const auto& o : c.overrides) config.apply_override(o);
    return config;
}

humaneval::AnnotationServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Information-density profiling for multimodal MCQ benchmarks"};
    app.require_subcommand(1);
    Common common;

    std::string manifest;
    auto* ingest = app.add_subcommand("ingest", "validate a benchmark manifest and draw the aligned subset");
    add_common(ingest, common);
    ingest->add_option("--manifest", manifest, "benchmark manifest (JSONL)")->required()->check(CLI::ExistingFile);

    auto* features = app.add_subcommand("features", "image and text features, Data-Eval summary");
    add_common(features, common);
    auto* embed = app.add_subcommand("embed", "embed images, questions and options into the run cache");
    add_common(embed, common);
    auto* diversity = app.add_subcommand("diversity", "cluster, dedup and score diversity");
    add_common(diversity, common);

    auto* model_eval = app.add_subcommand("model-eval", "query the configured MLLMs");
    model_eval->require_subcommand(1);
    auto* me_dif = model_eval->add_subcommand("difficulty", "three-model verdicts and difficulty breakdown");
    add_common(me_dif, common);
    auto* me_red = model_eval->add_subcommand("redundancy", "ablation verdicts and redundancy");
    add_common(me_red, common);

    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve = app.add_subcommand("serve-annotation", "serve the annotation HTTP API");
    add_common(serve, common);
    serve->add_option("--host", host);
    serve->add_option("--port", port);

    auto* merge = app.add_subcommand("merge-labels", "merge human labels into scores");
    add_common(merge, common);

    std::vector<std::string> cal_runs;
    std::string cal_out, cal_features, cal_scores;
    auto* cal = app.add_subcommand("calibrate", "fit Data-Eval regressors against Model-Eval scores");
    add_common(cal, common, false);
    cal->add_option("--runs", cal_runs, "run directories (one per benchmark)");
    cal->add_option("--features", cal_features, "feature table (data paradigm)");
    cal->add_option("--scores", cal_scores, "score table (model paradigm)");
    cal->add_option("--out", cal_out, "output directory")->required();

    bool with_index = false;
    auto* rep = app.add_subcommand("report", "assemble the dimension report from stage artifacts");
    add_common(rep, common);
    rep->add_flag("--index", with_index, "also emit the composite index with its caveat");

    std::vector<std::string> inputs;
    std::string out;
    auto* corr = app.add_subcommand("correlate", "sub-dimension correlation matrix across reports");
    corr->add_option("inputs", inputs, "report.json files or run directories")->required();
    corr->add_option("--out", out, "CSV output")->required();
    auto* trend = app.add_subcommand("trend", "per-dimension slope over release date");
    trend->add_option("inputs", inputs, "report.json files or run directories")->required();
    trend->add_option("--out", out, "CSV output")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const report::Providers providers;
        if (ingest->parsed()) {
            report::RunDir run(common.run);
            const auto config = resolve_config(common, run.load_config());
            report::ingest(run, config, manifest);
            const auto loaded = report::load_run(run);
            fmt::print("ingested {} ({} samples, {} aligned, {} excluded)\n", loaded.benchmark.name,
                       loaded.benchmark.samples.size(), loaded.subset.sample_ids.size(), loaded.subset.excluded);
            for (const auto& w : loaded.benchmark.warnings) fmt::print(stderr, "warning: {}\n", w);
        } else if (features->parsed() || embed->parsed() || diversity->parsed() || me_dif->parsed() ||
                   me_red->parsed()) {
            report::RunDir run(common.run);
            const auto config = resolve_config(common, run.load_config());
            run.save_config(config);
            if (features->parsed()) report::features_stage(run, config, providers);
            else if (embed->parsed()) report::embed_stage(run, config, providers);
            else if (diversity->parsed()) report::diversity_stage(run, config, providers);
            else if (me_dif->parsed()) report::model_eval_difficulty(run, config, providers);
            else report::model_eval_redundancy(run, config, providers);
        } else if (serve->parsed()) {
            report::RunDir run(common.run);
            const auto loaded = report::load_run(run);
            auto tasks = report::annotation_tasks(run, loaded);
            humaneval::LabelStore store(run.labels() / "labels.jsonl");
            humaneval::AnnotationService service(std::move(tasks), loaded.applicability.text_redundancy_applicable,
                                                 store);
            humaneval::AnnotationServer server(service);
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            fmt::print("serving {} tasks on http://{}:{}\n", service.size(), host, port);
            std::fflush(stdout);
            server.listen(host, port);
            g_server = nullptr;
        } else if (merge->parsed()) {
            report::RunDir run(common.run);
            const auto scores = report::merge_labels(run);
            fmt::print("{}\n", humaneval::to_json(scores).dump(2));
        } else if (cal->parsed()) {
            const auto config = resolve_config(common, report::Config{});
            if (!cal_runs.empty()) {
                std::vector<fs::path> runs(cal_runs.begin(), cal_runs.end());
                const auto r = report::calibrate_runs(runs, cal_out, config);
                fmt::print("difficulty calibration over {} benchmarks written to {}\n", r.difficulty.benchmarks.size(),
                           cal_out);
            } else {
                if (cal_features.empty() || cal_scores.empty())
                    throw ValidationError("calibrate needs --runs or both --features and --scores");
                const auto X = calibrate::load_feature_table(cal_features);
                const auto y = calibrate::load_score_table<calibrate::Paradigm::model>(cal_scores);
                calibrate::CalibrationConfig cc;
                cc.regressor = config.get("calibrate.regressor") == "linear" ? calibrate::Regressor::linear
                                                                             : calibrate::Regressor::forest;
                cc.forest.n_trees = config.get_u64("forest.n_trees");
                cc.forest.max_depth = config.get_u64("forest.max_depth");
                cc.forest.bootstrap = config.get_bool("forest.bootstrap");
                cc.forest.seed = config.get_u64("seed");
                const auto c = calibrate::calibrate(X, y, cc);
                fs::create_directories(cal_out);
                write_json_file(fs::path(cal_out) / ("calibration_" + y.name + ".json"), calibrate::to_json(c));
                write_text_file(fs::path(cal_out) / ("calibration_" + y.name + ".csv"), calibrate::calibration_csv(c));
            }
        } else if (rep->parsed()) {
            report::RunDir run(common.run);
            auto config = resolve_config(common, run.load_config());
            if (with_index) config.set("report.index", "true");
            const auto r = report::report_stage(run, config);
            report::EmitOptions opts;
            opts.include_index = config.get_bool("report.index");
            const std::vector<report::DimensionReport> one{r};
            fmt::print("{}", report::report_markdown(one, opts));
        } else if (corr->parsed()) {
            std::vector<fs::path> paths(inputs.begin(), inputs.end());
            const auto reports = report::load_reports(paths);
            write_text_file(out, report::correlation_csv(report::correlation_matrix(reports)));
        } else if (trend->parsed()) {
            std::vector<fs::path> paths(inputs.begin(), inputs.end());
            const auto reports = report::load_reports(paths);
            write_text_file(out, report::trend_csv(report::time_trend(reports)));
        }
    } catch (const ProviderError& e) {
        fmt::print(stderr, "provider error: {}\n", e.what());
        return 3;
    } catch (const ValidationError& e) {
        fmt::print(stderr, "validation error: {}\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    }
    return 0;
}
