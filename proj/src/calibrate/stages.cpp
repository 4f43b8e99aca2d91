#include <cmath>

#include <fmt/format.h>

#include "infodensity/calibrate/calibrate.hpp"

namespace infodensity::calibrate {

std::string_view paradigm_name(Paradigm p) {
    switch (p) {
    case Paradigm::human: return "human";
    case Paradigm::model: return "model";
    case Paradigm::data: return "data";
    }
    return "data";
}

Paradigm paradigm_from_name(std::string_view name) {
    if (name == "human") return Paradigm::human;
    if (name == "model") return Paradigm::model;
    if (name == "data") return Paradigm::data;
    throw ValidationError(fmt::format("unknown paradigm '{}'", name));
}

Json to_json(const FeatureTable& t) {
    return Json{{"paradigm", "data"}, {"kind", "features"}, {"name", t.name},
                {"feature_names", t.feature_names}, {"rows", t.rows}};
}

FeatureTable feature_table_from_json(const Json& j) {
    FeatureTable t;
    t.name = j.value("name", "");
    t.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    for (const auto& [bench, row] : j.at("rows").items()) {
        std::vector<double> values;
        for (const auto& v : row) values.push_back(v.is_null() ? std::nan("") : v.get<double>());
        if (values.size() != t.feature_names.size())
            throw ValidationError(fmt::format("feature row '{}' has {} values, expected {}", bench, values.size(),
                                              t.feature_names.size()));
        t.rows.emplace(bench, std::move(values));
    }
    return t;
}

Json load_artifact(const std::filesystem::path& path, Paradigm expected) {
    const auto j = read_json_file(path);
    if (!j.is_object() || !j.contains("paradigm") || !j["paradigm"].is_string())
        throw ValidationError(fmt::format("{}: artifact does not declare a paradigm", path.string()));
    const auto declared = paradigm_from_name(j["paradigm"].get<std::string>());
    if (declared != expected)
        throw LeakageError(fmt::format("{}: {}-paradigm artifact given where {} input is required", path.string(),
                                       paradigm_name(declared), paradigm_name(expected)));
    return j;
}

FeatureTable load_feature_table(const std::filesystem::path& path) {
    return feature_table_from_json(load_artifact(path, Paradigm::data));
}

double Calibration::predict(std::span<const double> x) const {
    if (forest) return forest->predict(x);
    if (linear) return linear->predict(x);
    throw ValidationError("calibration has no fitted model");
}

namespace {

struct Fitted {
    std::optional<ForestModel> forest;
    std::optional<LinearModel> linear;

    double predict(std::span<const double> x) const { return forest ? forest->predict(x) : linear->predict(x); }
};

Fitted fit(const Matrix& X, std::span<const double> y, const std::vector<std::string>& names,
           const CalibrationConfig& config) {
    Fitted f;
    if (config.regressor == Regressor::forest) f.forest = fit_forest(X, y, names, config.forest);
    else f.linear = fit_linear(X, y, names);
    return f;
}

std::optional<CorrelationResult> try_correlate(std::span<const double> a, std::span<const double> b) {
    try {
        return correlate(a, b);
    } catch (const ValidationError&) {
        return std::nullopt;
    }
}

} // namespace

Calibration calibrate(const FeatureTable& features, const ModelScores& scores, const CalibrationConfig& config) {
    Calibration c;
    c.target = scores.name;
    c.regressor = config.regressor;
    Matrix X;
    for (const auto& [bench, row] : features.rows) {
        const auto it = scores.scores.find(bench);
        if (it == scores.scores.end()) continue;
        c.benchmarks.push_back(bench);
        X.push_back(row);
        c.targets.push_back(it->second);
    }
    if (c.benchmarks.size() < 2)
        throw ValidationError(fmt::format("calibration of '{}' needs at least 2 benchmarks with both features and "
                                          "scores, found {}",
                                          scores.name, c.benchmarks.size()));

    const auto all = fit(X, c.targets, features.feature_names, config);
    c.forest = all.forest;
    c.linear = all.linear;
    for (const auto& row : X) c.train_predictions.push_back(all.predict(row));
    c.train_fit = try_correlate(c.train_predictions, c.targets);

    const auto n = X.size();
    if (n >= 3) {
        for (std::size_t hold = 0; hold < n; ++hold) {
            Matrix Xi;
            std::vector<double> yi;
            for (std::size_t k = 0; k < n; ++k) {
                if (k == hold) continue;
                Xi.push_back(X[k]);
                yi.push_back(c.targets[k]);
            }
            c.loo_predictions.push_back(fit(Xi, yi, features.feature_names, config).predict(X[hold]));
        }
        c.loo = try_correlate(c.loo_predictions, c.targets);
    }
    return c;
}

Calibration calibrate_difficulty(const FeatureTable& features, const ModelScores& scores,
                                 const CalibrationConfig& config) {
    if (features.feature_names.size() != 4)
        throw ValidationError(fmt::format("difficulty calibration expects 4 features, got {}",
                                          features.feature_names.size()));
    return calibrate(features, scores, config);
}

DiversityCalibration calibrate_diversity(const FeatureTable& image_features, const FeatureTable& text_features,
                                         const ModelScores& image_scores, const ModelScores& text_scores,
                                         const CalibrationConfig& config) {
    if (image_features.feature_names.size() != 5)
        throw ValidationError(fmt::format("image diversity calibration expects 5 features, got {}",
                                          image_features.feature_names.size()));
    if (text_features.feature_names.size() != 10)
        throw ValidationError(fmt::format("text diversity calibration expects 10 features, got {}",
                                          text_features.feature_names.size()));
    return {calibrate(image_features, image_scores, config), calibrate(text_features, text_scores, config)};
}

Json to_json(const Calibration& c) {
    auto corr = [](const std::optional<CorrelationResult>& r) {
        if (!r) return Json(nullptr);
        return Json{{"srcc", r->srcc}, {"plcc", r->plcc}, {"mean_corr", r->mean_corr}};
    };
    Json j{{"target", c.target},
           {"regressor", c.regressor == Regressor::forest ? "forest" : "linear"},
           {"benchmarks", c.benchmarks},
           {"targets", c.targets},
           {"train_predictions", c.train_predictions},
           {"loo_predictions", c.loo_predictions},
           {"train_fit", corr(c.train_fit)},
           {"loo", corr(c.loo)}};
    j["model"] = c.forest ? to_json(*c.forest) : to_json(*c.linear);
    return j;
}

std::string calibration_csv(const Calibration& c) {
    std::string out = "benchmark,target,train_prediction,loo_prediction\n";
    for (std::size_t i = 0; i < c.benchmarks.size(); ++i) {
        const auto loo = i < c.loo_predictions.size() ? fmt::format("{:.17g}", c.loo_predictions[i]) : std::string();
        out += fmt::format("{},{:.17g},{:.17g},{}\n", c.benchmarks[i], c.targets[i], c.train_predictions[i], loo);
    }
    return out;
}

} // namespace infodensity::calibrate
