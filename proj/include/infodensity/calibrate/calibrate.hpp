#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "infodensity/error.hpp"
#include "infodensity/util/jsonl.hpp"

namespace infodensity::calibrate {

// ---------------------------------------------------------------------------
// Correlation

/// Pearson correlation. Throws ValidationError for fewer than 3 points,
/// length mismatch, or a constant input.
double plcc(std::span<const double> a, std::span<const double> b);

/// 1-based ranks with ties given their average rank.
std::vector<double> average_ranks(std::span<const double> v);

/// Pearson correlation of average ranks.
double srcc(std::span<const double> a, std::span<const double> b);

struct CorrelationResult {
    double srcc = 0.0;
    double plcc = 0.0;
    double mean_corr = 0.0;
};

CorrelationResult correlate(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Regression forest

using Matrix = std::vector<std::vector<double>>;  ///< rows of features; NaN = missing

struct TreeNode {
    int feature = -1;  ///< -1 for a leaf
    double threshold = 0.0;  ///< go left when x[feature] <= threshold
    double value = 0.0;      ///< leaf prediction
    int left = -1;
    int right = -1;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  ///< nodes[0] is the root

    double predict(std::span<const double> x) const;
    /// Edges on the longest root-to-leaf path.
    std::size_t depth() const;
};

struct ForestParams {
    std::size_t n_trees = 100;
    std::size_t max_depth = 3;
    std::uint64_t seed = 0;
    bool bootstrap = true;
    std::optional<std::size_t> max_features;  ///< default floor(sqrt(p)), at least 1
};

struct ForestModel {
    static constexpr std::string_view kFormat = "infodensity-forest/v1";

    std::vector<RegressionTree> trees;
    ForestParams params;
    std::vector<std::string> feature_names;
    std::vector<double> column_means;  ///< used to impute missing values
    std::vector<bool> imputed;         ///< column had missing training values
    double y_min = 0.0;
    double y_max = 0.0;

    /// Mean over trees, clamped to [y_min, y_max].
    double predict(std::span<const double> x) const;
};

/// CART trees on bootstrap resamples: SSE-reduction splits at midpoints of
/// sorted unique values, max_features columns drawn per node, depth capped
/// at params.max_depth. Tree t draws from Rng(mix_seed(seed + t)).
ForestModel fit_forest(const Matrix& X, std::span<const double> y, std::vector<std::string> feature_names,
                       const ForestParams& params = {});

Json to_json(const ForestModel& model);
ForestModel forest_from_json(const Json& j);

/// Ordinary least squares with intercept (minimum-norm when underdetermined).
struct LinearModel {
    double intercept = 0.0;
    std::vector<double> coef;
    std::vector<std::string> feature_names;
    std::vector<double> column_means;
    double y_min = 0.0;
    double y_max = 0.0;

    double predict(std::span<const double> x) const;
};

LinearModel fit_linear(const Matrix& X, std::span<const double> y, std::vector<std::string> feature_names);
Json to_json(const LinearModel& model);

// ---------------------------------------------------------------------------
// Staged artifacts and anti-leakage

enum class Paradigm { human, model, data };

std::string_view paradigm_name(Paradigm p);
Paradigm paradigm_from_name(std::string_view name);

/// Per-benchmark scores produced by one evaluation paradigm. The paradigm is
/// part of the type, so a stage can only accept the kind it is meant to see.
template <Paradigm P>
struct ScoreTable {
    std::string name;  ///< e.g. "difficulty", "diversity_img"
    std::map<std::string, double> scores;
};

using ModelScores = ScoreTable<Paradigm::model>;
using HumanScoreTable = ScoreTable<Paradigm::human>;

/// Per-benchmark Data-Eval feature rows.
struct FeatureTable {
    std::string name;
    std::vector<std::string> feature_names;
    std::map<std::string, std::vector<double>> rows;
};

Json to_json(const FeatureTable& t);
FeatureTable feature_table_from_json(const Json& j);

template <Paradigm P>
Json to_json(const ScoreTable<P>& t) {
    return Json{{"paradigm", paradigm_name(P)}, {"kind", "scores"}, {"name", t.name}, {"scores", t.scores}};
}

/// Reads an artifact and checks its declared paradigm. A file declaring a
/// different paradigm (in particular "human" where "model" is expected)
/// raises LeakageError.
Json load_artifact(const std::filesystem::path& path, Paradigm expected);

template <Paradigm P>
ScoreTable<P> load_score_table(const std::filesystem::path& path) {
    const auto j = load_artifact(path, P);
    ScoreTable<P> t;
    t.name = j.value("name", "");
    t.scores = j.at("scores").get<std::map<std::string, double>>();
    return t;
}

FeatureTable load_feature_table(const std::filesystem::path& path);

enum class Regressor { forest, linear };

struct CalibrationConfig {
    Regressor regressor = Regressor::forest;
    ForestParams forest;
};

struct Calibration {
    std::string target;
    Regressor regressor = Regressor::forest;
    std::optional<ForestModel> forest;
    std::optional<LinearModel> linear;
    std::vector<std::string> benchmarks;
    std::vector<double> targets;
    std::vector<double> train_predictions;
    std::vector<double> loo_predictions;
    std::optional<CorrelationResult> train_fit;  ///< absent when undefined (constant vectors, < 3 points)
    std::optional<CorrelationResult> loo;

    double predict(std::span<const double> x) const;
};

/// Fits Data-Eval features to Model-Eval scores over the benchmarks both
/// tables share, and reports train and leave-one-out correlations. Only
/// model-paradigm scores are accepted.
Calibration calibrate(const FeatureTable& features, const ModelScores& scores, const CalibrationConfig& config = {});

/// Four difficulty features per benchmark.
Calibration calibrate_difficulty(const FeatureTable& features, const ModelScores& scores,
                                 const CalibrationConfig& config = {});

struct DiversityCalibration {
    Calibration image;
    Calibration text;
};

/// Image spread (5 columns) and question-type ratios (10 columns) are fitted
/// separately against the matching modality's model scores.
DiversityCalibration calibrate_diversity(const FeatureTable& image_features, const FeatureTable& text_features,
                                         const ModelScores& image_scores, const ModelScores& text_scores,
                                         const CalibrationConfig& config = {});

Json to_json(const Calibration& c);
std::string calibration_csv(const Calibration& c);

} // namespace infodensity::calibrate
