#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <thread>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "infodensity/calibrate/calibrate.hpp"
#include "infodensity/util/parallel.hpp"
#include "infodensity/util/rng.hpp"

namespace infodensity::calibrate {

double RegressionTree::predict(std::span<const double> x) const {
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
        const auto& n = nodes[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes[i].value;
}

std::size_t RegressionTree::depth() const {
    std::function<std::size_t(std::size_t)> walk = [&](std::size_t i) -> std::size_t {
        const auto& n = nodes[i];
        if (n.feature < 0) return 0;
        return 1 + std::max(walk(static_cast<std::size_t>(n.left)), walk(static_cast<std::size_t>(n.right)));
    };
    return nodes.empty() ? 0 : walk(0);
}

namespace {

struct Columns {
    std::vector<double> means;
    std::vector<bool> imputed;
};

// Validates shape, fills missing cells with column means.
Matrix impute(const Matrix& X, std::span<const double> y, std::size_t p, Columns& cols) {
    if (X.size() != y.size()) throw ValidationError(fmt::format("{} feature rows for {} targets", X.size(), y.size()));
    if (X.size() < 2) throw ValidationError("regression needs at least 2 rows");
    for (double v : y)
        if (!std::isfinite(v)) throw ValidationError("regression target has a non-finite value");
    cols.means.assign(p, 0.0);
    cols.imputed.assign(p, false);
    std::vector<std::size_t> counts(p, 0);
    for (const auto& row : X) {
        if (row.size() != p) throw ValidationError(fmt::format("feature row has {} values, expected {}", row.size(), p));
        for (std::size_t f = 0; f < p; ++f) {
            if (std::isnan(row[f])) {
                cols.imputed[f] = true;
                continue;
            }
            if (!std::isfinite(row[f])) throw ValidationError("feature value is infinite");
            cols.means[f] += row[f];
            ++counts[f];
        }
    }
    for (std::size_t f = 0; f < p; ++f) cols.means[f] = counts[f] ? cols.means[f] / static_cast<double>(counts[f]) : 0.0;
    Matrix out = X;
    for (auto& row : out)
        for (std::size_t f = 0; f < p; ++f)
            if (std::isnan(row[f])) row[f] = cols.means[f];
    return out;
}

std::vector<double> fill_missing(std::span<const double> x, const std::vector<double>& means) {
    if (x.size() != means.size())
        throw ValidationError(fmt::format("model expects {} features, got {}", means.size(), x.size()));
    std::vector<double> out(x.begin(), x.end());
    for (std::size_t f = 0; f < out.size(); ++f)
        if (std::isnan(out[f])) out[f] = means[f];
    return out;
}

class TreeBuilder {
public:
    TreeBuilder(const Matrix& X, std::span<const double> y, std::size_t max_depth, std::size_t mtry,
                const std::vector<std::size_t>& canonical, Rng& rng)
        : X_(X), y_(y), max_depth_(max_depth), mtry_(mtry), canonical_(canonical), rng_(rng) {}

    RegressionTree build(std::vector<std::size_t> rows) {
        RegressionTree t;
        grow(t, std::move(rows), 0);
        return t;
    }

private:
    int grow(RegressionTree& t, std::vector<std::size_t> rows, std::size_t depth) {
        const int id = static_cast<int>(t.nodes.size());
        t.nodes.emplace_back();
        double sum = 0.0;
        for (auto r : rows) sum += y_[r];
        t.nodes[static_cast<std::size_t>(id)].value = sum / static_cast<double>(rows.size());
        if (depth >= max_depth_ || rows.size() < 2) return id;

        // Draw columns from name order so fits do not depend on column order.
        const auto p = X_[0].size();
        std::vector<std::size_t> features = canonical_;
        for (std::size_t i = 0; i < mtry_; ++i) std::swap(features[i], features[i + rng_.below(p - i)]);
        features.resize(mtry_);

        const double parent_sse = sse(rows);
        double best_gain = 0.0;
        int best_feature = -1;
        double best_threshold = 0.0;
        for (auto f : features) {
            std::vector<std::size_t> sorted = rows;
            std::stable_sort(sorted.begin(), sorted.end(), [&](auto a, auto b) { return X_[a][f] < X_[b][f]; });
            // Prefix sums let each midpoint be scored in O(1).
            double ls = 0.0, lss = 0.0;
            double ts = 0.0, tss = 0.0;
            for (auto r : sorted) {
                ts += y_[r];
                tss += y_[r] * y_[r];
            }
            const double n = static_cast<double>(sorted.size());
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
                const double yi = y_[sorted[i]];
                ls += yi;
                lss += yi * yi;
                const double a = X_[sorted[i]][f], b = X_[sorted[i + 1]][f];
                if (a == b) continue;
                const double nl = static_cast<double>(i + 1), nr = n - nl;
                const double left = lss - ls * ls / nl;
                const double right = (tss - lss) - (ts - ls) * (ts - ls) / nr;
                const double gain = parent_sse - std::max(0.0, left) - std::max(0.0, right);
                if (gain > best_gain + 1e-12 * std::max(1.0, parent_sse)) {
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    best_threshold = a + (b - a) / 2.0;
                }
            }
        }
        if (best_feature < 0) return id;

        std::vector<std::size_t> left_rows, right_rows;
        for (auto r : rows)
            (X_[r][static_cast<std::size_t>(best_feature)] <= best_threshold ? left_rows : right_rows).push_back(r);
        const int l = grow(t, std::move(left_rows), depth + 1);
        const int r = grow(t, std::move(right_rows), depth + 1);
        auto& node = t.nodes[static_cast<std::size_t>(id)];
        node.feature = best_feature;
        node.threshold = best_threshold;
        node.left = l;
        node.right = r;
        return id;
    }

    double sse(const std::vector<std::size_t>& rows) const {
        double s = 0.0, ss = 0.0;
        for (auto r : rows) {
            s += y_[r];
            ss += y_[r] * y_[r];
        }
        return std::max(0.0, ss - s * s / static_cast<double>(rows.size()));
    }

    const Matrix& X_;
    std::span<const double> y_;
    std::size_t max_depth_;
    std::size_t mtry_;
    const std::vector<std::size_t>& canonical_;
    Rng& rng_;
};

} // namespace

ForestModel fit_forest(const Matrix& X, std::span<const double> y, std::vector<std::string> feature_names,
                       const ForestParams& params) {
    if (X.empty()) throw ValidationError("regression needs at least 2 rows");
    const auto p = X[0].size();
    if (p == 0) throw ValidationError("regression needs at least one feature");
    if (feature_names.size() != p)
        throw ValidationError(fmt::format("{} feature names for {} columns", feature_names.size(), p));
    if (params.n_trees == 0) throw ValidationError("forest needs at least one tree");

    Columns cols;
    const auto data = impute(X, y, p, cols);
    const auto mtry = std::clamp<std::size_t>(
        params.max_features.value_or(static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(p))))), 1, p);

    ForestModel m;
    m.params = params;
    m.feature_names = std::move(feature_names);
    m.column_means = cols.means;
    m.imputed = cols.imputed;
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    m.y_min = *lo;
    m.y_max = *hi;
    m.trees.resize(params.n_trees);
    std::vector<std::size_t> canonical(p);
    std::iota(canonical.begin(), canonical.end(), std::size_t{0});
    std::stable_sort(canonical.begin(), canonical.end(),
                     [&](auto a, auto b) { return m.feature_names[a] < m.feature_names[b]; });

    const auto n = data.size();
    const auto workers = std::max(1u, std::thread::hardware_concurrency());
    parallel_for_bounded(params.n_trees, workers, [&](std::size_t t) {
        Rng rng(mix_seed(params.seed + t));
        std::vector<std::size_t> rows(n);
        if (params.bootstrap) {
            for (auto& r : rows) r = rng.below(n);
        } else {
            std::iota(rows.begin(), rows.end(), std::size_t{0});
        }
        TreeBuilder builder(data, y, params.max_depth, mtry, canonical, rng);
        m.trees[t] = builder.build(std::move(rows));
    });
    return m;
}

double ForestModel::predict(std::span<const double> x) const {
    const auto filled = fill_missing(x, column_means);
    double s = 0.0;
    for (const auto& t : trees) s += t.predict(filled);
    return std::clamp(s / static_cast<double>(trees.size()), y_min, y_max);
}

namespace {

Json node_json(const RegressionTree& t, std::size_t i, const std::vector<std::string>& names) {
    const auto& n = t.nodes[i];
    if (n.feature < 0) return Json{{"value", n.value}};
    return Json{{"feature", names[static_cast<std::size_t>(n.feature)]},
                {"threshold", n.threshold},
                {"value", n.value},
                {"left", node_json(t, static_cast<std::size_t>(n.left), names)},
                {"right", node_json(t, static_cast<std::size_t>(n.right), names)}};
}

int node_from_json(RegressionTree& t, const Json& j, const std::vector<std::string>& names) {
    const int id = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();
    t.nodes.back().value = j.at("value").get<double>();
    if (!j.contains("feature")) return id;
    const auto name = j.at("feature").get<std::string>();
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw ValidationError(fmt::format("tree references unknown feature '{}'", name));
    const int l = node_from_json(t, j.at("left"), names);
    const int r = node_from_json(t, j.at("right"), names);
    auto& n = t.nodes[static_cast<std::size_t>(id)];
    n.feature = static_cast<int>(it - names.begin());
    n.threshold = j.at("threshold").get<double>();
    n.left = l;
    n.right = r;
    return id;
}

} // namespace

Json to_json(const ForestModel& m) {
    Json trees = Json::array();
    for (const auto& t : m.trees) trees.push_back(node_json(t, 0, m.feature_names));
    Json params{{"n_trees", m.params.n_trees},
                {"max_depth", m.params.max_depth},
                {"seed", m.params.seed},
                {"bootstrap", m.params.bootstrap}};
    params["max_features"] = m.params.max_features ? Json(*m.params.max_features) : Json(nullptr);
    return Json{{"format", ForestModel::kFormat}, {"feature_names", m.feature_names},
                {"column_means", m.column_means}, {"imputed", m.imputed},
                {"y_min", m.y_min},           {"y_max", m.y_max},
                {"params", params},           {"trees", trees}};
}

ForestModel forest_from_json(const Json& j) {
    if (j.value("format", "") != ForestModel::kFormat)
        throw ValidationError(fmt::format("not a {} document", ForestModel::kFormat));
    ForestModel m;
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.column_means = j.at("column_means").get<std::vector<double>>();
    m.imputed = j.at("imputed").get<std::vector<bool>>();
    m.y_min = j.at("y_min").get<double>();
    m.y_max = j.at("y_max").get<double>();
    const auto& p = j.at("params");
    m.params.n_trees = p.at("n_trees").get<std::size_t>();
    m.params.max_depth = p.at("max_depth").get<std::size_t>();
    m.params.seed = p.at("seed").get<std::uint64_t>();
    m.params.bootstrap = p.at("bootstrap").get<bool>();
    if (!p.at("max_features").is_null()) m.params.max_features = p.at("max_features").get<std::size_t>();
    for (const auto& tj : j.at("trees")) {
        RegressionTree t;
        node_from_json(t, tj, m.feature_names);
        m.trees.push_back(std::move(t));
    }
    if (m.trees.empty()) throw ValidationError("forest document has no trees");
    return m;
}

LinearModel fit_linear(const Matrix& X, std::span<const double> y, std::vector<std::string> feature_names) {
    if (X.empty()) throw ValidationError("regression needs at least 2 rows");
    const auto p = X[0].size();
    if (feature_names.size() != p)
        throw ValidationError(fmt::format("{} feature names for {} columns", feature_names.size(), p));
    Columns cols;
    const auto data = impute(X, y, p, cols);
    const auto n = data.size();
    Eigen::MatrixXd A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p + 1));
    Eigen::VectorXd b(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        A(r, 0) = 1.0;
        for (std::size_t f = 0; f < p; ++f) A(r, static_cast<Eigen::Index>(f + 1)) = data[i][f];
        b(r) = y[i];
    }
    const Eigen::VectorXd w = A.completeOrthogonalDecomposition().solve(b);
    LinearModel m;
    m.intercept = w(0);
    for (std::size_t f = 0; f < p; ++f) m.coef.push_back(w(static_cast<Eigen::Index>(f + 1)));
    m.feature_names = std::move(feature_names);
    m.column_means = cols.means;
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    m.y_min = *lo;
    m.y_max = *hi;
    return m;
}

double LinearModel::predict(std::span<const double> x) const {
    const auto filled = fill_missing(x, column_means);
    double s = intercept;
    for (std::size_t f = 0; f < coef.size(); ++f) s += coef[f] * filled[f];
    return std::clamp(s, y_min, y_max);
}

Json to_json(const LinearModel& m) {
    return Json{{"format", "infodensity-linear/v1"}, {"feature_names", m.feature_names},
                {"intercept", m.intercept},          {"coef", m.coef},
                {"column_means", m.column_means},    {"y_min", m.y_min},
                {"y_max", m.y_max}};
}

} // namespace infodensity::calibrate
