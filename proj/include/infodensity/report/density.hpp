#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "infodensity/text/features.hpp"
#include "infodensity/util/dates.hpp"
#include "infodensity/util/jsonl.hpp"
#include "infodensity/weights.hpp"

namespace infodensity::report {

/// w_img = 167, w_txt = mean token count of `questions`. Throws
/// ValidationError when there are no questions or the mean is 0.
TokenWeights token_weights(std::span<const std::string> questions, const text::Tokenizer& tokenizer);

struct FallacyDim {
    double all = 0.0, que = 0.0, ano = 0.0, amb = 0.0;
    bool operator==(const FallacyDim&) const = default;
};
struct DifficultyDim {
    double all = 0.0, jun = 0.0, ext = 0.0, amb = 0.0, overlap = 0.0;
    bool operator==(const DifficultyDim&) const = default;
};
struct RedundancyDim {
    double all = 0.0, img = 0.0;
    std::optional<double> txt;  ///< absent when text redundancy is inapplicable
    bool operator==(const RedundancyDim&) const = default;
};
struct DiversityDim {
    double all = 0.0, img = 0.0;
    std::optional<double> txt;
    bool operator==(const DiversityDim&) const = default;
};

struct DimensionReport {
    std::string benchmark;
    Date release_date{};
    std::optional<FallacyDim> fallacy;
    std::optional<DifficultyDim> difficulty;
    std::optional<RedundancyDim> redundancy;
    std::optional<DiversityDim> diversity;
    TokenWeights weights;
    std::map<std::string, std::string> provenance;  ///< dimension -> paradigm
    std::string config_digest;
    Json providers = Json::object();
    Json seeds = Json::object();
    std::size_t excluded_samples = 0;
    std::size_t aligned_samples = 0;
    std::vector<std::string> warnings;

    bool operator==(const DimensionReport&) const = default;
};

Json to_json(const DimensionReport& r);
DimensionReport dimension_report_from_json(const Json& j);

/// Human-readable descriptions of every violated identity (empty when the
/// report is internally consistent to `tol`).
std::vector<std::string> check_identities(const DimensionReport& r, double tol = 1e-9);

/// Warnings the report should carry: overlap above threshold, inapplicable
/// text modality, missing dimensions.
std::vector<std::string> derive_warnings(const DimensionReport& r);

inline constexpr std::string_view kIndexCaveat =
    "Relative index only. Benchmarks serve different purposes, so this single number is not a "
    "ranking of benchmark quality; read it alongside the four dimensions.";

/// (1 - fallacy) * difficulty * (1 - redundancy) * diversity over the ALL
/// scores. Throws ValidationError when any dimension is missing.
double information_density_index(const DimensionReport& r);
double information_density_index(double fal, double dif, double red, double div);

/// The twelve sub-dimension columns, in matrix order.
inline constexpr std::array<std::string_view, 12> kCorrelationColumns = {
    "Fal.Que", "Fal.Ano", "Fal.Amb", "Dif.Jun", "Dif.Ext", "Dif.Amb",
    "Red.ALL", "Red.Img", "Red.Txt", "Div.ALL", "Div.Img", "Div.Txt"};

/// Value of a named column, or nullopt when the report lacks it.
std::optional<double> column_value(const DimensionReport& r, std::string_view column);

struct CorrelationMatrix {
    std::vector<std::string> columns;
    std::vector<std::vector<std::optional<double>>> mean_corr;  ///< (SRCC + PLCC) / 2
    std::vector<std::vector<std::size_t>> pairs;                ///< benchmarks used per cell
};

/// Per cell, the mean of SRCC and PLCC over benchmarks that have both
/// columns. Cells with fewer than 3 such benchmarks or a constant column are
/// undefined. Needs at least 3 reports.
CorrelationMatrix correlation_matrix(std::span<const DimensionReport> reports);

struct TrendSlope {
    std::string dimension;
    std::optional<double> slope;  ///< per year; absent with < 2 distinct dates
    std::size_t points = 0;
};

/// OLS slope of each ALL score against fractional release year. Throws when
/// all release dates are equal.
std::vector<TrendSlope> time_trend(std::span<const DimensionReport> reports);

} // namespace infodensity::report
