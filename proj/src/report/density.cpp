#include "infodensity/report/density.hpp"

#include <cmath>
#include <set>

#include <fmt/format.h>

#include "infodensity/calibrate/calibrate.hpp"
#include "infodensity/error.hpp"

namespace infodensity::report {

TokenWeights token_weights(std::span<const std::string> questions, const text::Tokenizer& tokenizer) {
    if (questions.empty()) throw ValidationError("token weights need at least one question");
    double total = 0.0;
    for (const auto& q : questions) total += static_cast<double>(tokenizer.count(q));
    const double mean = total / static_cast<double>(questions.size());
    if (!(mean > 0.0)) throw ValidationError("mean question token count is 0; text weight undefined");
    return TokenWeights{kImageTokenWeight, mean};
}

namespace {

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> opt_from(const Json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<double>();
}

} // namespace

Json to_json(const DimensionReport& r) {
    Json j{{"benchmark", r.benchmark}, {"release_date", format_iso_date(r.release_date)}};
    j["fallacy"] = r.fallacy ? Json{{"all", r.fallacy->all}, {"que", r.fallacy->que}, {"ano", r.fallacy->ano},
                                    {"amb", r.fallacy->amb}}
                             : Json(nullptr);
    j["difficulty"] = r.difficulty ? Json{{"all", r.difficulty->all},
                                          {"jun", r.difficulty->jun},
                                          {"ext", r.difficulty->ext},
                                          {"amb", r.difficulty->amb},
                                          {"overlap", r.difficulty->overlap}}
                                   : Json(nullptr);
    j["redundancy"] = r.redundancy
                          ? Json{{"all", r.redundancy->all}, {"img", r.redundancy->img}, {"txt", opt(r.redundancy->txt)}}
                          : Json(nullptr);
    j["diversity"] = r.diversity
                         ? Json{{"all", r.diversity->all}, {"img", r.diversity->img}, {"txt", opt(r.diversity->txt)}}
                         : Json(nullptr);
    j["weights"] = Json{{"w_img", r.weights.w_img}, {"w_txt", r.weights.w_txt}};
    j["provenance"] = r.provenance;
    j["config_digest"] = r.config_digest;
    j["providers"] = r.providers;
    j["seeds"] = r.seeds;
    j["excluded_samples"] = r.excluded_samples;
    j["aligned_samples"] = r.aligned_samples;
    j["warnings"] = r.warnings;
    return j;
}

DimensionReport dimension_report_from_json(const Json& j) {
    try {
        DimensionReport r;
        r.benchmark = j.at("benchmark").get<std::string>();
        const auto date = parse_iso_date(j.at("release_date").get<std::string>());
        if (!date) throw ValidationError(fmt::format("report '{}' has an invalid release_date", r.benchmark));
        r.release_date = *date;
        if (const auto& f = j.at("fallacy"); !f.is_null())
            r.fallacy = FallacyDim{f.at("all").get<double>(), f.at("que").get<double>(), f.at("ano").get<double>(),
                                   f.at("amb").get<double>()};
        if (const auto& d = j.at("difficulty"); !d.is_null())
            r.difficulty = DifficultyDim{d.at("all").get<double>(), d.at("jun").get<double>(),
                                         d.at("ext").get<double>(), d.at("amb").get<double>(),
                                         d.value("overlap", 0.0)};
        if (const auto& d = j.at("redundancy"); !d.is_null())
            r.redundancy = RedundancyDim{d.at("all").get<double>(), d.at("img").get<double>(), opt_from(d, "txt")};
        if (const auto& d = j.at("diversity"); !d.is_null())
            r.diversity = DiversityDim{d.at("all").get<double>(), d.at("img").get<double>(), opt_from(d, "txt")};
        r.weights.w_img = j.at("weights").at("w_img").get<double>();
        r.weights.w_txt = j.at("weights").at("w_txt").get<double>();
        r.provenance = j.value("provenance", std::map<std::string, std::string>{});
        r.config_digest = j.value("config_digest", "");
        r.providers = j.value("providers", Json::object());
        r.seeds = j.value("seeds", Json::object());
        r.excluded_samples = j.value("excluded_samples", std::size_t{0});
        r.aligned_samples = j.value("aligned_samples", std::size_t{0});
        r.warnings = j.value("warnings", std::vector<std::string>{});
        return r;
    } catch (const Json::exception& e) {
        throw ValidationError(fmt::format("malformed report document: {}", e.what()));
    }
}

std::vector<std::string> check_identities(const DimensionReport& r, double tol) {
    std::vector<std::string> out;
    auto near = [&](double a, double b) { return std::abs(a - b) <= tol; };
    auto unit = [&](const char* what, double v) {
        if (!(v >= -tol && v <= 1.0 + tol)) out.push_back(fmt::format("{} = {} outside [0, 1]", what, v));
    };
    if (r.fallacy) {
        const auto& f = *r.fallacy;
        if (!near(f.all, f.que + f.ano + f.amb))
            out.push_back(fmt::format("fallacy ALL {} != {} + {} + {}", f.all, f.que, f.ano, f.amb));
        unit("fallacy.all", f.all);
        unit("fallacy.que", f.que);
        unit("fallacy.ano", f.ano);
        unit("fallacy.amb", f.amb);
    }
    if (r.difficulty) {
        const auto& d = *r.difficulty;
        if (!near(d.all, d.jun + d.amb)) out.push_back(fmt::format("difficulty ALL {} != {} + {}", d.all, d.jun, d.amb));
        if (d.ext > d.jun + tol) out.push_back(fmt::format("difficulty EXT {} exceeds JUN {}", d.ext, d.jun));
        unit("difficulty.jun", d.jun);
        unit("difficulty.ext", d.ext);
        unit("difficulty.amb", d.amb);
    }
    if (r.redundancy) {
        const auto& d = *r.redundancy;
        const double expect = weighted_combine(d.img, d.txt, r.weights);
        if (!near(d.all, expect)) out.push_back(fmt::format("redundancy ALL {} != weighted {}", d.all, expect));
        unit("redundancy.all", d.all);
    }
    if (r.diversity) {
        const auto& d = *r.diversity;
        const double expect = weighted_combine(d.img, d.txt, r.weights);
        if (!near(d.all, expect)) out.push_back(fmt::format("diversity ALL {} != weighted {}", d.all, expect));
        unit("diversity.all", d.all);
    }
    return out;
}

std::vector<std::string> derive_warnings(const DimensionReport& r) {
    std::vector<std::string> out;
    if (r.difficulty && r.difficulty->overlap > 0.03)
        out.push_back(fmt::format("difficulty overlap {:.3f} exceeds 0.03 (junior and ambiguity double-count)",
                                  r.difficulty->overlap));
    if (r.redundancy && !r.redundancy->txt)
        out.push_back("text redundancy inapplicable (mean options below 2.75); text term contributes 0");
    if (r.diversity && !r.diversity->txt) out.push_back("text diversity inapplicable; text term contributes 0");
    if (!r.fallacy) out.push_back("fallacy missing (no merged human labels)");
    if (!r.difficulty) out.push_back("difficulty missing");
    if (!r.redundancy) out.push_back("redundancy missing");
    if (!r.diversity) out.push_back("diversity missing");
    if (r.excluded_samples > 0)
        out.push_back(fmt::format("{} unusable samples excluded before alignment", r.excluded_samples));
    return out;
}

double information_density_index(double fal, double dif, double red, double div) {
    return (1.0 - fal) * dif * (1.0 - red) * div;
}

double information_density_index(const DimensionReport& r) {
    if (!r.fallacy || !r.difficulty || !r.redundancy || !r.diversity)
        throw ValidationError(fmt::format("index for '{}' needs all four dimensions", r.benchmark));
    return information_density_index(r.fallacy->all, r.difficulty->all, r.redundancy->all, r.diversity->all);
}

std::optional<double> column_value(const DimensionReport& r, std::string_view c) {
    if (c == "Fal.Que") return r.fallacy ? std::optional(r.fallacy->que) : std::nullopt;
    if (c == "Fal.Ano") return r.fallacy ? std::optional(r.fallacy->ano) : std::nullopt;
    if (c == "Fal.Amb") return r.fallacy ? std::optional(r.fallacy->amb) : std::nullopt;
    if (c == "Dif.Jun") return r.difficulty ? std::optional(r.difficulty->jun) : std::nullopt;
    if (c == "Dif.Ext") return r.difficulty ? std::optional(r.difficulty->ext) : std::nullopt;
    if (c == "Dif.Amb") return r.difficulty ? std::optional(r.difficulty->amb) : std::nullopt;
    if (c == "Red.ALL") return r.redundancy ? std::optional(r.redundancy->all) : std::nullopt;
    if (c == "Red.Img") return r.redundancy ? std::optional(r.redundancy->img) : std::nullopt;
    if (c == "Red.Txt") return r.redundancy ? r.redundancy->txt : std::nullopt;
    if (c == "Div.ALL") return r.diversity ? std::optional(r.diversity->all) : std::nullopt;
    if (c == "Div.Img") return r.diversity ? std::optional(r.diversity->img) : std::nullopt;
    if (c == "Div.Txt") return r.diversity ? r.diversity->txt : std::nullopt;
    throw ValidationError(fmt::format("unknown column '{}'", c));
}

CorrelationMatrix correlation_matrix(std::span<const DimensionReport> reports) {
    if (reports.size() < 3) throw ValidationError("correlation matrix needs at least 3 benchmarks");
    CorrelationMatrix m;
    const auto k = kCorrelationColumns.size();
    for (auto c : kCorrelationColumns) m.columns.emplace_back(c);
    m.mean_corr.assign(k, std::vector<std::optional<double>>(k));
    m.pairs.assign(k, std::vector<std::size_t>(k, 0));
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
            std::vector<double> xa, xb;
            for (const auto& r : reports) {
                const auto va = column_value(r, kCorrelationColumns[a]);
                const auto vb = column_value(r, kCorrelationColumns[b]);
                if (va && vb) {
                    xa.push_back(*va);
                    xb.push_back(*vb);
                }
            }
            m.pairs[a][b] = xa.size();
            if (xa.size() < 3) continue;
            try {
                m.mean_corr[a][b] = calibrate::correlate(xa, xb).mean_corr;
            } catch (const ValidationError&) {
                // constant column: undefined
            }
        }
    }
    return m;
}

std::vector<TrendSlope> time_trend(std::span<const DimensionReport> reports) {
    std::set<double> all_years;
    for (const auto& r : reports) all_years.insert(fractional_year(r.release_date));
    if (all_years.size() < 2) throw ValidationError("time trend needs at least 2 distinct release dates");

    auto slope_of = [&](const char* name, auto get) {
        TrendSlope t;
        t.dimension = name;
        std::vector<double> x, y;
        for (const auto& r : reports)
            if (const auto v = get(r)) {
                x.push_back(fractional_year(r.release_date));
                y.push_back(*v);
            }
        t.points = x.size();
        if (std::set<double>(x.begin(), x.end()).size() < 2) return t;
        const double n = static_cast<double>(x.size());
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            mx += x[i];
            my += y[i];
        }
        mx /= n;
        my /= n;
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sxy += (x[i] - mx) * (y[i] - my);
            sxx += (x[i] - mx) * (x[i] - mx);
        }
        t.slope = sxy / sxx;
        return t;
    };
    return {
        slope_of("Fallacy", [](const DimensionReport& r) { return r.fallacy ? std::optional(r.fallacy->all) : std::nullopt; }),
        slope_of("Difficulty",
                 [](const DimensionReport& r) { return r.difficulty ? std::optional(r.difficulty->all) : std::nullopt; }),
        slope_of("Redundancy",
                 [](const DimensionReport& r) { return r.redundancy ? std::optional(r.redundancy->all) : std::nullopt; }),
        slope_of("Diversity",
                 [](const DimensionReport& r) { return r.diversity ? std::optional(r.diversity->all) : std::nullopt; }),
    };
}

} // namespace infodensity::report
