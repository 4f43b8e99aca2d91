#include "infodensity/report/emit.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "infodensity/error.hpp"

namespace infodensity::report {

namespace {

std::vector<const DimensionReport*> ordered(std::span<const DimensionReport> reports) {
    std::vector<const DimensionReport*> out;
    for (const auto& r : reports) out.push_back(&r);
    std::stable_sort(out.begin(), out.end(), [](const auto* a, const auto* b) {
        if (a->release_date != b->release_date) return a->release_date < b->release_date;
        return a->benchmark < b->benchmark;
    });
    return out;
}

using Cell = std::optional<double>;

std::vector<Cell> row_cells(const DimensionReport& r, bool with_index) {
    std::vector<Cell> c;
    auto push = [&](bool present, auto get) { c.push_back(present ? Cell(get()) : Cell()); };
    push(r.fallacy.has_value(), [&] { return r.fallacy->all; });
    push(r.fallacy.has_value(), [&] { return r.fallacy->que; });
    push(r.fallacy.has_value(), [&] { return r.fallacy->ano; });
    push(r.fallacy.has_value(), [&] { return r.fallacy->amb; });
    push(r.difficulty.has_value(), [&] { return r.difficulty->all; });
    push(r.difficulty.has_value(), [&] { return r.difficulty->jun; });
    push(r.difficulty.has_value(), [&] { return r.difficulty->ext; });
    push(r.difficulty.has_value(), [&] { return r.difficulty->amb; });
    push(r.redundancy.has_value(), [&] { return r.redundancy->all; });
    push(r.redundancy.has_value(), [&] { return r.redundancy->img; });
    c.push_back(r.redundancy ? r.redundancy->txt : Cell());
    push(r.diversity.has_value(), [&] { return r.diversity->all; });
    push(r.diversity.has_value(), [&] { return r.diversity->img; });
    c.push_back(r.diversity ? r.diversity->txt : Cell());
    if (with_index) {
        if (r.fallacy && r.difficulty && r.redundancy && r.diversity) c.push_back(information_density_index(r));
        else c.push_back(Cell());
    }
    return c;
}

const std::vector<std::string>& value_headers() {
    static const std::vector<std::string> h{"fallacy_all", "fallacy_que", "fallacy_ano", "fallacy_amb",
                                            "difficulty_all", "difficulty_jun", "difficulty_ext", "difficulty_amb",
                                            "redundancy_all", "redundancy_img", "redundancy_txt",
                                            "diversity_all", "diversity_img", "diversity_txt"};
    return h;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

} // namespace

std::string report_csv(std::span<const DimensionReport> reports, const EmitOptions& options) {
    std::string out = "benchmark,release_date";
    for (const auto& h : value_headers()) out += "," + h;
    if (options.include_index) out += ",index";
    out += ",w_img,w_txt,config_digest\n";
    for (const auto* r : ordered(reports)) {
        out += csv_field(r->benchmark) + "," + format_iso_date(r->release_date);
        for (const auto& c : row_cells(*r, options.include_index)) out += c ? fmt::format(",{:.17g}", *c) : ",";
        out += fmt::format(",{:.17g},{:.17g},{}\n", r->weights.w_img, r->weights.w_txt, r->config_digest);
    }
    return out;
}

std::string report_markdown(std::span<const DimensionReport> reports, const EmitOptions& options) {
    std::string out = "| Benchmark | Released | Fal ALL | Fal Que | Fal Ano | Fal Amb | Dif ALL | Dif Jun | Dif Ext | "
                      "Dif Amb | Red ALL | Red Img | Red Txt | Div ALL | Div Img | Div Txt |";
    if (options.include_index) out += " Index |";
    out += "\n|---|---|";
    const std::size_t cols = 14 + (options.include_index ? 1 : 0);
    for (std::size_t i = 0; i < cols; ++i) out += "---:|";
    out += "\n";
    const auto rows = ordered(reports);
    for (const auto* r : rows) {
        out += fmt::format("| {} | {} |", r->benchmark, format_iso_date(r->release_date));
        for (const auto& c : row_cells(*r, options.include_index)) out += c ? fmt::format(" {:.3f} |", *c) : " - |";
        out += "\n";
    }
    out += "\n";
    for (const auto* r : rows) {
        out += fmt::format("- **{}**: config `{}`, w_img {:.2f}, w_txt {:.2f}, {} aligned, {} excluded\n", r->benchmark,
                           r->config_digest, r->weights.w_img, r->weights.w_txt, r->aligned_samples,
                           r->excluded_samples);
        for (const auto& w : r->warnings) out += fmt::format("  - warning: {}\n", w);
    }
    if (options.include_index) out += fmt::format("\n> {}\n", kIndexCaveat);
    return out;
}

Json report_document(std::span<const DimensionReport> reports, const EmitOptions& options) {
    Json rows = Json::array();
    for (const auto* r : ordered(reports)) {
        auto j = to_json(*r);
        if (options.include_index && r->fallacy && r->difficulty && r->redundancy && r->diversity)
            j["index"] = information_density_index(*r);
        rows.push_back(std::move(j));
    }
    Json doc{{"format", "infodensity-report/v1"}, {"reports", std::move(rows)}};
    if (options.include_index) doc["index_caveat"] = kIndexCaveat;
    return doc;
}

std::vector<DimensionReport> reports_from_document(const Json& doc) {
    if (doc.value("format", "") != "infodensity-report/v1")
        throw ValidationError("not an infodensity-report/v1 document");
    std::vector<DimensionReport> out;
    for (const auto& j : doc.at("reports")) out.push_back(dimension_report_from_json(j));
    return out;
}

ReportFormat report_format_from_name(const std::string& name) {
    if (name == "csv") return ReportFormat::csv;
    if (name == "md" || name == "markdown") return ReportFormat::markdown;
    if (name == "json") return ReportFormat::json;
    throw ValidationError(fmt::format("unknown report format '{}'", name));
}

void emit_report(std::span<const DimensionReport> reports, ReportFormat format, const std::filesystem::path& path,
                 const EmitOptions& options) {
    if (reports.empty()) throw ValidationError("nothing to report");
    std::string text;
    switch (format) {
    case ReportFormat::csv: text = report_csv(reports, options); break;
    case ReportFormat::markdown: text = report_markdown(reports, options); break;
    case ReportFormat::json: text = report_document(reports, options).dump(2) + "\n"; break;
    }
    try {
        write_text_file(path, text);
    } catch (const std::exception& e) {
        throw ValidationError(fmt::format("cannot write {}: {}", path.string(), e.what()));
    }
}

std::string correlation_csv(const CorrelationMatrix& m) {
    std::string out = "column";
    for (const auto& c : m.columns) out += "," + c;
    out += "\n";
    for (std::size_t a = 0; a < m.columns.size(); ++a) {
        out += m.columns[a];
        for (std::size_t b = 0; b < m.columns.size(); ++b)
            out += m.mean_corr[a][b] ? fmt::format(",{:.17g}", *m.mean_corr[a][b]) : ",";
        out += "\n";
    }
    return out;
}

std::string trend_csv(std::span<const TrendSlope> slopes) {
    std::string out = "dimension,slope_per_year,points\n";
    for (const auto& s : slopes)
        out += fmt::format("{},{},{}\n", s.dimension, s.slope ? fmt::format("{:.17g}", *s.slope) : "", s.points);
    return out;
}

} // namespace infodensity::report
