#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "infodensity/report/density.hpp"

namespace infodensity::report {

struct EmitOptions {
    bool include_index = false;  ///< opt-in; adds the index column and its caveat
};

/// Rows sorted by release date, then name. Missing values are empty in CSV
/// and "-" in Markdown.
std::string report_csv(std::span<const DimensionReport> reports, const EmitOptions& options = {});
std::string report_markdown(std::span<const DimensionReport> reports, const EmitOptions& options = {});
Json report_document(std::span<const DimensionReport> reports, const EmitOptions& options = {});
std::vector<DimensionReport> reports_from_document(const Json& doc);

enum class ReportFormat { csv, markdown, json };
ReportFormat report_format_from_name(const std::string& name);

/// Throws ValidationError when the path cannot be written.
void emit_report(std::span<const DimensionReport> reports, ReportFormat format, const std::filesystem::path& path,
                 const EmitOptions& options = {});

std::string correlation_csv(const CorrelationMatrix& m);
std::string trend_csv(std::span<const TrendSlope> slopes);

} // namespace infodensity::report
