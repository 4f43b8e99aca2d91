#include "infodensity/corpus/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include <fmt/format.h>

#include "infodensity/error.hpp"

namespace infodensity::corpus {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

// Accepts "B", "b", "(B)", "B." and similar decorations around one letter.
std::optional<char> normalize_label(const std::string& raw) {
    std::string s = trim(raw);
    if (!s.empty() && s.front() == '(') s.erase(0, 1);
    while (!s.empty() && (s.back() == ')' || s.back() == '.')) s.pop_back();
    s = trim(s);
    if (s.size() != 1 || !std::isalpha(static_cast<unsigned char>(s[0]))) return std::nullopt;
    return static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
}

const Json& require(const Json& record, const char* key, std::size_t line,
                    const fs::path& path) {
    auto it = record.find(key);
    if (it == record.end())
        throw ValidationError(fmt::format("{}:{}: missing key '{}'", path.string(), line, key));
    return *it;
}

std::string require_string(const Json& record, const char* key, std::size_t line,
                           const fs::path& path) {
    const Json& v = require(record, key, line, path);
    if (!v.is_string())
        throw ValidationError(
            fmt::format("{}:{}: key '{}' must be a string", path.string(), line, key));
    return v.get<std::string>();
}

} // namespace

std::size_t BenchmarkManifest::unusable_count() const {
    return static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [](const Sample& s) { return !s.usable; }));
}

const Sample* BenchmarkManifest::find(const std::string& id) const {
    for (const auto& s : samples)
        if (s.id == id) return &s;
    return nullptr;
}

BenchmarkManifest load_benchmark(const fs::path& manifest_path, const LoadOptions& options) {
    BenchmarkManifest manifest;
    manifest.base_dir = manifest_path.has_parent_path() ? manifest_path.parent_path() : fs::path(".");
    bool have_meta = false;
    std::unordered_set<std::string> ids;

    for_each_json_line(manifest_path, [&](const Json& record, std::size_t line) {
        if (!record.is_object())
            throw ValidationError(
                fmt::format("{}:{}: record is not an object", manifest_path.string(), line));
        if (!have_meta) {
            auto meta_it = record.find("__meta__");
            if (meta_it == record.end() || !meta_it->is_object())
                throw ValidationError(fmt::format(
                    "{}:{}: first record must be the __meta__ record", manifest_path.string(), line));
            const Json& meta = *meta_it;
            manifest.name = require_string(meta, "name", line, manifest_path);
            if (manifest.name.empty())
                throw ValidationError(
                    fmt::format("{}:{}: benchmark name is empty", manifest_path.string(), line));
            const auto date_text = require_string(meta, "release_date", line, manifest_path);
            auto date = parse_iso_date(date_text);
            if (!date)
                throw ValidationError(fmt::format("{}:{}: release_date '{}' is not YYYY-MM-DD",
                                                  manifest_path.string(), line, date_text));
            manifest.release_date = *date;
            manifest.notes = meta.value("notes", std::string{});
            have_meta = true;
            return;
        }
        if (record.contains("__meta__"))
            throw ValidationError(
                fmt::format("{}:{}: duplicate __meta__ record", manifest_path.string(), line));

        Sample s;
        s.id = require_string(record, "id", line, manifest_path);
        if (s.id.empty())
            throw ValidationError(fmt::format("{}:{}: empty id", manifest_path.string(), line));
        s.image_ref = require_string(record, "image", line, manifest_path);
        s.question = require_string(record, "question", line, manifest_path);
        const Json& opts = require(record, "options", line, manifest_path);
        if (!opts.is_array() || opts.empty())
            throw ValidationError(fmt::format("{}:{}: sample '{}': options must be a non-empty array",
                                              manifest_path.string(), line, s.id));
        for (const auto& o : opts) {
            if (!o.is_string())
                throw ValidationError(fmt::format("{}:{}: sample '{}': option is not a string",
                                                  manifest_path.string(), line, s.id));
            s.options.push_back(o.get<std::string>());
        }
        if (s.options.size() > kMaxOptions)
            throw ValidationError(fmt::format("{}:{}: sample '{}' has {} options (max {})",
                                              manifest_path.string(), line, s.id,
                                              s.options.size(), kMaxOptions));
        {
            std::unordered_set<std::string> seen;
            for (const auto& o : s.options)
                if (!seen.insert(o).second)
                    throw ValidationError(fmt::format("{}:{}: sample '{}' repeats option '{}'",
                                                      manifest_path.string(), line, s.id, o));
        }
        const auto answer_text = require_string(record, "answer", line, manifest_path);
        auto label = normalize_label(answer_text);
        if (!label || static_cast<std::size_t>(*label - 'A') >= s.options.size())
            throw ValidationError(fmt::format(
                "{}:{}: sample '{}': answer '{}' is not one of the option labels A-{}",
                manifest_path.string(), line, s.id, answer_text,
                option_label(s.options.size() - 1)));
        s.answer = *label;
        if (auto it = record.find("category"); it != record.end() && !it->is_null()) {
            if (!it->is_string())
                throw ValidationError(fmt::format("{}:{}: sample '{}': category must be a string",
                                                  manifest_path.string(), line, s.id));
            s.category = it->get<std::string>();
        }
        if (!ids.insert(s.id).second)
            throw ValidationError(
                fmt::format("{}:{}: duplicate id '{}'", manifest_path.string(), line, s.id));

        s.image_path = manifest.base_dir / s.image_ref;
        if (options.check_images) {
            std::error_code ec;
            if (s.image_ref.empty() || !fs::is_regular_file(s.image_path, ec)) {
                s.usable = false;
                manifest.warnings.push_back(
                    fmt::format("sample '{}': image '{}' not found", s.id, s.image_ref));
            }
        }
        manifest.samples.push_back(std::move(s));
    });

    if (!have_meta)
        throw ValidationError(fmt::format("{}: empty manifest", manifest_path.string()));
    if (manifest.samples.empty())
        throw ValidationError(fmt::format("{}: manifest has no samples", manifest_path.string()));
    return manifest;
}

Json sample_to_json(const Sample& s) {
    Json j{{"id", s.id},
           {"image", s.image_ref},
           {"question", s.question},
           {"options", s.options},
           {"answer", std::string(1, s.answer)}};
    if (s.category) j["category"] = *s.category;
    return j;
}

void save_benchmark(const BenchmarkManifest& manifest, const fs::path& path) {
    std::vector<Json> records;
    records.reserve(manifest.samples.size() + 1);
    records.push_back(Json{{"__meta__",
                            {{"name", manifest.name},
                             {"release_date", format_iso_date(manifest.release_date)},
                             {"notes", manifest.notes}}}});
    for (const auto& s : manifest.samples) records.push_back(sample_to_json(s));
    write_json_lines(path, records);
}

ApplicabilityReport applicability(const BenchmarkManifest& benchmark) {
    ApplicabilityReport r;
    if (benchmark.samples.empty()) return r;
    double total = 0.0;
    r.is_mcq = true;
    r.is_multimodal = true;
    for (const auto& s : benchmark.samples) {
        total += static_cast<double>(s.options.size());
        if (s.options.size() < 2) r.is_mcq = false;
        if (s.image_ref.empty()) r.is_multimodal = false;
    }
    r.mean_options = total / static_cast<double>(benchmark.samples.size());
    r.text_redundancy_applicable = r.mean_options >= kTextRedundancyMinOptions;
    return r;
}

Json to_json(const ApplicabilityReport& r) {
    return Json{{"is_mcq", r.is_mcq},
                {"is_multimodal", r.is_multimodal},
                {"mean_options", r.mean_options},
                {"text_redundancy_applicable", r.text_redundancy_applicable}};
}

ApplicabilityReport applicability_from_json(const Json& j) {
    ApplicabilityReport r;
    r.is_mcq = j.at("is_mcq").get<bool>();
    r.is_multimodal = j.at("is_multimodal").get<bool>();
    r.mean_options = j.at("mean_options").get<double>();
    r.text_redundancy_applicable = j.at("text_redundancy_applicable").get<bool>();
    return r;
}

} // namespace infodensity::corpus
