#include "infodensity/report/config.hpp"

#include <charconv>
#include <fstream>

#include <fmt/format.h>

#include "infodensity/error.hpp"
#include "infodensity/util/hash.hpp"

namespace infodensity::report {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

} // namespace

Config::Config() {
    values_ = {
        {"seed", "0"},
        {"sample_size", "1000"},
        {"tokenizer", "default"},
        {"embed.mode", "file"},
        {"embed.store", ""},
        {"embed.endpoint", ""},
        {"embed.batch_size", "32"},
        {"embed.max_concurrency", "4"},
        {"features.embedding", "false"},
        {"region.grid", "7"},
        {"diversity.k", ""},
        {"diversity.tau_image", "0.92"},
        {"diversity.tau_text", "0.90"},
        {"diversity.max_iter", "100"},
        {"modeleval.seeds", "11,22,33,44,55"},
        {"modeleval.rotate_options", "false"},
        {"modeleval.ambiguity_non_unanimous", "true"},
        {"modeleval.ablation_model", ""},
        {"forest.n_trees", "100"},
        {"forest.max_depth", "3"},
        {"forest.bootstrap", "true"},
        {"calibrate.regressor", "forest"},
        {"report.index", "false"},
    };
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(fmt::format("cannot read config {}", path.string()));
    Config c;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ValidationError(fmt::format("{}:{}: expected key = value", path.string(), n));
        const auto key = trim(std::string_view(t).substr(0, eq));
        if (key.empty()) throw ValidationError(fmt::format("{}:{}: empty key", path.string(), n));
        c.set(key, trim(std::string_view(t).substr(eq + 1)));
    }
    return c;
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

void Config::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ValidationError(fmt::format("override '{}' is not key=value", assignment));
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

std::optional<std::string> Config::find(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string Config::get(const std::string& key) const {
    auto v = find(key);
    if (!v) throw ValidationError(fmt::format("config key '{}' is not set", key));
    return *v;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
    return find(key).value_or(fallback);
}

double Config::get_double(const std::string& key) const {
    const auto v = get(key);
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ValidationError(fmt::format("config key '{}' = '{}' is not a number", key, v));
    }
}

std::uint64_t Config::get_u64(const std::string& key) const {
    const auto v = get(key);
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw ValidationError(fmt::format("config key '{}' = '{}' is not an unsigned integer", key, v));
    return out;
}

bool Config::get_bool(const std::string& key) const {
    const auto v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ValidationError(fmt::format("config key '{}' = '{}' is not a boolean", key, v));
}

std::vector<std::uint64_t> Config::get_u64_list(const std::string& key) const {
    const auto v = get(key);
    std::vector<std::uint64_t> out;
    std::size_t start = 0;
    while (start <= v.size()) {
        auto end = v.find(',', start);
        if (end == std::string::npos) end = v.size();
        const auto item = trim(std::string_view(v).substr(start, end - start));
        std::uint64_t x = 0;
        const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
        if (item.empty() || ec != std::errc{} || p != item.data() + item.size())
            throw ValidationError(fmt::format("config key '{}': '{}' is not an unsigned integer", key, item));
        out.push_back(x);
        start = end + 1;
    }
    return out;
}

std::string Config::digest() const {
    std::string material;
    for (const auto& [k, v] : values_) material += k + "=" + v + "\n";
    return sha256_hex(material);
}

Json Config::to_json() const { return Json(values_); }

} // namespace infodensity::report
