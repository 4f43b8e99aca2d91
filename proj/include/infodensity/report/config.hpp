#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "infodensity/util/jsonl.hpp"

namespace infodensity::report {

/// Flat key = value configuration. Lines starting with '#' are comments.
/// Unknown keys are kept (and digested) so typos surface in reports.
class Config {
public:
    Config();  ///< defaults only

    static Config load(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value);
    /// "key=value"; throws ValidationError otherwise.
    void apply_override(const std::string& assignment);

    std::optional<std::string> find(const std::string& key) const;
    std::string get(const std::string& key) const;  ///< throws when absent
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<std::uint64_t> get_u64_list(const std::string& key) const;

    /// SHA-256 over the sorted "key=value\n" lines.
    std::string digest() const;
    Json to_json() const;
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace infodensity::report
