#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace infodensity {

using Json = nlohmann::json;

/// Calls fn(record, line_number) for each non-blank line. Line numbers are
/// 1-based. Malformed JSON throws ValidationError naming the line.
void for_each_json_line(const std::filesystem::path& path,
                        const std::function<void(const Json&, std::size_t)>& fn);

/// Writes records one per line, replacing the file atomically.
void write_json_lines(const std::filesystem::path& path, const std::vector<Json>& records);

Json read_json_file(const std::filesystem::path& path);

/// Pretty-printed, newline-terminated, written via temp file + rename.
void write_json_file(const std::filesystem::path& path, const Json& doc);

void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace infodensity
