#include "infodensity/util/jsonl.hpp"

#include <fstream>

#include <fmt/format.h>

#include "infodensity/error.hpp"

namespace infodensity {

void for_each_json_line(const std::filesystem::path& path,
                        const std::function<void(const Json&, std::size_t)>& fn) {
    std::ifstream in(path);
    if (!in) throw ValidationError(fmt::format("cannot open {}", path.string()));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        Json record;
        try {
            record = Json::parse(line);
        } catch (const Json::parse_error& e) {
            throw ValidationError(
                fmt::format("{}:{}: malformed record: {}", path.string(), line_no, e.what()));
        }
        fn(record, line_no);
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << text;
        if (!out) throw std::runtime_error("write failed: " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

void write_json_lines(const std::filesystem::path& path, const std::vector<Json>& records) {
    std::string text;
    for (const auto& r : records) {
        text += r.dump();
        text += '\n';
    }
    write_text_file(path, text);
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(fmt::format("cannot open {}", path.string()));
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError(fmt::format("{}: malformed JSON: {}", path.string(), e.what()));
    }
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
    write_text_file(path, doc.dump(2) + "\n");
}

} // namespace infodensity
