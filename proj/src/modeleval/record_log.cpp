#include <fstream>

#include <fmt/format.h>

#include "infodensity/error.hpp"
#include "infodensity/modeleval/modeleval.hpp"

namespace infodensity::modeleval {

Json to_json(const InferenceRecord& r) {
    auto letter = [](const std::optional<char>& c) { return c ? Json(std::string(1, *c)) : Json(nullptr); };
    Json j{{"sample_id", r.sample_id},
           {"model", r.model},
           {"seed", r.seed},
           {"condition", condition_name(r.condition)},
           {"best", letter(r.best)},
           {"alternative", letter(r.alternative)},
           {"raw", r.raw},
           {"attempts", r.attempts},
           {"rotation", r.rotation}};
    j["error"] = r.error ? Json(*r.error) : Json(nullptr);
    return j;
}

InferenceRecord record_from_json(const Json& j) {
    auto letter = [&](const char* key) -> std::optional<char> {
        if (!j.contains(key) || j[key].is_null()) return std::nullopt;
        const auto s = j[key].get<std::string>();
        if (s.size() != 1 || s[0] < 'A' || s[0] > 'Z')
            throw ValidationError(fmt::format("record field '{}' is not an option letter", key));
        return s[0];
    };
    InferenceRecord r;
    r.sample_id = j.at("sample_id").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.condition = condition_from_name(j.at("condition").get<std::string>());
    r.best = letter("best");
    r.alternative = letter("alternative");
    r.raw = j.value("raw", "");
    r.attempts = j.value("attempts", std::size_t{0});
    r.rotation = j.value("rotation", std::size_t{0});
    if (j.contains("error") && !j["error"].is_null()) r.error = j["error"].get<std::string>();
    return r;
}

RecordLog::RecordLog(std::filesystem::path path) : path_(std::move(path)) {
    if (std::filesystem::exists(path_)) {
        records_ = load(path_);
        return;
    }
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw ValidationError(fmt::format("cannot create record log {}", path_.string()));
    out << Json{{"__schema__", kSchema}}.dump() << '\n';
}

void RecordLog::append(const InferenceRecord& record) {
    std::lock_guard lock(mutex_);
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw ValidationError(fmt::format("cannot append to record log {}", path_.string()));
    out << to_json(record).dump() << '\n';
    out.flush();
    records_.push_back(record);
}

std::optional<InferenceRecord> RecordLog::find(const std::string& sample_id, const std::string& model,
                                               std::uint64_t seed, Condition condition) const {
    std::lock_guard lock(mutex_);
    for (auto it = records_.rbegin(); it != records_.rend(); ++it)
        if (it->sample_id == sample_id && it->model == model && it->seed == seed && it->condition == condition)
            return *it;
    return std::nullopt;
}

std::vector<InferenceRecord> RecordLog::load(const std::filesystem::path& path) {
    std::vector<InferenceRecord> out;
    bool header = false;
    for_each_json_line(path, [&](const Json& j, std::size_t line) {
        if (!header) {
            if (!j.contains("__schema__") || j["__schema__"] != kSchema)
                throw ValidationError(fmt::format("{}:{}: expected schema header '{}'", path.string(), line, kSchema));
            header = true;
            return;
        }
        try {
            out.push_back(record_from_json(j));
        } catch (const Json::exception& e) {
            throw ValidationError(fmt::format("{}:{}: {}", path.string(), line, e.what()));
        }
    });
    return out;
}

} // namespace infodensity::modeleval
