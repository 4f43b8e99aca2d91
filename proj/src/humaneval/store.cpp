#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "infodensity/humaneval/humaneval.hpp"

namespace infodensity::humaneval {

Json to_json(const AnnotationRecord& r) {
    Json j{{"kind", "label"}, {"annotator", r.annotator}, {"sample_id", r.sample_id}};
    j["fallacy"] = r.fallacy ? Json(*r.fallacy) : Json(nullptr);
    j["difficulty"] = r.difficulty ? Json(*r.difficulty) : Json(nullptr);
    j["redundancy_img_blind"] = r.redundancy_img_blind ? Json(*r.redundancy_img_blind) : Json(nullptr);
    j["redundancy_txt_blind"] = r.redundancy_txt_blind ? Json(*r.redundancy_txt_blind) : Json(nullptr);
    j["timestamp"] = r.timestamp;
    return j;
}

namespace {

template <typename T>
std::optional<T> opt_field(const Json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<T>();
}

} // namespace

AnnotationRecord annotation_from_json(const Json& j) {
    try {
        AnnotationRecord r;
        r.annotator = j.at("annotator").get<std::string>();
        r.sample_id = j.at("sample_id").get<std::string>();
        r.fallacy = opt_field<int>(j, "fallacy");
        r.difficulty = opt_field<double>(j, "difficulty");
        r.redundancy_img_blind = opt_field<bool>(j, "redundancy_img_blind");
        r.redundancy_txt_blind = opt_field<bool>(j, "redundancy_txt_blind");
        r.timestamp = j.value("timestamp", "");
        return r;
    } catch (const Json::exception& e) {
        throw ValidationError(fmt::format("malformed annotation: {}", e.what()));
    }
}

Json to_json(const DiversityAnnotation& d) {
    return Json{{"kind", "diversity"},
                {"annotator", d.annotator},
                {"image_score", d.image_score},
                {"text_score", d.text_score},
                {"timestamp", d.timestamp}};
}

DiversityAnnotation diversity_annotation_from_json(const Json& j) {
    try {
        DiversityAnnotation d;
        d.annotator = j.at("annotator").get<std::string>();
        d.image_score = j.at("image_score").get<double>();
        d.text_score = j.at("text_score").get<double>();
        d.timestamp = j.value("timestamp", "");
        return d;
    } catch (const Json::exception& e) {
        throw ValidationError(fmt::format("malformed diversity annotation: {}", e.what()));
    }
}

std::vector<std::string> mandatory_fields(bool model_correct, bool text_applicable) {
    if (!model_correct) return {"fallacy", "difficulty"};
    std::vector<std::string> out{"difficulty", "redundancy_img_blind"};
    if (text_applicable) out.push_back("redundancy_txt_blind");
    return out;
}

void validate_annotation(const AnnotationRecord& r, bool model_correct, bool text_applicable) {
    if (r.annotator.empty()) throw ValidationError("annotation lacks an annotator");
    for (const auto& field : mandatory_fields(model_correct, text_applicable)) {
        const bool present = field == "fallacy"      ? r.fallacy.has_value()
                             : field == "difficulty" ? r.difficulty.has_value()
                             : field == "redundancy_img_blind" ? r.redundancy_img_blind.has_value()
                                                               : r.redundancy_txt_blind.has_value();
        if (!present)
            throw ValidationError(fmt::format("sample {}: field '{}' is mandatory for a model-{} sample",
                                              r.sample_id, field, model_correct ? "correct" : "incorrect"));
    }
    if (r.difficulty && !on_half_grid(*r.difficulty))
        throw ValidationError(fmt::format("difficulty {} is not on the 0.5 grid in [0, 5]", *r.difficulty));
    if (r.fallacy && (*r.fallacy < 0 || *r.fallacy > 3))
        throw ValidationError(fmt::format("fallacy code {} outside 0..3", *r.fallacy));
}

LabelStore::LabelStore(std::filesystem::path path) : path_(std::move(path)) {
    if (std::filesystem::exists(path_)) {
        bool header = false;
        for_each_json_line(path_, [&](const Json& j, std::size_t line) {
            if (!header) {
                if (!j.contains("__schema__") || j["__schema__"] != kSchema)
                    throw ValidationError(fmt::format("{}:{}: expected schema header '{}'", path_.string(), line, kSchema));
                header = true;
                return;
            }
            const auto kind = j.value("kind", "");
            if (kind == "label") {
                auto r = annotation_from_json(j);
                if (label_index_.emplace(std::pair{r.annotator, r.sample_id}, labels_.size()).second)
                    labels_.push_back(std::move(r));
            } else if (kind == "diversity") {
                auto d = diversity_annotation_from_json(j);
                const bool seen = std::any_of(diversity_.begin(), diversity_.end(),
                                              [&](const auto& x) { return x.annotator == d.annotator; });
                if (!seen) diversity_.push_back(std::move(d));
            } else {
                throw ValidationError(fmt::format("{}:{}: unknown record kind '{}'", path_.string(), line, kind));
            }
        });
        if (!header) write_line(Json{{"__schema__", kSchema}});
        return;
    }
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    write_line(Json{{"__schema__", kSchema}});
}

void LabelStore::write_line(const Json& j) {
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw ValidationError(fmt::format("cannot write label store {}", path_.string()));
    out << j.dump() << '\n';
    out.flush();
}

void LabelStore::append(const AnnotationRecord& r) {
    std::lock_guard lock(mutex_);
    const auto key = std::pair{r.annotator, r.sample_id};
    if (label_index_.count(key))
        throw ConflictError(fmt::format("annotator {} already labeled sample {}", r.annotator, r.sample_id));
    write_line(to_json(r));
    label_index_.emplace(key, labels_.size());
    labels_.push_back(r);
}

void LabelStore::append(const DiversityAnnotation& d) {
    std::lock_guard lock(mutex_);
    for (const auto& x : diversity_)
        if (x.annotator == d.annotator)
            throw ConflictError(fmt::format("annotator {} already submitted diversity scores", d.annotator));
    write_line(to_json(d));
    diversity_.push_back(d);
}

std::vector<AnnotationRecord> LabelStore::labels() const {
    std::lock_guard lock(mutex_);
    return labels_;
}

std::vector<DiversityAnnotation> LabelStore::diversity() const {
    std::lock_guard lock(mutex_);
    return diversity_;
}

bool LabelStore::has_label(const std::string& annotator, const std::string& sample_id) const {
    std::lock_guard lock(mutex_);
    return label_index_.count({annotator, sample_id}) > 0;
}

bool LabelStore::has_diversity(const std::string& annotator) const {
    std::lock_guard lock(mutex_);
    for (const auto& d : diversity_)
        if (d.annotator == annotator) return true;
    return false;
}

std::size_t LabelStore::count_for(const std::string& annotator) const {
    std::lock_guard lock(mutex_);
    std::size_t n = 0;
    for (const auto& [key, _] : label_index_) n += key.first == annotator;
    return n;
}

std::string LabelStore::export_text() const {
    std::lock_guard lock(mutex_);
    std::ifstream in(path_, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace infodensity::humaneval
