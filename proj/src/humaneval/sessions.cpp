#include <chrono>
#include <numeric>
#include <set>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "infodensity/humaneval/humaneval.hpp"
#include "infodensity/util/rng.hpp"

namespace infodensity::humaneval {

namespace {

std::string utc_now() {
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(
                                                    std::chrono::system_clock::now())));
}

} // namespace

AnnotationService::AnnotationService(std::vector<Task> tasks, bool text_applicable, LabelStore& store)
    : tasks_(std::move(tasks)), text_applicable_(text_applicable), store_(store) {
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
        if (!tasks_[i].sample) throw ValidationError("annotation task without a sample");
        if (!by_id_.emplace(tasks_[i].sample->id, i).second)
            throw ValidationError(fmt::format("duplicate annotation task {}", tasks_[i].sample->id));
    }
}

std::vector<std::size_t> AnnotationService::order_for(const std::string& annotator) const {
    std::vector<std::size_t> order(tasks_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed_from_string(annotator));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    return order;
}

const Task* AnnotationService::find(const std::string& sample_id) const {
    auto it = by_id_.find(sample_id);
    return it == by_id_.end() ? nullptr : &tasks_[it->second];
}

std::optional<Task> AnnotationService::next(const std::string& annotator) const {
    for (auto i : order_for(annotator))
        if (!store_.has_label(annotator, tasks_[i].sample->id)) return tasks_[i];
    return std::nullopt;
}

void AnnotationService::submit(AnnotationRecord record) {
    std::lock_guard lock(mutex_);
    const auto* task = find(record.sample_id);
    if (!task) throw NotFoundError(fmt::format("unknown sample '{}'", record.sample_id));
    validate_annotation(record, task->model_correct, text_applicable_);
    if (record.timestamp.empty()) record.timestamp = utc_now();
    store_.append(record);
}

void AnnotationService::submit(DiversityAnnotation annotation) {
    std::lock_guard lock(mutex_);
    if (annotation.annotator.empty()) throw ValidationError("diversity annotation lacks an annotator");
    if (!on_half_grid(annotation.image_score) || !on_half_grid(annotation.text_score))
        throw ValidationError("diversity scores must lie on the 0.5 grid in [0, 5]");
    if (store_.has_diversity(annotation.annotator))
        throw ConflictError(fmt::format("annotator {} already submitted diversity scores", annotation.annotator));
    if (next(annotation.annotator))
        throw ValidationError(fmt::format("annotator {} has unlabeled samples left", annotation.annotator));
    if (annotation.timestamp.empty()) annotation.timestamp = utc_now();
    store_.append(annotation);
}

Json AnnotationService::task_json(const Task& task) const {
    const auto& s = *task.sample;
    Json options = Json::array();
    for (std::size_t i = 0; i < s.options.size(); ++i)
        options.push_back(Json{{"label", std::string(1, corpus::option_label(i))}, {"text", s.options[i]}});
    return Json{{"sample_id", s.id},
                {"question", s.question},
                {"options", std::move(options)},
                {"answer", std::string(1, s.answer)},
                {"image_url", "/api/image/" + s.id},
                {"model_correct", task.model_correct},
                {"mandatory", mandatory_fields(task.model_correct, text_applicable_)},
                {"text_applicable", text_applicable_}};
}

Json AnnotationService::progress() const {
    std::set<std::string> annotators;
    for (const auto& r : store_.labels()) annotators.insert(r.annotator);
    for (const auto& d : store_.diversity()) annotators.insert(d.annotator);
    Json per = Json::object();
    for (const auto& a : annotators)
        per[a] = Json{{"completed", store_.count_for(a)}, {"diversity_submitted", store_.has_diversity(a)}};
    return Json{{"total_tasks", tasks_.size()}, {"annotators", std::move(per)}};
}

} // namespace infodensity::humaneval
