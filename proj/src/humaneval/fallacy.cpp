#include <algorithm>
#include <array>
#include <cmath>
#include <memory>

#include <fmt/format.h>

#include "infodensity/humaneval/humaneval.hpp"

namespace infodensity::humaneval {

FallacyCode merge_fallacy(std::span<const FallacyCode> codes) {
    if (codes.size() != kAnnotatorsPerSample)
        throw ValidationError(fmt::format("fallacy merge needs exactly 5 codes, got {}", codes.size()));
    std::array<int, 4> count{};
    for (auto c : codes) {
        if (c < 0 || c > 3) throw ValidationError(fmt::format("fallacy code {} outside 0..3", c));
        ++count[static_cast<std::size_t>(c)];
    }
    if (count[0] >= 3) return 0;
    if (count[0] == 2 && count[1] == 2) return 0;
    for (int c = 1; c <= 3; ++c)
        if (count[static_cast<std::size_t>(c)] >= 3) return c;
    // Most frequent nonzero code; ties resolved 2 > 3 > 1.
    constexpr std::array<int, 3> priority = {2, 3, 1};
    int best = priority[0];
    for (int c : priority)
        if (count[static_cast<std::size_t>(c)] > count[static_cast<std::size_t>(best)]) best = c;
    return best;
}

FallacyScores compute_fallacy(std::span<const FallacyCode> merged, std::span<const bool> difficult) {
    if (merged.size() != difficult.size())
        throw ValidationError("compute_fallacy: codes and flags differ in length");
    std::array<std::size_t, 4> count{};
    FallacyScores out;
    for (std::size_t i = 0; i < merged.size(); ++i) {
        if (!difficult[i]) continue;
        if (merged[i] < 0 || merged[i] > 3) throw ValidationError(fmt::format("fallacy code {} outside 0..3", merged[i]));
        ++count[static_cast<std::size_t>(merged[i])];
        ++out.conditioning;
    }
    if (out.conditioning == 0) throw ValidationError("no model-incorrect samples to condition fallacy on");
    const double n = static_cast<double>(out.conditioning);
    out.p_que = static_cast<double>(count[1]) / n;
    out.p_ano = static_cast<double>(count[2]) / n;
    out.p_amb = static_cast<double>(count[3]) / n;
    out.d_fal = out.p_que + out.p_ano + out.p_amb;
    return out;
}

bool on_half_grid(double x) {
    if (!std::isfinite(x) || x < 0.0 || x > 5.0) return false;
    const double twice = x * 2.0;
    return twice == std::round(twice);
}

HumanScores human_scores(std::span<const AnnotationRecord> labels, std::span<const DiversityAnnotation> diversity,
                         std::span<const Task> tasks) {
    HumanScores out;
    std::map<std::string, std::vector<const AnnotationRecord*>> per_sample;
    for (const auto& r : labels) per_sample[r.sample_id].push_back(&r);

    double dif_sum = 0.0;
    std::size_t dif_n = 0, img_yes = 0, img_n = 0, txt_yes = 0, txt_n = 0;
    for (const auto& r : labels) {
        if (r.difficulty) {
            dif_sum += *r.difficulty;
            ++dif_n;
        }
        if (r.redundancy_img_blind) {
            img_yes += *r.redundancy_img_blind;
            ++img_n;
        }
        if (r.redundancy_txt_blind) {
            txt_yes += *r.redundancy_txt_blind;
            ++txt_n;
        }
    }
    if (dif_n) out.difficulty = dif_sum / static_cast<double>(dif_n);
    if (img_n) out.redundancy_img = static_cast<double>(img_yes) / static_cast<double>(img_n);
    if (txt_n) out.redundancy_txt = static_cast<double>(txt_yes) / static_cast<double>(txt_n);

    std::vector<FallacyCode> merged;  // only model-incorrect samples reach here
    for (const auto& t : tasks) {
        const auto& id = t.sample->id;
        const auto it = per_sample.find(id);
        double s = 0.0;
        std::size_t n = 0;
        std::vector<FallacyCode> codes;
        if (it != per_sample.end()) {
            for (const auto* r : it->second) {
                if (r->difficulty) {
                    s += *r->difficulty;
                    ++n;
                }
                if (r->fallacy) codes.push_back(*r->fallacy);
            }
        }
        if (n) out.difficulty_per_sample[id] = s / static_cast<double>(n);
        if (n < kAnnotatorsPerSample) out.partial = true;
        if (t.model_correct) continue;
        if (codes.size() > kAnnotatorsPerSample)
            throw ValidationError(fmt::format("sample {} has {} fallacy codes; the merge needs exactly 5", id,
                                              codes.size()));
        if (codes.size() < kAnnotatorsPerSample) {
            ++out.samples_missing_fallacy;
            out.partial = true;
            continue;
        }
        merged.push_back(merge_fallacy(codes));
    }
    if (!merged.empty()) {
        const auto flags = std::make_unique<bool[]>(merged.size());
        std::fill_n(flags.get(), merged.size(), true);
        out.fallacy = compute_fallacy(merged, std::span<const bool>(flags.get(), merged.size()));
    }

    if (!diversity.empty()) {
        double img = 0.0, txt = 0.0;
        for (const auto& d : diversity) {
            img += d.image_score;
            txt += d.text_score;
        }
        out.diversity_img = img / static_cast<double>(diversity.size());
        out.diversity_txt = txt / static_cast<double>(diversity.size());
    }
    if (diversity.size() < kAnnotatorsPerSample) out.partial = true;
    return out;
}

Json to_json(const HumanScores& s) {
    auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    Json j{{"difficulty", opt(s.difficulty)},
           {"redundancy_img", opt(s.redundancy_img)},
           {"redundancy_txt", opt(s.redundancy_txt)},
           {"diversity_img", opt(s.diversity_img)},
           {"diversity_txt", opt(s.diversity_txt)},
           {"samples_missing_fallacy", s.samples_missing_fallacy},
           {"partial", s.partial}};
    if (s.fallacy)
        j["fallacy"] = Json{{"d_fal", s.fallacy->d_fal},
                            {"p_que", s.fallacy->p_que},
                            {"p_ano", s.fallacy->p_ano},
                            {"p_amb", s.fallacy->p_amb},
                            {"conditioning", s.fallacy->conditioning}};
    else
        j["fallacy"] = nullptr;
    j["difficulty_per_sample"] = s.difficulty_per_sample;
    return j;
}

} // namespace infodensity::humaneval
