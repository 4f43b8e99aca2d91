#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "infodensity/error.hpp"
#include "infodensity/modeleval/modeleval.hpp"
#include "infodensity/util/hash.hpp"
#include "infodensity/util/parallel.hpp"

namespace infodensity::modeleval {

InferenceRecord query_best_alt(const corpus::Sample& sample, ChatClient& client, const ModelEndpoint& endpoint,
                               std::uint64_t seed, Condition condition, const QueryOptions& options,
                               std::size_t seed_index) {
    const auto n = sample.options.size();
    InferenceRecord rec;
    rec.sample_id = sample.id;
    rec.model = endpoint.name;
    rec.seed = seed;
    rec.condition = condition;
    rec.rotation = options.rotate_options && n > 0 ? seed_index % n : 0;

    ChatRequest req;
    req.model_id = endpoint.model_id;
    req.temperature = endpoint.temperature;
    req.seed = seed;
    req.messages.push_back({"user", build_prompt(sample, condition, rec.rotation)});
    if (condition != Condition::no_image) {
        try {
            req.image = read_file_bytes(sample.image_path.string());
        } catch (const std::exception& e) {
            throw ValidationError(fmt::format("sample {}: {}", sample.id, e.what()));
        }
    }

    auto unrotate = [&](std::optional<char> c) -> std::optional<char> {
        if (!c) return c;
        return corpus::option_label((static_cast<std::size_t>(*c - 'A') + rec.rotation) % n);
    };

    try {
        for (int attempt = 0; attempt < 2; ++attempt) {
            if (attempt == 1) {
                req.messages.push_back({"assistant", rec.raw});
                req.messages.push_back({"user", reask_prompt(n)});
            }
            rec.raw = client.complete(req);
            ++rec.attempts;
            const auto parsed = parse_best_alt(rec.raw, n);
            if (parsed.best) {
                rec.best = unrotate(parsed.best);
                rec.alternative = unrotate(parsed.alternative);
                break;
            }
        }
    } catch (const ProviderError& e) {
        rec.error = e.what();
        rec.best.reset();
        rec.alternative.reset();
    }
    return rec;
}

Verdict verdict_from_runs(std::vector<InferenceRecord> runs, char gold) {
    Verdict v;
    if (!runs.empty()) {
        v.sample_id = runs.front().sample_id;
        v.model = runs.front().model;
        v.condition = runs.front().condition;
    }
    v.correct = !runs.empty();
    for (const auto& r : runs) {
        if (r.error) v.error = true;
        else if (!r.best) v.refusal = true;
        if (r.best != gold) v.correct = false;
    }
    v.runs = std::move(runs);
    return v;
}

Verdict circular_verdict(const corpus::Sample& sample, ChatClient& client, const ModelEndpoint& endpoint,
                         Condition condition, std::span<const std::uint64_t> seeds, const QueryOptions& options) {
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size() || seeds.empty())
        throw ValidationError("circular evaluation needs distinct seeds");
    std::vector<InferenceRecord> runs;
    for (std::size_t i = 0; i < seeds.size(); ++i)
        runs.push_back(query_best_alt(sample, client, endpoint, seeds[i], condition, options, i));
    return verdict_from_runs(std::move(runs), sample.answer);
}

std::vector<Verdict> run_condition(std::span<const corpus::Sample* const> samples, ChatClient& client,
                                   const ModelEndpoint& endpoint, Condition condition,
                                   std::span<const std::uint64_t> seeds, const QueryOptions& options,
                                   RecordLog* log) {
    endpoint.validate();
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size() || seeds.empty())
        throw ValidationError("circular evaluation needs distinct seeds");
    const auto per = seeds.size();
    std::vector<InferenceRecord> runs(samples.size() * per);
    parallel_for_bounded(runs.size(), endpoint.max_concurrency, [&](std::size_t job) {
        const auto& sample = *samples[job / per];
        const auto si = job % per;
        if (log) {
            // Only reuse complete answers; errored calls are retried.
            if (auto prior = log->find(sample.id, endpoint.name, seeds[si], condition); prior && !prior->error) {
                runs[job] = *prior;
                return;
            }
        }
        runs[job] = query_best_alt(sample, client, endpoint, seeds[si], condition, options, si);
        if (log) log->append(runs[job]);
    });
    std::vector<Verdict> out;
    out.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        std::vector<InferenceRecord> r(runs.begin() + static_cast<std::ptrdiff_t>(i * per),
                                       runs.begin() + static_cast<std::ptrdiff_t>((i + 1) * per));
        out.push_back(verdict_from_runs(std::move(r), samples[i]->answer));
    }
    return out;
}

std::vector<Verdict> verdicts_from_records(std::span<const InferenceRecord> records,
                                           std::span<const corpus::Sample* const> samples,
                                           const std::string& model, Condition condition,
                                           std::span<const std::uint64_t> seeds) {
    // Later records supersede earlier ones for the same key.
    std::map<std::pair<std::string, std::uint64_t>, const InferenceRecord*> latest;
    for (const auto& r : records)
        if (r.model == model && r.condition == condition) latest[{r.sample_id, r.seed}] = &r;
    std::vector<Verdict> out;
    for (const auto* s : samples) {
        std::vector<InferenceRecord> runs;
        for (auto seed : seeds) {
            auto it = latest.find({s->id, seed});
            if (it == latest.end())
                throw ValidationError(fmt::format("no {} record for sample {} model {} seed {}",
                                                  condition_name(condition), s->id, model, seed));
            runs.push_back(*it->second);
        }
        out.push_back(verdict_from_runs(std::move(runs), s->answer));
    }
    return out;
}

DifficultyBreakdown difficulty_breakdown(std::span<const std::vector<Verdict>> per_model,
                                         const AmbiguityOptions& options) {
    if (per_model.size() != 3)
        throw ValidationError(fmt::format("difficulty needs exactly 3 models, got {}", per_model.size()));
    const auto n = per_model[0].size();
    if (n == 0) throw ValidationError("difficulty needs at least one sample");
    for (const auto& m : per_model)
        if (m.size() != n) throw ValidationError("models have verdicts for different sample counts");

    DifficultyBreakdown out;
    std::size_t jun = 0, ext = 0, amb = 0, both = 0;
    for (std::size_t i = 0; i < n; ++i) {
        SampleDifficulty sd;
        sd.sample_id = per_model[0][i].sample_id;
        std::vector<std::set<char>> pairs;
        std::set<std::optional<char>> bests;
        bool pairs_ok = true;
        for (const auto& m : per_model) {
            const auto& v = m[i];
            if (v.sample_id != sd.sample_id)
                throw ValidationError(fmt::format("verdict order mismatch: {} vs {}", v.sample_id, sd.sample_id));
            if (v.runs.empty()) throw ValidationError(fmt::format("sample {} has no runs", sd.sample_id));
            if (v.correct) ++sd.models_correct;
            const auto& first = v.runs.front();
            bests.insert(first.best);
            if (first.best && first.alternative && *first.best != *first.alternative)
                pairs.push_back({*first.best, *first.alternative});
            else
                pairs_ok = false;
        }
        sd.junior = sd.models_correct < 2;
        sd.extreme = sd.models_correct == 0;
        sd.ambiguity = pairs_ok && pairs[0] == pairs[1] && pairs[1] == pairs[2] &&
                       (!options.require_non_unanimous || bests.size() > 1);
        jun += sd.junior;
        ext += sd.extreme;
        amb += sd.ambiguity;
        both += sd.junior && sd.ambiguity;
        out.samples.push_back(std::move(sd));
    }
    const double dn = static_cast<double>(n);
    out.p_junior = static_cast<double>(jun) / dn;
    out.p_extreme = static_cast<double>(ext) / dn;
    out.p_ambiguity = static_cast<double>(amb) / dn;
    out.p_overlap = static_cast<double>(both) / dn;
    out.d_dif = out.p_junior + out.p_ambiguity;
    return out;
}

double accuracy(std::span<const Verdict> verdicts) {
    if (verdicts.empty()) throw ValidationError("accuracy over zero verdicts");
    std::size_t ok = 0;
    for (const auto& v : verdicts) ok += v.correct;
    return static_cast<double>(ok) / static_cast<double>(verdicts.size());
}

RedundancyAccuracies redundancy_accuracies(std::span<const Verdict> no_image,
                                           std::optional<std::span<const Verdict>> no_text,
                                           const TokenWeights& weights) {
    if (!(weights.w_img > 0.0) || !(weights.w_txt > 0.0))
        throw ValidationError("token weights must be positive");
    RedundancyAccuracies out;
    out.acc_no_image = accuracy(no_image);
    if (no_text) out.acc_no_text = accuracy(*no_text);
    out.d_red = weighted_combine(out.acc_no_image, out.acc_no_text, weights);
    return out;
}

Json to_json(const DifficultyBreakdown& b) {
    return Json{{"d_dif", b.d_dif},         {"p_junior", b.p_junior},   {"p_extreme", b.p_extreme},
                {"p_ambiguity", b.p_ambiguity}, {"p_overlap", b.p_overlap}, {"samples", b.samples.size()}};
}

Json to_json(const RedundancyAccuracies& r) {
    return Json{{"d_red", r.d_red},
                {"acc_no_image", r.acc_no_image},
                {"acc_no_text", r.acc_no_text ? Json(*r.acc_no_text) : Json(nullptr)}};
}

} // namespace infodensity::modeleval
