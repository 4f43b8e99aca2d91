#include "infodensity/text/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include <fmt/format.h>

#include "infodensity/error.hpp"
#include "infodensity/image/raster.hpp"

namespace infodensity::text {

namespace {

bool is_ascii_word(const std::string& tok) {
    return !tok.empty() && std::all_of(tok.begin(), tok.end(), [](unsigned char c) {
        return c < 0x80 && (std::isalnum(c) || c == '\'' || c == '.' || c == ',');
    });
}

bool has_letter(const std::string& tok) {
    return std::any_of(tok.begin(), tok.end(), [](unsigned char c) { return c >= 0x80 || std::isalpha(c); });
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Word tokens only (punctuation dropped), lowercased, with comma positions kept.
struct Word {
    std::string text;
    bool comma_before = false;
};

std::vector<Word> words_of(std::string_view question) {
    std::vector<Word> out;
    bool pending_comma = false;
    for (auto& tok : tokenize(question)) {
        if (tok == ",") {
            pending_comma = true;
            continue;
        }
        if (!has_letter(tok) && !std::isdigit(static_cast<unsigned char>(tok[0]))) continue;
        out.push_back({lower(std::move(tok)), pending_comma});
        pending_comma = false;
    }
    return out;
}

const std::unordered_set<std::string>& clause_markers() {
    static const std::unordered_set<std::string> s{"that", "which", "who",     "whom",  "whose",
                                                   "when", "while", "because", "if", "although"};
    return s;
}

const std::unordered_set<std::string>& finite_verbs() {
    static const std::unordered_set<std::string> s{
        "is",   "are",   "was",  "were",  "am",    "do",    "does", "did",   "has",
        "have", "had",   "can",  "could", "will",  "would", "shall", "should", "may",
        "might", "must", "isn't", "aren't", "doesn't", "don't", "didn't", "can't", "won't"};
    return s;
}

const std::unordered_set<std::string>& non_root_words() {
    static const std::unordered_set<std::string> s{
        // question words
        "what", "which", "why", "who", "whom", "whose", "when", "where", "how",
        // auxiliaries / copulas
        "is", "are", "was", "were", "am", "be", "been", "being", "do", "does", "did", "has", "have",
        "had", "can", "could", "will", "would", "shall", "should", "may", "might", "must",
        // determiners, pronouns, quantity and kind words
        "the", "a", "an", "this", "that", "these", "those", "there", "here", "it", "its", "they",
        "their", "them", "he", "she", "his", "her", "you", "your", "we", "our", "i", "my", "me",
        "any", "some", "many", "much", "most", "more", "each", "every", "all", "both", "one",
        "kind", "kinds", "type", "types", "sort", "number", "main", "primary", "likely", "not",
        "of", "in", "on", "at", "to", "for", "with", "by", "from", "about", "as", "into", "shown",
        "depicted", "visible", "seen", "image", "picture", "photo", "figure"};
    return s;
}

} // namespace

QuestionType classify_question(std::string_view question) {
    for (const auto& tok : tokenize(question)) {
        if (!has_letter(tok)) continue;
        if (!is_ascii_word(tok)) return QuestionType::others;
        const auto w = lower(tok);
        if (w == "what") return QuestionType::what;
        if (w == "which") return QuestionType::which;
        if (w == "why") return QuestionType::why;
        if (w == "who") return QuestionType::who;
        if (w == "when") return QuestionType::when;
        if (w == "where") return QuestionType::where;
        if (w == "how") return QuestionType::how;
        if (w == "do" || w == "does" || w == "is" || w == "are") return QuestionType::particle;
        if (w == "can" || w == "could" || w == "should") return QuestionType::modal;
        return QuestionType::others;
    }
    return QuestionType::others;
}

bool leads_with_non_english(std::string_view question) {
    for (const auto& tok : tokenize(question)) {
        if (!has_letter(tok)) continue;
        return !is_ascii_word(tok);
    }
    return false;
}

std::array<double, kQuestionTypeCount> qtype_ratios(std::span<const std::string> questions) {
    if (questions.empty()) throw ValidationError("qtype_ratios needs at least one question");
    std::array<std::size_t, kQuestionTypeCount> counts{};
    for (const auto& q : questions) ++counts[static_cast<std::size_t>(classify_question(q))];
    std::array<double, kQuestionTypeCount> out{};
    for (std::size_t i = 0; i < kQuestionTypeCount; ++i)
        out[i] = static_cast<double>(counts[i]) / static_cast<double>(questions.size());
    return out;
}

ParseResult HeuristicParser::parse(std::string_view question) const {
    const auto words = words_of(question);
    ParseResult out;
    for (std::size_t i = 1; i < words.size(); ++i)
        if (clause_markers().count(words[i].text)) ++out.depth;

    // Comma-delimited segments; a comma counts when both neighbours hold a finite verb.
    std::vector<bool> segment_has_verb{false};
    for (const auto& w : words) {
        if (w.comma_before) segment_has_verb.push_back(false);
        if (finite_verbs().count(w.text)) segment_has_verb.back() = true;
    }
    for (std::size_t s = 1; s < segment_has_verb.size(); ++s)
        if (segment_has_verb[s - 1] && segment_has_verb[s]) ++out.depth;

    for (const auto& w : words) {
        if (!non_root_words().count(w.text) && has_letter(w.text)) {
            out.root = w.text;
            break;
        }
    }
    if (out.root.empty() && !words.empty()) out.root = words.back().text;
    return out;
}

GrammarDepth grammar_depth(std::string_view question, const ParseProvider& parser) {
    try {
        const auto r = parser.parse(question);
        return {std::max<std::size_t>(1, r.depth), false};
    } catch (const std::exception&) {
        return {HeuristicParser{}.parse(question).depth, true};
    }
}

double option_closeness(std::span<const embed::EmbeddingVector> option_vectors) {
    const auto n = option_vectors.size();
    if (n < 2) throw ValidationError("option_closeness needs at least 2 options");
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            sum += (embed::cosine(option_vectors[i], option_vectors[j]) + 1.0) / 2.0;
            ++pairs;
        }
    return std::clamp(sum / static_cast<double>(pairs), 0.0, 1.0);
}

double option_closeness(std::span<const std::string> options, embed::Embedder& embedder) {
    if (options.size() < 2) throw ValidationError("option_closeness needs at least 2 options");
    const auto vecs = embedder.embed_texts(options);
    return option_closeness(vecs);
}

double similarity_map_entropy(std::span<const double> similarities) {
    const auto n = similarities.size();
    if (n == 0) throw std::invalid_argument("similarity map is empty");
    if (n == 1) return 0.0;
    double mass = 0.0;
    for (double s : similarities) {
        if (!std::isfinite(s)) throw std::invalid_argument("similarity map has non-finite value");
        mass += std::max(0.0, s);
    }
    if (mass == 0.0) return 1.0;
    double h = 0.0;
    for (double s : similarities) {
        const double p = std::max(0.0, s) / mass;
        if (p > 0.0) h -= p * std::log(p);
    }
    return std::clamp(h / std::log(static_cast<double>(n)), 0.0, 1.0);
}

std::vector<embed::Payload> region_patches(const image::Raster& raster, const std::string& image_key,
                                           int grid) {
    if (grid < 1) throw std::invalid_argument("region grid must be >= 1");
    if (raster.width < grid || raster.height < grid)
        throw ValidationError(fmt::format("image {}x{} too small for a {}x{} grid", raster.width,
                                          raster.height, grid, grid));
    std::vector<embed::Payload> out;
    out.reserve(static_cast<std::size_t>(grid) * grid);
    for (int r = 0; r < grid; ++r) {
        const int y0 = r * raster.height / grid, y1 = (r + 1) * raster.height / grid;
        for (int c = 0; c < grid; ++c) {
            const int x0 = c * raster.width / grid, x1 = (c + 1) * raster.width / grid;
            const auto patch = image::crop(raster, x0, y0, x1 - x0, y1 - y0);
            out.push_back({fmt::format("{}#{},{}", image_key, r, c), image::encode_png(patch)});
        }
    }
    return out;
}

std::optional<double> region_entropy(std::string_view question, const image::Raster& raster,
                                     const std::string& image_key, embed::Embedder& embedder,
                                     const ParseProvider& parser, int grid) {
    try {
        std::string root;
        try {
            root = parser.parse(question).root;
        } catch (const std::exception&) {
            root = HeuristicParser{}.parse(question).root;
        }
        if (root.empty()) return std::nullopt;
        const std::vector<std::string> texts{root};
        const auto root_vec = embedder.embed_texts(texts);
        const auto patches = region_patches(raster, image_key, grid);
        const auto patch_vecs = embedder.embed(embed::Modality::image, patches);
        std::vector<double> sims;
        sims.reserve(patch_vecs.size());
        for (const auto& v : patch_vecs) sims.push_back(embed::cosine(root_vec[0], v));
        return similarity_map_entropy(sims);
    } catch (const ProviderError&) {
        return std::nullopt;
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

} // namespace infodensity::text
