#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "infodensity/embed/embedder.hpp"
#include "infodensity/image/raster.hpp"

namespace infodensity::text {

// ---------------------------------------------------------------------------
// Tokens

/// Default segmentation: runs of letters/digits form one token (an
/// apostrophe between letters and '.' or ',' between digits stay inside the
/// token); every punctuation or symbol character is its own token;
/// whitespace separates. Non-ASCII code points outside the general
/// punctuation blocks count as letters.
std::vector<std::string> tokenize(std::string_view text);

class Tokenizer {
public:
    virtual ~Tokenizer() = default;
    virtual std::string id() const = 0;
    virtual std::size_t count(std::string_view text) const = 0;
};

class DefaultTokenizer final : public Tokenizer {
public:
    std::string id() const override { return "default-words/v1"; }
    std::size_t count(std::string_view text) const override { return tokenize(text).size(); }
};

std::size_t token_count(std::string_view text);

// ---------------------------------------------------------------------------
// Question types

enum class QuestionType { what, which, why, who, when, where, how, particle, modal, others };

inline constexpr std::size_t kQuestionTypeCount = 10;
inline constexpr std::array<const char*, kQuestionTypeCount> kQuestionTypeNames = {
    "What", "Which", "Why", "Who", "When", "Where", "How", "Particle", "Modal", "Others"};

/// Classifies by the first alphabetic word only, case-insensitively.
QuestionType classify_question(std::string_view question);

/// True when the first alphabetic word is not plain ASCII (classified Others).
bool leads_with_non_english(std::string_view question);

/// Normalized histogram over QuestionType in kQuestionTypeNames order.
std::array<double, kQuestionTypeCount> qtype_ratios(std::span<const std::string> questions);

// ---------------------------------------------------------------------------
// Parsing

struct ParseResult {
    std::size_t depth = 1;
    std::string root;  ///< head noun / subject of the question
};

class ParseProvider {
public:
    virtual ~ParseProvider() = default;
    virtual std::string id() const = 0;
    virtual ParseResult parse(std::string_view question) const = 0;
};

/// Built-in rule-based parser.
///
/// depth = 1 + clause markers + joining commas, where a clause marker is any
/// of that/which/who/whom/whose/when/while/because/if/although after the
/// first word, and a joining comma has a finite verb (closed auxiliary list)
/// on both sides within the neighbouring comma-delimited segments.
///
/// root = first word that is not a question word, auxiliary, determiner,
/// pronoun or quantity/kind word.
class HeuristicParser final : public ParseProvider {
public:
    std::string id() const override { return "heuristic-clauses/v1"; }
    ParseResult parse(std::string_view question) const override;
};

struct GrammarDepth {
    std::size_t depth = 1;
    bool fallback = false;  ///< provider failed, heuristic used
};

GrammarDepth grammar_depth(std::string_view question, const ParseProvider& parser);

// ---------------------------------------------------------------------------
// Embedding-based features

/// Mean over unordered pairs of (cos + 1) / 2. Needs >= 2 vectors.
double option_closeness(std::span<const embed::EmbeddingVector> option_vectors);
double option_closeness(std::span<const std::string> options, embed::Embedder& embedder);

/// Shannon entropy of a similarity map normalized to a distribution
/// (negatives clamped to 0), divided by log(cells). A map with no positive
/// mass is treated as uniform.
double similarity_map_entropy(std::span<const double> similarities);

inline constexpr int kDefaultRegionGrid = 7;

/// Embeds the question's root word and a grid x grid tiling of the image;
/// returns the normalized entropy of root-to-patch cosine similarities.
/// `image_key` names the image in a precomputed store (patches are keyed
/// "<image_key>#<row>,<col>"). Returns nullopt when a provider fails.
std::optional<double> region_entropy(std::string_view question, const image::Raster& raster,
                                     const std::string& image_key, embed::Embedder& embedder,
                                     const ParseProvider& parser, int grid = kDefaultRegionGrid);

/// Patch payloads region_entropy sends, exposed for building stores.
std::vector<embed::Payload> region_patches(const image::Raster& raster, const std::string& image_key,
                                           int grid = kDefaultRegionGrid);

// ---------------------------------------------------------------------------

struct TextFeatures {
    std::size_t token_count = 0;
    QuestionType qtype = QuestionType::others;
    bool non_english = false;
    std::size_t grammar_depth = 1;
    bool grammar_fallback = false;
    std::optional<double> option_closeness;
    std::optional<double> region_entropy;
};

} // namespace infodensity::text
