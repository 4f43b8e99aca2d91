#include <cctype>
#include <regex>

#include <fmt/format.h>

#include "infodensity/error.hpp"
#include "infodensity/modeleval/modeleval.hpp"

namespace infodensity::modeleval {

std::string_view condition_name(Condition c) {
    switch (c) {
    case Condition::full: return "full";
    case Condition::no_image: return "no_image";
    case Condition::no_text: return "no_text";
    }
    return "full";
}

Condition condition_from_name(std::string_view name) {
    if (name == "full") return Condition::full;
    if (name == "no_image") return Condition::no_image;
    if (name == "no_text") return Condition::no_text;
    throw ValidationError(fmt::format("unknown condition '{}'", name));
}

std::string build_prompt(const corpus::Sample& sample, Condition condition, std::size_t rotation) {
    const auto n = sample.options.size();
    std::string out = condition == Condition::no_text ? std::string(kNeutralInstruction) : sample.question;
    out += "\n";
    for (std::size_t p = 0; p < n; ++p)
        out += fmt::format("{}. {}\n", corpus::option_label(p), sample.options[(p + rotation) % n]);
    out += "Pick the best option and one possible alternative option. Reply in exactly this format:\n"
           "Best: <letter>\n"
           "Alternative: <letter>";
    return out;
}

std::string reask_prompt(std::size_t option_count) {
    return fmt::format("Your reply could not be read. Answer with letters between A and {} only, "
                       "in exactly two lines:\nBest: <letter>\nAlternative: <letter>",
                       corpus::option_label(option_count - 1));
}

namespace {

std::optional<char> find_letter(const std::string& reply, const std::regex& re, std::size_t option_count) {
    std::smatch m;
    if (!std::regex_search(reply, m, re)) return std::nullopt;
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(m[1].str()[0])));
    if (c < 'A' || static_cast<std::size_t>(c - 'A') >= option_count) return std::nullopt;
    return c;
}

} // namespace

ParsedAnswer parse_best_alt(std::string_view reply, std::size_t option_count) {
    static const std::regex best_re(R"(\bbest\b\s*(?:option|answer)?\s*[:=\-]\s*\(?\s*([a-z])(?![a-z]))",
                                    std::regex::icase | std::regex::ECMAScript);
    static const std::regex alt_re(
        R"(\balt(?:ernative)?\b\s*(?:option|answer)?\s*[:=\-]\s*\(?\s*([a-z])(?![a-z]))",
        std::regex::icase | std::regex::ECMAScript);
    const std::string text(reply);
    ParsedAnswer out;
    out.best = find_letter(text, best_re, option_count);
    out.alternative = find_letter(text, alt_re, option_count);
    if (out.best && out.alternative == out.best) out.alternative.reset();
    return out;
}

} // namespace infodensity::modeleval
