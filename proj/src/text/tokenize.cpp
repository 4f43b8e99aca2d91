#include <cctype>
#include <cstdint>

#include "infodensity/text/features.hpp"

namespace infodensity::text {

namespace {

enum class CharClass { space, letter, digit, punct };

struct CodePoint {
    std::uint32_t value;
    std::size_t length;
};

CodePoint decode_utf8(std::string_view s, std::size_t i) {
    const auto c = static_cast<unsigned char>(s[i]);
    auto cont = [&](std::size_t k) -> std::uint32_t {
        return i + k < s.size() ? static_cast<unsigned char>(s[i + k]) & 0x3Fu : 0u;
    };
    if (c < 0x80) return {c, 1};
    if ((c >> 5) == 0x6 && i + 1 < s.size()) return {((c & 0x1Fu) << 6) | cont(1), 2};
    if ((c >> 4) == 0xE && i + 2 < s.size()) return {((c & 0x0Fu) << 12) | (cont(1) << 6) | cont(2), 3};
    if ((c >> 3) == 0x1E && i + 3 < s.size())
        return {((c & 0x07u) << 18) | (cont(1) << 12) | (cont(2) << 6) | cont(3), 4};
    return {0xFFFD, 1};  // invalid byte: treat as a symbol of length 1
}

CharClass classify(std::uint32_t cp) {
    if (cp < 0x80) {
        const auto c = static_cast<unsigned char>(cp);
        if (std::isspace(c)) return CharClass::space;
        if (std::isalpha(c)) return CharClass::letter;
        if (std::isdigit(c)) return CharClass::digit;
        return CharClass::punct;
    }
    if (cp == 0x00A0 || (cp >= 0x2000 && cp <= 0x200B) || cp == 0x3000 || cp == 0x202F)
        return CharClass::space;
    if ((cp >= 0x00A1 && cp <= 0x00BF) || cp == 0x00D7 || cp == 0x00F7 ||
        (cp >= 0x2010 && cp <= 0x205E) || (cp >= 0x3001 && cp <= 0x3003) ||
        (cp >= 0xFF01 && cp <= 0xFF0F) || cp == 0xFFFD)
        return CharClass::punct;
    return CharClass::letter;
}

bool is_apostrophe(std::uint32_t cp) { return cp == '\'' || cp == 0x2019; }

} // namespace

std::vector<std::string> tokenize(std::string_view text) {
    struct Unit {
        CodePoint cp;
        std::size_t offset;
        CharClass cls;
    };
    std::vector<Unit> units;
    for (std::size_t i = 0; i < text.size();) {
        const auto cp = decode_utf8(text, i);
        units.push_back({cp, i, classify(cp.value)});
        i += cp.length;
    }
    auto is_word = [](CharClass c) { return c == CharClass::letter || c == CharClass::digit; };

    std::vector<std::string> tokens;
    for (std::size_t i = 0; i < units.size();) {
        const auto& u = units[i];
        if (u.cls == CharClass::space) {
            ++i;
            continue;
        }
        if (u.cls == CharClass::punct) {
            tokens.emplace_back(text.substr(u.offset, u.cp.length));
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < units.size()) {
            if (is_word(units[j].cls)) {
                ++j;
                continue;
            }
            // Joiners stay inside a word when flanked appropriately.
            if (j + 1 < units.size()) {
                const auto prev = units[j - 1].cls, next = units[j + 1].cls;
                const auto cp = units[j].cp.value;
                if (is_apostrophe(cp) && prev == CharClass::letter && next == CharClass::letter) {
                    j += 2;
                    continue;
                }
                if ((cp == '.' || cp == ',') && prev == CharClass::digit && next == CharClass::digit) {
                    j += 2;
                    continue;
                }
            }
            break;
        }
        const auto begin = u.offset;
        const auto end = units[j - 1].offset + units[j - 1].cp.length;
        tokens.emplace_back(text.substr(begin, end - begin));
        i = j;
    }
    return tokens;
}

std::size_t token_count(std::string_view text) { return tokenize(text).size(); }

} // namespace infodensity::text
