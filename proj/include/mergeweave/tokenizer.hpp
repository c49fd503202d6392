#pragma once

// Lossless, language-agnostic lexical tokenizer used for token-level diff3.
//
// Every byte of the input lands in exactly one token, so detokenize(tokenize(s))
// reproduces s byte for byte. Whitespace and line terminators are tokens of
// their own; that is what lets a token-level merge reconstruct line structure.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mergeweave/text.hpp"

namespace mergeweave {

enum class TokenKind : std::uint8_t { Identifier, Number, Punct, StringLit, Whitespace, Newline, Other };

struct Token {
    std::string text;
    TokenKind kind = TokenKind::Other;

    friend bool operator==(const Token& x, const Token& y) { return x.text == y.text; }
};

using TokenStream = std::vector<Token>;

class EncodingError : public std::runtime_error {
public:
    EncodingError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Returns the offset of the first invalid UTF-8 sequence, or npos if valid.
/// Rejects overlong forms, surrogates and code points above U+10FFFF.
inline std::size_t find_invalid_utf8(std::string_view s) {
    std::size_t i = 0;
    const auto n = s.size();
    while (i < n) {
        auto c = static_cast<unsigned char>(s[i]);
        if (c < 0x80) {
            ++i;
            continue;
        }
        std::size_t len;
        std::uint32_t cp;
        if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return i;
        }
        if (i + len > n) return i;
        for (std::size_t k = 1; k < len; ++k) {
            auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) return i;
            cp = (cp << 6) | (cc & 0x3F);
        }
        static constexpr std::array<std::uint32_t, 5> kMin = {0, 0, 0x80, 0x800, 0x10000};
        if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return i;
        i += len;
    }
    return std::string_view::npos;
}

inline bool is_valid_utf8(std::string_view s) { return find_invalid_utf8(s) == std::string_view::npos; }

namespace detail {

inline bool ident_start(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' || c >= 0x80;
}
inline bool ident_char(unsigned char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
inline bool digit(unsigned char c) { return c >= '0' && c <= '9'; }
inline bool ascii_punct(unsigned char c) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
           (c >= 0x7B && c <= 0x7E);
}

// Longest first; maximal munch picks the first hit.
inline constexpr std::array<std::string_view, 37> kOperators = {
    ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "<=>", "&&=", "||=", "?\?=",
    "=>",   "==",  "!=",  "<=",  ">=",  "&&",  "||",  "++",  "--",  "+=",  "-=",  "*=",
    "/=",   "%=",  "&=",  "|=",  "^=",  "->",  "::",  "<<",  ">>",  "??",  "?.",  "**", "//"};

inline std::size_t scan_number(std::string_view s, std::size_t i) {
    std::size_t j = i + 1;
    while (j < s.size()) {
        auto c = static_cast<unsigned char>(s[j]);
        if (ident_char(c) && c < 0x80) {
            ++j;
        } else if (c == '.' && j + 1 < s.size() && digit(static_cast<unsigned char>(s[j + 1]))) {
            j += 2;
        } else if ((c == '+' || c == '-') && j + 1 < s.size() &&
                   digit(static_cast<unsigned char>(s[j + 1])) &&
                   (s[j - 1] == 'e' || s[j - 1] == 'E' || s[j - 1] == 'p' || s[j - 1] == 'P')) {
            j += 2;
        } else {
            break;
        }
    }
    return j;
}

// Returns the end of a quoted literal closed on the same line, or 0 if the
// quote does not balance before the line ends.
inline std::size_t scan_string(std::string_view s, std::size_t i) {
    const char quote = s[i];
    std::size_t j = i + 1;
    while (j < s.size()) {
        char c = s[j];
        if (is_line_break(c)) return 0;
        if (c == '\\') {
            if (j + 1 >= s.size() || s[j + 1] == '\n' || s[j + 1] == '\r') return 0;
            j += 2;
            continue;
        }
        if (c == quote) return j + 1;
        ++j;
    }
    return 0;
}

}  // namespace detail

/// Splits text into tokens. Throws EncodingError if text is not valid UTF-8.
inline TokenStream tokenize(std::string_view text) {
    if (auto bad = find_invalid_utf8(text); bad != std::string_view::npos)
        throw EncodingError("invalid UTF-8", bad);

    TokenStream out;
    std::size_t i = 0;
    const auto n = text.size();
    auto emit = [&](std::size_t end, TokenKind kind) {
        out.push_back(Token{std::string(text.substr(i, end - i)), kind});
        i = end;
    };
    while (i < n) {
        auto c = static_cast<unsigned char>(text[i]);
        if (c == '\n') {
            emit(i + 1, TokenKind::Newline);
        } else if (c == '\r') {
            emit((i + 1 < n && text[i + 1] == '\n') ? i + 2 : i + 1, TokenKind::Newline);
        } else if (c == ' ' || c == '\t' || c == '\f' || c == '\v') {
            std::size_t j = i + 1;
            while (j < n && (text[j] == ' ' || text[j] == '\t' || text[j] == '\f' || text[j] == '\v')) ++j;
            emit(j, TokenKind::Whitespace);
        } else if (detail::digit(c)) {
            emit(detail::scan_number(text, i), TokenKind::Number);
        } else if (detail::ident_start(c)) {
            std::size_t j = i + 1;
            while (j < n && detail::ident_char(static_cast<unsigned char>(text[j]))) ++j;
            emit(j, TokenKind::Identifier);
        } else if (c == '"' || c == '\'' || c == '`') {
            if (auto end = detail::scan_string(text, i)) {
                emit(end, TokenKind::StringLit);
            } else {
                emit(i + 1, TokenKind::Punct);
            }
        } else if (detail::ascii_punct(c)) {
            std::size_t len = 1;
            for (auto op : detail::kOperators) {
                if (text.substr(i, op.size()) == op) {
                    len = op.size();
                    break;
                }
            }
            emit(i + len, TokenKind::Punct);
        } else {
            std::size_t j = i + 1;
            while (j < n) {
                auto d = static_cast<unsigned char>(text[j]);
                if (d == '\n' || d == '\r' || d == ' ' || d == '\t' || d == '\f' || d == '\v' ||
                    detail::ident_char(d) || detail::ascii_punct(d))
                    break;
                ++j;
            }
            emit(j, TokenKind::Other);
        }
    }
    return out;
}

inline std::string detokenize(const TokenStream& stream) {
    std::size_t total = 0;
    for (const auto& t : stream) total += t.text.size();
    std::string out;
    out.reserve(total);
    for (const auto& t : stream) out += t.text;
    return out;
}

/// Whitespace and line terminators carry layout, not content.
inline bool is_layout(const Token& t) {
    return t.kind == TokenKind::Whitespace || t.kind == TokenKind::Newline;
}

}  // namespace mergeweave
