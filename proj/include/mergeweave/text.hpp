#pragma once

// Small string helpers shared by the merge, label and evaluation code.

#include <string>
#include <string_view>
#include <vector>

namespace mergeweave {

inline bool is_horizontal_space(char c) {
    return c == ' ' || c == '\t' || c == '\f' || c == '\v';
}

inline bool is_line_break(char c) { return c == '\n' || c == '\r'; }

/// Splits text into physical lines, each keeping its terminator ("\n", "\r\n"
/// or "\r"). The last line may lack a terminator. Concatenation gives back the
/// input.
inline std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\n') {
            lines.push_back(text.substr(start, i + 1 - start));
            start = i + 1;
        } else if (text[i] == '\r') {
            std::size_t end = (i + 1 < text.size() && text[i + 1] == '\n') ? i + 2 : i + 1;
            lines.push_back(text.substr(start, end - start));
            start = end;
            i = end - 1;
        }
    }
    if (start < text.size()) lines.push_back(text.substr(start));
    return lines;
}

inline std::vector<std::string> split_lines_copy(std::string_view text) {
    std::vector<std::string> out;
    for (auto line : split_lines(text)) out.emplace_back(line);
    return out;
}

/// Trims horizontal whitespace and line terminators from both ends.
inline std::string_view trim(std::string_view s) {
    auto blank = [](char c) { return is_horizontal_space(c) || is_line_break(c); };
    while (!s.empty() && blank(s.front())) s.remove_prefix(1);
    while (!s.empty() && blank(s.back())) s.remove_suffix(1);
    return s;
}

/// Whitespace-insensitive canonical form used for every "modulo whitespace"
/// comparison: each line is trimmed, interior runs of horizontal whitespace
/// become one space, blank lines are dropped, lines are joined with '\n'.
inline std::string normalize_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (auto raw : split_lines(text)) {
        auto line = trim(raw);
        if (line.empty()) continue;
        if (!out.empty()) out.push_back('\n');
        bool in_space = false;
        for (char c : line) {
            if (is_horizontal_space(c)) {
                in_space = true;
                continue;
            }
            if (in_space) out.push_back(' ');
            in_space = false;
            out.push_back(c);
        }
    }
    return out;
}

inline bool equal_modulo_whitespace(std::string_view x, std::string_view y) {
    return normalize_whitespace(x) == normalize_whitespace(y);
}

inline bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

}  // namespace mergeweave
