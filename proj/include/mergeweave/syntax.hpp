#pragma once

// Cheap syntax validation for candidate resolutions.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <spdlog/spdlog.h>

#include "mergeweave/process.hpp"

namespace mergeweave {

/// Language id from a file extension; "unknown" when not recognised.
inline std::string language_from_path(std::string_view path) {
    auto dot = path.rfind('.');
    auto slash = path.rfind('/');
    if (dot == std::string_view::npos || (slash != std::string_view::npos && dot < slash)) return "unknown";
    auto ext = path.substr(dot + 1);
    if (ext == "js" || ext == "jsx" || ext == "mjs") return "javascript";
    if (ext == "ts" || ext == "tsx") return "typescript";
    if (ext == "java") return "java";
    if (ext == "cs") return "csharp";
    if (ext == "py") return "python";
    if (ext == "c" || ext == "h" || ext == "cc" || ext == "cpp" || ext == "cxx" || ext == "hpp" || ext == "hh")
        return "cpp";
    if (ext == "go") return "go";
    if (ext == "rs") return "rust";
    if (ext == "rb") return "ruby";
    if (ext == "sh" || ext == "bash") return "shell";
    if (ext == "scala") return "scala";
    if (ext == "kt") return "kotlin";
    return "unknown";
}

struct LexicalRules {
    bool slash_comments = true;   // // and /* */
    bool hash_comments = false;   // # to end of line
    bool single_quotes = true;
    bool backtick_strings = false;  // may span lines
    bool triple_quotes = false;     // python-style, may span lines
};

inline LexicalRules rules_for(std::string_view language) {
    LexicalRules r;
    if (language == "python") {
        r.slash_comments = false;
        r.hash_comments = true;
        r.triple_quotes = true;
    } else if (language == "ruby" || language == "shell") {
        r.slash_comments = false;
        r.hash_comments = true;
    } else if (language == "javascript" || language == "typescript") {
        r.backtick_strings = true;
    } else if (language == "rust" || language == "scala") {
        r.single_quotes = false;  // lifetimes and symbols
    } else if (language == "go") {
        r.backtick_strings = true;
    }
    return r;
}

/// Outcome of the bracket/quote scan. `open` lists unmatched openers in order
/// and `stray` counts closers without an opener.
struct BracketScan {
    bool ok = true;
    std::string open;
    std::size_t stray = 0;
    bool unterminated = false;  // string or block comment still open at EOF, or a string hit a newline
};

inline BracketScan scan_brackets(std::string_view text, std::string_view language) {
    const auto rules = rules_for(language);
    BracketScan scan;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto at = [&](std::size_t k) { return k < n ? text[k] : '\0'; };
    auto closer_of = [](char c) { return c == '(' ? ')' : c == '[' ? ']' : '}'; };
    while (i < n) {
        char c = text[i];
        if (rules.slash_comments && c == '/' && at(i + 1) == '/') {
            while (i < n && text[i] != '\n') ++i;
            continue;
        }
        if (rules.slash_comments && c == '/' && at(i + 1) == '*') {
            auto end = text.find("*/", i + 2);
            if (end == std::string_view::npos) {
                scan.unterminated = true;
                break;
            }
            i = end + 2;
            continue;
        }
        if (rules.hash_comments && c == '#') {
            while (i < n && text[i] != '\n') ++i;
            continue;
        }
        if (rules.triple_quotes && (c == '"' || c == '\'') && at(i + 1) == c && at(i + 2) == c) {
            const std::string delim(3, c);
            auto end = text.find(delim, i + 3);
            if (end == std::string_view::npos) {
                scan.unterminated = true;
                break;
            }
            i = end + 3;
            continue;
        }
        if (c == '"' || (c == '\'' && rules.single_quotes) || (c == '`' && rules.backtick_strings)) {
            const bool multiline = c == '`';
            std::size_t k = i + 1;
            bool closed = false;
            while (k < n) {
                if (text[k] == '\\') {
                    k += 2;
                    continue;
                }
                if (text[k] == c) {
                    closed = true;
                    break;
                }
                if (text[k] == '\n' && !multiline) break;
                ++k;
            }
            if (!closed) {
                scan.unterminated = true;
                i = k;
                continue;
            }
            i = k + 1;
            continue;
        }
        if (c == '(' || c == '[' || c == '{') {
            scan.open.push_back(c);
        } else if (c == ')' || c == ']' || c == '}') {
            if (!scan.open.empty() && closer_of(scan.open.back()) == c)
                scan.open.pop_back();
            else if (scan.open.empty())
                ++scan.stray;
            else {
                ++scan.stray;
                scan.open.pop_back();
            }
        }
        ++i;
    }
    scan.ok = scan.open.empty() && scan.stray == 0 && !scan.unterminated;
    return scan;
}

/// Balanced (), [], {} and paired quotes outside comments.
inline bool check_syntax_default(std::string_view text, std::string_view language = "unknown") {
    return scan_brackets(text, language).ok;
}

/// Default checker, or an external parser command whose exit status decides.
/// The command gets the text on stdin and the language as its last argument.
class SyntaxChecker {
public:
    SyntaxChecker() = default;
    explicit SyntaxChecker(std::vector<std::string> command) : command_(std::move(command)) {}

    bool check(std::string_view text, std::string_view language = "unknown") const {
        if (command_.empty()) return check_syntax_default(text, language);
        auto argv = command_;
        argv.emplace_back(language);
        try {
            auto r = run_process(argv, text);
            if (r.term_signal != 0 || r.exit_code == 126 || r.exit_code == 127) {
                spdlog::warn("syntax command {} unavailable (exit {}, signal {}); using default checker",
                             command_.front(), r.exit_code, r.term_signal);
                return check_syntax_default(text, language);
            }
            return r.exit_code == 0;
        } catch (const std::exception& e) {
            spdlog::warn("syntax command {} failed to start: {}; using default checker", command_.front(), e.what());
            return check_syntax_default(text, language);
        }
    }

    bool external() const { return !command_.empty(); }

private:
    std::vector<std::string> command_;
};

inline bool check_syntax(std::string_view text, std::string_view language = "unknown") {
    return check_syntax_default(text, language);
}

}  // namespace mergeweave
