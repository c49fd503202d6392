#pragma once

// The nine primitive merge-resolution patterns.
//
// A label turns a conflict (a, b, o) into a candidate resolution; extraction
// goes the other way and finds the lowest-numbered label that reproduces an
// observed resolution modulo whitespace.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "mergeweave/conflict.hpp"
#include "mergeweave/text.hpp"
#include "mergeweave/tokenizer.hpp"

namespace mergeweave {

enum class ResolutionLabel : std::uint8_t {
    TakeA = 1,
    TakeB = 2,
    TakeBase = 3,
    ConcatAB = 4,
    ConcatBA = 5,
    TakeAExclBase = 6,
    TakeBExclBase = 7,
    ConcatABExclBase = 8,
    ConcatBAExclBase = 9,
};

inline constexpr std::size_t kNumLabels = 9;

inline constexpr std::array<ResolutionLabel, kNumLabels> kAllLabels = {
    ResolutionLabel::TakeA,         ResolutionLabel::TakeB,         ResolutionLabel::TakeBase,
    ResolutionLabel::ConcatAB,      ResolutionLabel::ConcatBA,      ResolutionLabel::TakeAExclBase,
    ResolutionLabel::TakeBExclBase, ResolutionLabel::ConcatABExclBase, ResolutionLabel::ConcatBAExclBase};

/// Extraction result; nullopt means Unrepresentable.
using LabelOutcome = std::optional<ResolutionLabel>;

inline int ordinal(ResolutionLabel l) { return static_cast<int>(l); }
inline int ordinal(LabelOutcome l) { return l ? ordinal(*l) : 0; }

/// Class index on the wire and in probability vectors: ordinal - 1.
inline std::size_t class_index(ResolutionLabel l) { return static_cast<std::size_t>(ordinal(l) - 1); }

inline ResolutionLabel label_from_ordinal(int v) {
    if (v < 1 || v > static_cast<int>(kNumLabels)) throw std::out_of_range("label ordinal " + std::to_string(v));
    return static_cast<ResolutionLabel>(v);
}

inline LabelOutcome outcome_from_ordinal(int v) {
    if (v == 0) return std::nullopt;
    return label_from_ordinal(v);
}

inline std::string_view label_name(LabelOutcome l) {
    if (!l) return "Unrepresentable";
    switch (*l) {
        case ResolutionLabel::TakeA: return "TakeA";
        case ResolutionLabel::TakeB: return "TakeB";
        case ResolutionLabel::TakeBase: return "TakeBase";
        case ResolutionLabel::ConcatAB: return "ConcatAB";
        case ResolutionLabel::ConcatBA: return "ConcatBA";
        case ResolutionLabel::TakeAExclBase: return "TakeAExclBase";
        case ResolutionLabel::TakeBExclBase: return "TakeBExclBase";
        case ResolutionLabel::ConcatABExclBase: return "ConcatABExclBase";
        case ResolutionLabel::ConcatBAExclBase: return "ConcatBAExclBase";
    }
    return "?";
}

/// Drops every line of `side` whose trimmed text equals the trimmed text of
/// some line of `base`.
inline TokenStream exclude_base_lines(const TokenStream& side, const TokenStream& base) {
    const auto base_text = detokenize(base);
    std::unordered_set<std::string_view> base_lines;
    for (auto line : split_lines(base_text)) base_lines.insert(trim(line));
    if (base_lines.empty()) return side;

    const auto side_text = detokenize(side);
    std::string kept;
    bool dropped = false;
    for (auto line : split_lines(side_text)) {
        if (base_lines.contains(trim(line))) {
            dropped = true;
            continue;
        }
        kept += line;
    }
    return dropped ? tokenize(kept) : side;
}

inline TokenStream apply_label(ResolutionLabel label, const TokenStream& a, const TokenStream& b,
                               const TokenStream& o) {
    auto concat = [](const TokenStream& x, const TokenStream& y) {
        TokenStream out = x;
        out.insert(out.end(), y.begin(), y.end());
        return out;
    };
    switch (label) {
        case ResolutionLabel::TakeA: return a;
        case ResolutionLabel::TakeB: return b;
        case ResolutionLabel::TakeBase: return o;
        case ResolutionLabel::ConcatAB: return concat(a, b);
        case ResolutionLabel::ConcatBA: return concat(b, a);
        case ResolutionLabel::TakeAExclBase: return exclude_base_lines(a, o);
        case ResolutionLabel::TakeBExclBase: return exclude_base_lines(b, o);
        case ResolutionLabel::ConcatABExclBase: return concat(exclude_base_lines(a, o), exclude_base_lines(b, o));
        case ResolutionLabel::ConcatBAExclBase: return concat(exclude_base_lines(b, o), exclude_base_lines(a, o));
    }
    return {};
}

/// Label comparison rule: equality of detokenized text modulo whitespace.
inline bool same_resolution(const TokenStream& x, const TokenStream& y) {
    return normalize_whitespace(detokenize(x)) == normalize_whitespace(detokenize(y));
}

/// Lowest label whose application matches `resolution`, or Unrepresentable.
inline LabelOutcome extract_label(const TokenStream& a, const TokenStream& b, const TokenStream& o,
                                  const TokenStream& resolution) {
    const auto target = normalize_whitespace(detokenize(resolution));
    for (auto label : kAllLabels)
        if (normalize_whitespace(detokenize(apply_label(label, a, b, o))) == target) return label;
    return std::nullopt;
}

inline LabelOutcome extract_label(const TokenConflict& tc) {
    if (!tc.resolution) throw std::invalid_argument("extract_label: conflict has no resolution");
    return extract_label(tc.a, tc.b, tc.o, *tc.resolution);
}

/// Label of a whole line-level region (line-level histogram).
inline LabelOutcome extract_line_label(const LineConflict& lc) {
    if (!lc.resolution) throw std::invalid_argument("extract_line_label: conflict has no resolution");
    return extract_label(tokenize(lc.a), tokenize(lc.b), tokenize(lc.o), tokenize(*lc.resolution));
}

struct LabelHistogram {
    std::array<std::size_t, kNumLabels + 1> counts{};  // [0] = Unrepresentable
    std::size_t total = 0;

    void add(LabelOutcome l) {
        ++counts[static_cast<std::size_t>(ordinal(l))];
        ++total;
    }
    double fraction(int ordinal_value) const {
        return total == 0 ? 0.0
                          : static_cast<double>(counts[static_cast<std::size_t>(ordinal_value)]) /
                                static_cast<double>(total);
    }
    /// Share of conflicts some label explains.
    double coverage() const { return total == 0 ? 0.0 : 1.0 - fraction(0); }
};

inline LabelHistogram label_distribution(std::span<const LabelOutcome> labels) {
    LabelHistogram h;
    for (auto l : labels) h.add(l);
    return h;
}

// ---------------------------------------------------------------------------
// Splitting a line-level resolution into token-level resolutions r_j.

namespace detail {

struct SigView {
    std::vector<std::size_t> full_index;  // position in the full stream of each significant token
    std::vector<std::string_view> text;
};

inline SigView significant(const TokenStream& s) {
    SigView v;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (is_layout(s[i])) continue;
        v.full_index.push_back(i);
        v.text.push_back(s[i].text);
    }
    return v;
}

inline bool matches_at(const SigView& hay, std::size_t pos, const SigView& needle) {
    if (pos + needle.text.size() > hay.text.size()) return false;
    for (std::size_t k = 0; k < needle.text.size(); ++k)
        if (hay.text[pos + k] != needle.text[k]) return false;
    return true;
}

}  // namespace detail

/// Candidate positions considered per separator when aligning a resolution.
inline constexpr std::size_t kMaxAnchorCandidates = 64;

/// Cuts the developer resolution of a line region into one r_j per token
/// conflict. The clean token runs between conflicts act as anchors, matched
/// on non-layout tokens; when a separator matches in several places the
/// placement that makes the most r_j representable by a label wins (earliest
/// on ties). Returns nullopt when the anchors cannot be found in order.
inline std::optional<std::vector<TokenStream>> split_resolution(const TokenMergeOutcome& outcome,
                                                                const TokenStream& resolution) {
    const std::size_t n = outcome.conflicts.size();
    if (n == 0) return std::vector<TokenStream>{};

    // separators s_0 .. s_n around the n conflicts
    std::vector<TokenStream> seps(n + 1);
    {
        std::size_t k = 0;
        for (const auto& c : outcome.chunks) {
            if (c.kind == ChunkKind::Conflict) {
                ++k;
                continue;
            }
            seps[k].insert(seps[k].end(), c.merged.begin(), c.merged.end());
        }
    }
    const auto hay = detail::significant(resolution);
    std::vector<detail::SigView> pat;
    for (const auto& s : seps) pat.push_back(detail::significant(s));

    const std::size_t total = hay.text.size();
    if (pat.front().text.size() + pat.back().text.size() > total) return std::nullopt;
    if (!detail::matches_at(hay, 0, pat.front())) return std::nullopt;
    const std::size_t last_start = total - pat.back().text.size();
    if (!detail::matches_at(hay, last_start, pat.back())) return std::nullopt;

    // Boundaries in significant-token coordinates. For each separator k the
    // candidates are start positions; its end is start + |pattern|.
    std::vector<std::vector<std::size_t>> starts(n + 1);
    starts[0] = {0};
    starts[n] = {last_start};
    for (std::size_t k = 1; k < n; ++k) {
        for (std::size_t p = pat[0].text.size(); p + pat[k].text.size() <= last_start; ++p) {
            if (detail::matches_at(hay, p, pat[k])) starts[k].push_back(p);
            if (starts[k].size() >= kMaxAnchorCandidates) break;
        }
        if (starts[k].empty()) return std::nullopt;
    }

    // Full-stream index where significant position p begins (or end of stream).
    auto full_begin = [&](std::size_t p) { return p < total ? hay.full_index[p] : resolution.size(); };
    // Full-stream index just after a separator that ends at significant position e.
    auto full_end = [&](std::size_t sep_start, std::size_t sep_len) {
        if (sep_len == 0) return sep_start == 0 ? std::size_t{0} : full_begin(sep_start);
        return hay.full_index[sep_start + sep_len - 1] + 1;
    };
    auto slice = [&](std::size_t from, std::size_t to) {
        if (to < from) to = from;
        return TokenStream(resolution.begin() + static_cast<std::ptrdiff_t>(from),
                           resolution.begin() + static_cast<std::ptrdiff_t>(to));
    };
    // layout at the edges of each separator stays with the separator
    auto count_layout = [](auto first, auto last) {
        std::size_t n = 0;
        for (; first != last && is_layout(*first); ++first) ++n;
        return n;
    };
    std::vector<std::size_t> lead(n + 1), trail(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        lead[k] = count_layout(seps[k].begin(), seps[k].end());
        trail[k] = count_layout(seps[k].rbegin(), seps[k].rend());
    }
    auto piece = [&](std::size_t k, std::size_t start_k, std::size_t start_next) {
        std::size_t from = full_end(start_k, pat[k].text.size());
        std::size_t to = full_begin(start_next);
        for (std::size_t m = 0; m < trail[k] && from < to && is_layout(resolution[from]); ++m) ++from;
        for (std::size_t m = 0; m < lead[k + 1] && to > from && is_layout(resolution[to - 1]); ++m) --to;
        return slice(from, to);
    };
    auto score = [&](std::size_t j, const TokenStream& r) {
        const auto& tc = outcome.conflicts[j];
        return extract_label(tc.a, tc.b, tc.o, r).has_value() ? 1 : 0;
    };

    // best[k][c]: best score for conflicts 0..k-1 with separator k at starts[k][c]
    constexpr int kUnreachable = -1;
    std::vector<std::vector<int>> best(n + 1);
    std::vector<std::vector<std::size_t>> back(n + 1);
    best[0] = {0};
    back[0] = {0};
    for (std::size_t k = 1; k <= n; ++k) {
        best[k].assign(starts[k].size(), kUnreachable);
        back[k].assign(starts[k].size(), 0);
        for (std::size_t c = 0; c < starts[k].size(); ++c) {
            for (std::size_t pc = 0; pc < starts[k - 1].size(); ++pc) {
                if (best[k - 1][pc] == kUnreachable) continue;
                const auto prev_end = starts[k - 1][pc] + pat[k - 1].text.size();
                if (prev_end > starts[k][c]) continue;
                const int s = best[k - 1][pc] + score(k - 1, piece(k - 1, starts[k - 1][pc], starts[k][c]));
                if (s > best[k][c]) {
                    best[k][c] = s;
                    back[k][c] = pc;
                }
            }
        }
    }
    if (best[n][0] == kUnreachable) return std::nullopt;

    std::vector<std::size_t> chosen(n + 1, 0);
    for (std::size_t k = n; k > 0; --k) chosen[k - 1] = back[k][chosen[k]];
    std::vector<TokenStream> out;
    for (std::size_t j = 0; j < n; ++j) out.push_back(piece(j, starts[j][chosen[j]], starts[j + 1][chosen[j + 1]]));
    return out;
}

/// Attaches r_j to each token conflict. Returns false when the resolution
/// could not be aligned.
inline bool attach_resolutions(TokenMergeOutcome& outcome, const std::string& line_resolution) {
    auto parts = split_resolution(outcome, tokenize(line_resolution));
    if (!parts) return false;
    for (std::size_t j = 0; j < parts->size(); ++j) outcome.conflicts[j].resolution = std::move((*parts)[j]);
    return true;
}

/// Reassembles a line region from its outcome, choosing one token stream per
/// conflict.
inline std::string assemble_region(const TokenMergeOutcome& outcome, const std::vector<TokenStream>& picks) {
    std::string out;
    std::size_t j = 0;
    for (const auto& c : outcome.chunks) {
        if (c.kind == ChunkKind::Conflict)
            out += detokenize(picks.at(j++));
        else
            out += detokenize(c.merged);
    }
    return out;
}

}  // namespace mergeweave
