#pragma once

// Line-level conflicts and their token-level refinement.
//
// token_diff3 re-runs diff3 over the token streams of one line-level conflict.
// Cleanly merged token slots become context; what remains are localized token
// conflicts (a_j, b_j, o_j), usually much smaller than the line region.

#include <optional>
#include <string>
#include <vector>

#include "mergeweave/merge3.hpp"
#include "mergeweave/tokenizer.hpp"

namespace mergeweave {

struct MergeMeta {
    std::string repo;
    std::string commit;
    std::string path;
};

/// (A, B, O, M): left, right, base and (when known) the developer-resolved
/// program.
struct MergeTuple {
    std::string base;
    std::string left;
    std::string right;
    std::optional<std::string> resolved;
    MergeMeta meta;
};

/// One line-level conflicting region (A_i, B_i, O_i) with its resolution R_i
/// and the file text around it.
struct LineConflict {
    std::size_t index = 0;
    std::string a, b, o;
    std::optional<std::string> resolution;
    std::string prefix, suffix;
};

/// A localized token conflict. `pref` is everything in the line region before
/// the conflict and `suff` everything after it; cleanly merged tokens appear
/// merged and other token conflicts appear as their A side.
struct TokenConflict {
    std::size_t index = 0;
    TokenStream a, b, o;
    std::optional<TokenStream> resolution;
    TokenStream pref, suff;
};

using TokenChunk = BasicChunk<TokenStream>;

enum class MergeOutcomeKind : std::uint8_t { CleanMerge, SingleConflict, MultiConflict };

struct TokenMergeOutcome {
    MergeOutcomeKind kind = MergeOutcomeKind::CleanMerge;
    std::vector<TokenChunk> chunks;
    std::vector<TokenConflict> conflicts;

    /// Merged text when the outcome is clean.
    std::string merged_text() const {
        std::string out;
        for (const auto& c : chunks) out += detokenize(c.merged);
        return out;
    }
};

/// Minimum number of tokens in a clean run separating two token conflicts;
/// shorter runs are folded into one conflict.
inline constexpr std::size_t kMinSeparatorTokens = 2;

namespace detail {

inline void append(TokenStream& dst, const TokenStream& src) { dst.insert(dst.end(), src.begin(), src.end()); }

// Folds clean runs shorter than kMinSeparatorTokens between two conflicts.
inline std::vector<TokenChunk> fold_micro_conflicts(std::vector<TokenChunk> chunks) {
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<TokenChunk> out;
        for (std::size_t i = 0; i < chunks.size(); ++i) {
            if (chunks[i].kind != ChunkKind::Conflict || out.empty()) {
                out.push_back(std::move(chunks[i]));
                continue;
            }
            // find the previous conflict in out and the clean run after it
            std::size_t prev = out.size();
            std::size_t run = 0;
            for (std::size_t k = out.size(); k-- > 0;) {
                if (out[k].kind == ChunkKind::Conflict) {
                    prev = k;
                    break;
                }
                run += out[k].merged.size();
            }
            if (prev == out.size() || run >= kMinSeparatorTokens) {
                out.push_back(std::move(chunks[i]));
                continue;
            }
            TokenChunk folded = std::move(out[prev]);
            for (std::size_t k = prev + 1; k < out.size(); ++k) {
                append(folded.a, out[k].a);
                append(folded.o, out[k].o);
                append(folded.b, out[k].b);
            }
            append(folded.a, chunks[i].a);
            append(folded.o, chunks[i].o);
            append(folded.b, chunks[i].b);
            out.resize(prev);
            out.push_back(std::move(folded));
            changed = true;
        }
        chunks = std::move(out);
    }
    return chunks;
}

}  // namespace detail

/// Builds the outcome from already merged token chunks.
inline TokenMergeOutcome make_outcome(std::vector<TokenChunk> chunks) {
    TokenMergeOutcome out;
    out.chunks = detail::fold_micro_conflicts(std::move(chunks));

    std::vector<std::size_t> conflict_pos;
    for (std::size_t i = 0; i < out.chunks.size(); ++i)
        if (out.chunks[i].kind == ChunkKind::Conflict) conflict_pos.push_back(i);

    auto rendered = [&](std::size_t k) -> const TokenStream& {
        const auto& c = out.chunks[k];
        return c.kind == ChunkKind::Conflict ? c.a : c.merged;
    };
    for (std::size_t j = 0; j < conflict_pos.size(); ++j) {
        const auto pos = conflict_pos[j];
        TokenConflict tc;
        tc.index = j;
        tc.a = out.chunks[pos].a;
        tc.b = out.chunks[pos].b;
        tc.o = out.chunks[pos].o;
        for (std::size_t k = 0; k < pos; ++k) detail::append(tc.pref, rendered(k));
        for (std::size_t k = pos + 1; k < out.chunks.size(); ++k) detail::append(tc.suff, rendered(k));
        out.conflicts.push_back(std::move(tc));
    }
    out.kind = conflict_pos.empty()       ? MergeOutcomeKind::CleanMerge
               : conflict_pos.size() == 1 ? MergeOutcomeKind::SingleConflict
                                          : MergeOutcomeKind::MultiConflict;
    return out;
}

/// Token-level three-way merge of one line-level conflict.
inline TokenMergeOutcome token_diff3(const LineConflict& conflict) {
    const auto a = tokenize(conflict.a);
    const auto o = tokenize(conflict.o);
    const auto b = tokenize(conflict.b);
    return make_outcome(merge3_chunks<Token>(o, a, b));
}

/// Line conflicts of a whole tuple, in file order. Pref/Suff take the left
/// side for other conflicts.
inline std::vector<LineConflict> line_conflicts(const std::vector<Chunk>& chunks) {
    std::vector<LineConflict> out;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (chunks[i].kind != ChunkKind::Conflict) continue;
        LineConflict lc;
        lc.index = out.size();
        lc.a = chunks[i].a;
        lc.b = chunks[i].b;
        lc.o = chunks[i].o;
        for (std::size_t k = 0; k < i; ++k)
            lc.prefix += chunks[k].kind == ChunkKind::Conflict ? chunks[k].a : chunks[k].merged;
        for (std::size_t k = i + 1; k < chunks.size(); ++k)
            lc.suffix += chunks[k].kind == ChunkKind::Conflict ? chunks[k].a : chunks[k].merged;
        out.push_back(std::move(lc));
    }
    return out;
}

}  // namespace mergeweave
