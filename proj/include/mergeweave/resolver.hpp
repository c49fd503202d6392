#pragma once

// Beam-search decoding of label sequences and whole-file resolution.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "mergeweave/align.hpp"
#include "mergeweave/classifier.hpp"
#include "mergeweave/conflict.hpp"
#include "mergeweave/labels.hpp"
#include "mergeweave/merge3.hpp"
#include "mergeweave/syntax.hpp"

namespace mergeweave {

struct DecodeOptions {
    std::size_t K = 3;
    std::size_t M = 5;
    std::size_t context_budget = kDefaultContextBudget;
};

struct BeamState {
    std::string text;
    double logprob = 0.0;
    std::vector<ResolutionLabel> labels;
};

struct DecodeResult {
    bool clean = false;                // token-level merge needed no labels
    std::vector<BeamState> candidates; // by non-increasing logprob, distinct texts
    std::vector<LabelProbs> probs;     // one per token conflict
    std::optional<std::string> error;
};

inline void validate(const DecodeOptions& opt) {
    if (opt.K < 1 || opt.K > kNumLabels) throw std::invalid_argument("K must be in [1, 9]");
    if (opt.M < 1) throw std::invalid_argument("M must be >= 1");
}

/// Beam search over the chunks of a token merge outcome given one label
/// distribution per token conflict. Clean chunks are fixed segments. Labels
/// with zero probability are never proposed.
inline std::vector<BeamState> beam_decode(const TokenMergeOutcome& outcome, const std::vector<LabelProbs>& probs,
                                          std::size_t K, std::size_t M) {
    if (probs.size() != outcome.conflicts.size()) throw std::invalid_argument("one distribution per conflict");
    std::vector<BeamState> beam{BeamState{}};
    std::size_t j = 0;
    for (const auto& chunk : outcome.chunks) {
        if (chunk.kind != ChunkKind::Conflict) {
            const auto seg = detokenize(chunk.merged);
            for (auto& s : beam) s.text += seg;
            continue;
        }
        const auto& tc = outcome.conflicts[j];
        const auto& p = probs[j];
        auto ranked = ranked_labels(p);
        ranked.resize(K);
        std::vector<std::string> outputs;
        for (auto label : ranked) outputs.push_back(detokenize(apply_label(label, tc.a, tc.b, tc.o)));

        std::vector<BeamState> next;
        next.reserve(beam.size() * K);
        for (const auto& s : beam) {
            for (std::size_t k = 0; k < ranked.size(); ++k) {
                const double pk = p[class_index(ranked[k])];
                if (pk <= 0.0) continue;
                BeamState ns{s.text + outputs[k], s.logprob + std::log(pk), s.labels};
                ns.labels.push_back(ranked[k]);
                next.push_back(std::move(ns));
            }
        }
        std::stable_sort(next.begin(), next.end(),
                         [](const BeamState& x, const BeamState& y) { return x.logprob > y.logprob; });
        if (next.size() > M) next.resize(M);
        beam = std::move(next);
        ++j;
        if (beam.empty()) break;
    }
    return beam;
}

inline std::vector<BeamState> dedupe_by_text(std::vector<BeamState> states) {
    std::unordered_set<std::string> seen;
    std::vector<BeamState> out;
    for (auto& s : states)
        if (seen.insert(s.text).second) out.push_back(std::move(s));
    return out;
}

/// Decodes a token merge outcome. When a conflict carries its resolution the
/// input gets the reference label (used by the oracle classifier).
inline DecodeResult decode_outcome(const TokenMergeOutcome& outcome, Classifier& clf, const DecodeOptions& opt = {},
                                   const TokenStream& line_prefix = {}, const TokenStream& line_suffix = {}) {
    validate(opt);
    DecodeResult result;
    if (outcome.kind == MergeOutcomeKind::CleanMerge) {
        result.clean = true;
        result.candidates.push_back(BeamState{outcome.merged_text(), 0.0, {}});
        return result;
    }
    std::vector<ModelInput> inputs;
    for (const auto& tc : outcome.conflicts) {
        auto in = build_model_input(tc, opt.context_budget, line_prefix, line_suffix);
        if (tc.resolution) in.reference_label = extract_label(tc);
        inputs.push_back(std::move(in));
    }
    auto slots = clf.predict_batch(inputs);
    for (std::size_t j = 0; j < slots.size(); ++j) {
        if (!slots[j].ok()) {
            result.error = "token conflict " + std::to_string(j) + ": " + slots[j].error;
            return result;
        }
        result.probs.push_back(slots[j].prediction->probs);
    }
    result.candidates = dedupe_by_text(beam_decode(outcome, result.probs, opt.K, opt.M));
    return result;
}

/// Token-level diff3 of the line conflict followed by beam decoding.
inline DecodeResult decode_conflict(const LineConflict& lc, Classifier& clf, const DecodeOptions& opt = {}) {
    auto outcome = token_diff3(lc);
    if (lc.resolution) attach_resolutions(outcome, *lc.resolution);
    return decode_outcome(outcome, clf, opt, tokenize(lc.prefix), tokenize(lc.suffix));
}

// ---------------------------------------------------------------------------
// Whole files

enum class ResolutionStatus : std::uint8_t { Resolved, PartiallyResolved, Abstained };

inline std::string_view status_name(ResolutionStatus s) {
    switch (s) {
        case ResolutionStatus::Resolved: return "resolved";
        case ResolutionStatus::PartiallyResolved: return "partially-resolved";
        case ResolutionStatus::Abstained: return "abstained";
    }
    return "?";
}

/// Fills the base section of two-way marker blocks from the merge base text:
/// both sides are rendered, re-merged against `base_text`, and each block
/// takes the base slices of the diff3 chunks lying inside it. Blocks that do
/// not line up keep an empty base. Returns the number of blocks filled.
inline std::size_t fill_base_sections(std::vector<MarkedPiece>& pieces, std::string_view base_text) {
    std::string left, right;
    struct Span {
        std::size_t a0, a1, b0, b1;
    };
    std::vector<Span> blocks(pieces.size());
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        const auto& p = pieces[k];
        blocks[k].a0 = left.size();
        blocks[k].b0 = right.size();
        left += p.conflict ? p.a : p.text;
        right += p.conflict ? p.b : p.text;
        blocks[k].a1 = left.size();
        blocks[k].b1 = right.size();
    }
    const auto chunks = diff3_lines(base_text, left, right);
    std::size_t filled = 0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        auto& p = pieces[k];
        if (!p.conflict || p.has_base) continue;
        const auto& blk = blocks[k];
        std::string o;
        std::size_t pa = 0, pb = 0, got_a = 0, got_b = 0;
        bool straddles = false;
        for (const auto& c : chunks) {
            const std::size_t a0 = pa, a1 = pa + c.a.size(), b0 = pb, b1 = pb + c.b.size();
            pa = a1;
            pb = b1;
            const bool inside = a0 >= blk.a0 && a1 <= blk.a1 && b0 >= blk.b0 && b1 <= blk.b1;
            const bool overlaps = (a0 < blk.a1 && a1 > blk.a0) || (b0 < blk.b1 && b1 > blk.b0);
            if (inside && (a1 > a0 || b1 > b0)) {
                o += c.o;
                got_a += a1 - a0;
                got_b += b1 - b0;
            } else if (overlaps) {
                straddles = true;
            }
        }
        if (straddles || got_a != blk.a1 - blk.a0 || got_b != blk.b1 - blk.b0) continue;
        p.o = std::move(o);
        p.has_base = true;
        ++filled;
    }
    return filled;
}

struct ResolveOptions {
    DecodeOptions decode;
    double tau = 0.0;  // abstain when the best candidate's probability is below this
    std::string language = "unknown";
    SyntaxChecker checker;
    // Developer resolution per conflict, in file order (oracle runs). Entries
    // may be empty when a region could not be extracted.
    std::vector<std::optional<std::string>> reference_regions;
    // Merge base of the whole file; gives two-way blocks their base section.
    std::optional<std::string> base_text;
};

struct ConflictReport {
    std::size_t index = 0;
    bool resolved = false;
    bool clean_token_merge = false;
    bool syntax_ok = false;
    std::vector<ResolutionLabel> labels;
    std::vector<LabelProbs> probs;
    double logprob = 0.0;
    std::size_t candidate_rank = 0;  // which beam candidate was accepted
    std::string error;
};

struct ResolutionResult {
    std::string file_text;
    std::vector<ConflictReport> per_conflict;
    ResolutionStatus status = ResolutionStatus::Resolved;
};

/// Resolves conflicts top to bottom. Each accepted resolution replaces its
/// block before the next conflict's context is built; later blocks count as
/// their left side. A candidate is accepted if the file passes the syntax
/// check with it (skipped when the all-left rendering already fails).
/// Unresolved blocks keep their original markers.
inline ResolutionResult resolve_file(std::string_view conflicted_text, Classifier& clf,
                                     const ResolveOptions& opt = {}) {
    validate(opt.decode);
    auto pieces = parse_conflict_markers(conflicted_text);
    if (opt.base_text) fill_base_sections(pieces, *opt.base_text);
    std::vector<std::optional<std::string>> chosen(pieces.size());

    auto render = [&](std::size_t skip, const std::string* insert) {
        std::string out;
        for (std::size_t k = 0; k < pieces.size(); ++k) {
            const auto& p = pieces[k];
            if (!p.conflict)
                out += p.text;
            else if (k == skip)
                out += *insert;
            else if (chosen[k])
                out += *chosen[k];
            else
                out += p.a;
        }
        return out;
    };
    const std::size_t none = pieces.size();
    const bool baseline_ok = opt.checker.check(render(none, nullptr), opt.language);
    if (!baseline_ok) spdlog::debug("left-side rendering fails the syntax check; syntax gating disabled");

    ResolutionResult result;
    std::size_t conflict_no = 0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        if (!pieces[k].conflict) continue;
        ConflictReport rep;
        rep.index = conflict_no++;

        LineConflict lc;
        lc.index = rep.index;
        lc.a = pieces[k].a;
        lc.b = pieces[k].b;
        lc.o = pieces[k].o;
        if (rep.index < opt.reference_regions.size()) lc.resolution = opt.reference_regions[rep.index];
        for (std::size_t q = 0; q < k; ++q)
            lc.prefix += !pieces[q].conflict ? pieces[q].text : chosen[q] ? *chosen[q] : pieces[q].a;
        for (std::size_t q = k + 1; q < pieces.size(); ++q)
            lc.suffix += !pieces[q].conflict ? pieces[q].text : pieces[q].a;

        DecodeResult dec;
        try {
            dec = decode_conflict(lc, clf, opt.decode);
        } catch (const std::exception& e) {
            dec.error = e.what();
        }
        rep.clean_token_merge = dec.clean;
        rep.probs = dec.probs;
        if (dec.error) {
            rep.error = *dec.error;
        } else if (dec.candidates.empty()) {
            rep.error = "no candidates";
        } else if (std::exp(dec.candidates.front().logprob) < opt.tau) {
            rep.error = "below abstention threshold";
        } else {
            for (std::size_t c = 0; c < dec.candidates.size(); ++c) {
                const auto& cand = dec.candidates[c];
                const bool ok = opt.checker.check(render(k, &cand.text), opt.language);
                if (ok || !baseline_ok) {
                    chosen[k] = cand.text;
                    rep.resolved = true;
                    rep.syntax_ok = ok;
                    rep.labels = cand.labels;
                    rep.logprob = cand.logprob;
                    rep.candidate_rank = c;
                    break;
                }
            }
            if (!rep.resolved) rep.error = "every candidate failed the syntax check";
        }
        result.per_conflict.push_back(std::move(rep));
    }

    std::size_t resolved = 0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        const auto& p = pieces[k];
        if (!p.conflict) {
            result.file_text += p.text;
        } else if (chosen[k]) {
            result.file_text += *chosen[k];
            ++resolved;
        } else {
            result.file_text += p.raw;
        }
    }
    const auto total = result.per_conflict.size();
    result.status = resolved == total ? ResolutionStatus::Resolved
                    : resolved == 0   ? ResolutionStatus::Abstained
                                      : ResolutionStatus::PartiallyResolved;
    return result;
}

inline nlohmann::ordered_json to_json(const ResolutionResult& r) {
    nlohmann::ordered_json j;
    j["status"] = std::string(status_name(r.status));
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : r.per_conflict) {
        nlohmann::ordered_json e;
        e["index"] = c.index;
        e["resolved"] = c.resolved;
        e["clean_token_merge"] = c.clean_token_merge;
        e["syntax_ok"] = c.syntax_ok;
        auto labels = nlohmann::ordered_json::array();
        for (auto l : c.labels) labels.push_back(std::string(label_name(l)));
        e["labels"] = labels;
        e["probs"] = c.probs;
        e["logprob"] = std::isfinite(c.logprob) ? nlohmann::ordered_json(c.logprob) : nlohmann::ordered_json(nullptr);
        e["candidate_rank"] = c.candidate_rank;
        if (!c.error.empty()) e["error"] = c.error;
        arr.push_back(std::move(e));
    }
    j["conflicts"] = arr;
    return j;
}

}  // namespace mergeweave
