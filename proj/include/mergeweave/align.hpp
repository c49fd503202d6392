#pragma once

// Edit-aware input representation: two aligned pairs (a|o, o|a) and (b|o, o|b)
// with the edit actions that turn the second sequence of each pair into the
// first.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mergeweave/conflict.hpp"
#include "mergeweave/diff.hpp"
#include "mergeweave/labels.hpp"
#include "mergeweave/tokenizer.hpp"

namespace mergeweave {

enum class EditAction : std::uint8_t { Equal, Insert, Delete, Replace, Pad };

/// Wire spelling: "=", "+", "-", "r", "p".
inline char action_code(EditAction a) {
    switch (a) {
        case EditAction::Equal: return '=';
        case EditAction::Insert: return '+';
        case EditAction::Delete: return '-';
        case EditAction::Replace: return 'r';
        case EditAction::Pad: return 'p';
    }
    return '?';
}

inline EditAction action_from_code(char c) {
    switch (c) {
        case '=': return EditAction::Equal;
        case '+': return EditAction::Insert;
        case '-': return EditAction::Delete;
        case 'r': return EditAction::Replace;
        case 'p': return EditAction::Pad;
        default: throw std::invalid_argument(std::string("unknown edit action '") + c + "'");
    }
}

/// A padded slot holds no token.
using Slot = std::optional<Token>;

struct AlignedPair {
    std::vector<Slot> upper;
    std::vector<Slot> lower;
    std::vector<EditAction> edits;
};

/// Aligns `changed` (upper) against `base` (lower). Within each run of
/// changes, deletions and insertions are paired off positionally into
/// Replace; the excess of the longer side stays Insert or Delete.
inline AlignedPair align(const TokenStream& changed, const TokenStream& base) {
    auto less = [](const Token& x, const Token& y) { return x.text < y.text; };
    const auto script = diff_two_way_symmetric(std::span<const Token>(base), std::span<const Token>(changed),
                                               std::equal_to<Token>{}, less);
    AlignedPair out;
    std::size_t i = 0;
    while (i < script.size()) {
        if (script[i].kind == EditKind::Keep) {
            out.upper.emplace_back(changed[script[i].new_index]);
            out.lower.emplace_back(base[script[i].old_index]);
            out.edits.push_back(EditAction::Equal);
            ++i;
            continue;
        }
        std::vector<std::size_t> dels, ins;
        while (i < script.size() && script[i].kind != EditKind::Keep) {
            if (script[i].kind == EditKind::Delete)
                dels.push_back(script[i].old_index);
            else
                ins.push_back(script[i].new_index);
            ++i;
        }
        const auto paired = std::min(dels.size(), ins.size());
        for (std::size_t k = 0; k < paired; ++k) {
            out.upper.emplace_back(changed[ins[k]]);
            out.lower.emplace_back(base[dels[k]]);
            out.edits.push_back(EditAction::Replace);
        }
        for (std::size_t k = paired; k < dels.size(); ++k) {
            out.upper.emplace_back(std::nullopt);
            out.lower.emplace_back(base[dels[k]]);
            out.edits.push_back(EditAction::Delete);
        }
        for (std::size_t k = paired; k < ins.size(); ++k) {
            out.upper.emplace_back(changed[ins[k]]);
            out.lower.emplace_back(std::nullopt);
            out.edits.push_back(EditAction::Insert);
        }
    }
    return out;
}

/// Tokens of one side with padding removed.
inline TokenStream unpad(const std::vector<Slot>& slots) {
    TokenStream out;
    for (const auto& s : slots)
        if (s) out.push_back(*s);
    return out;
}

/// Classifier input for one token conflict. The four sequences are what goes
/// on the wire; the raw regions and the optional reference label stay local.
struct ModelInput {
    std::vector<Slot> a_o, o_a, b_o, o_b;
    std::vector<EditAction> d_ao, d_bo;

    TokenStream a, b, o;
    std::optional<ResolutionLabel> reference_label;
};

inline constexpr std::size_t kDefaultContextBudget = 512;

namespace detail {

// Takes the last `budget` non-layout tokens of `stream` (with the layout
// tokens between them). Leading layout before the first kept token is dropped.
inline TokenStream tail_context(const TokenStream& stream, std::size_t budget) {
    if (budget == 0) return {};
    std::size_t taken = 0;
    std::size_t start = stream.size();
    while (start > 0 && taken < budget) {
        --start;
        if (!is_layout(stream[start])) ++taken;
    }
    while (start < stream.size() && is_layout(stream[start])) ++start;
    return TokenStream(stream.begin() + static_cast<std::ptrdiff_t>(start), stream.end());
}

inline TokenStream head_context(const TokenStream& stream, std::size_t budget) {
    if (budget == 0) return {};
    std::size_t taken = 0;
    std::size_t end = 0;
    while (end < stream.size() && taken < budget) {
        if (!is_layout(stream[end])) ++taken;
        ++end;
    }
    while (end < stream.size() && is_layout(stream[end])) ++end;
    return TokenStream(stream.begin(), stream.begin() + static_cast<std::ptrdiff_t>(end));
}

inline std::size_t significant_count(const TokenStream& s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](const Token& t) { return !is_layout(t); }));
}

}  // namespace detail

/// Builds the four aligned sequences for `tc`. `context_budget` counts
/// non-layout context tokens, split evenly between the tail of the prefix and
/// the head of the suffix; the token-level pref/suff are used first, then the
/// optional line-level prefix/suffix.
inline ModelInput build_model_input(const TokenConflict& tc, std::size_t context_budget = kDefaultContextBudget,
                                    const TokenStream& line_prefix = {}, const TokenStream& line_suffix = {}) {
    const std::size_t before_budget = context_budget / 2;
    const std::size_t after_budget = context_budget - before_budget;

    TokenStream before = detail::tail_context(tc.pref, before_budget);
    if (auto got = detail::significant_count(before); got < before_budget) {
        auto more = detail::tail_context(line_prefix, before_budget - got);
        more.insert(more.end(), tc.pref.begin(), tc.pref.end());
        before = std::move(more);
    }
    TokenStream after = detail::head_context(tc.suff, after_budget);
    if (auto got = detail::significant_count(after); got < after_budget) {
        auto more = detail::head_context(line_suffix, after_budget - got);
        after.insert(after.end(), more.begin(), more.end());
    }

    ModelInput in;
    auto fill = [&](const TokenStream& side, std::vector<Slot>& upper, std::vector<Slot>& lower,
                    std::vector<EditAction>& edits) {
        for (const auto& t : before) {
            upper.emplace_back(t);
            lower.emplace_back(t);
            edits.push_back(EditAction::Equal);
        }
        auto pair = align(side, tc.o);
        upper.insert(upper.end(), pair.upper.begin(), pair.upper.end());
        lower.insert(lower.end(), pair.lower.begin(), pair.lower.end());
        edits.insert(edits.end(), pair.edits.begin(), pair.edits.end());
        for (const auto& t : after) {
            upper.emplace_back(t);
            lower.emplace_back(t);
            edits.push_back(EditAction::Equal);
        }
    };
    fill(tc.a, in.a_o, in.o_a, in.d_ao);
    fill(tc.b, in.b_o, in.o_b, in.d_bo);
    in.a = tc.a;
    in.b = tc.b;
    in.o = tc.o;
    return in;
}

// ---------------------------------------------------------------------------
// JSON form shared with the scorer protocol. Padded slots are empty strings
// (real tokens are never empty).

inline nlohmann::ordered_json slots_to_json(const std::vector<Slot>& slots) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& s : slots) arr.push_back(s ? s->text : std::string());
    return arr;
}

inline nlohmann::ordered_json actions_to_json(const std::vector<EditAction>& actions) {
    auto arr = nlohmann::ordered_json::array();
    for (auto a : actions) arr.push_back(std::string(1, action_code(a)));
    return arr;
}

inline nlohmann::ordered_json model_input_to_json(const ModelInput& in, long long id) {
    nlohmann::ordered_json j;
    j["id"] = id;
    j["a_o"] = slots_to_json(in.a_o);
    j["o_a"] = slots_to_json(in.o_a);
    j["b_o"] = slots_to_json(in.b_o);
    j["o_b"] = slots_to_json(in.o_b);
    j["d_ao"] = actions_to_json(in.d_ao);
    j["d_bo"] = actions_to_json(in.d_bo);
    return j;
}

/// Parses the wire form back into aligned sequences; the raw regions are not
/// recoverable from it. Throws on malformed input.
inline ModelInput model_input_from_json(const nlohmann::json& j) {
    auto slots = [&](const char* key) {
        std::vector<Slot> out;
        for (const auto& v : j.at(key)) {
            auto s = v.get<std::string>();
            if (s.empty())
                out.emplace_back(std::nullopt);
            else
                out.emplace_back(Token{s, TokenKind::Other});
        }
        return out;
    };
    auto actions = [&](const char* key) {
        std::vector<EditAction> out;
        for (const auto& v : j.at(key)) {
            auto s = v.get<std::string>();
            if (s.size() != 1) throw std::invalid_argument("edit action must be one character");
            out.push_back(action_from_code(s[0]));
        }
        return out;
    };
    ModelInput in;
    in.a_o = slots("a_o");
    in.o_a = slots("o_a");
    in.b_o = slots("b_o");
    in.o_b = slots("o_b");
    in.d_ao = actions("d_ao");
    in.d_bo = actions("d_bo");
    if (in.a_o.size() != in.o_a.size() || in.a_o.size() != in.d_ao.size() || in.b_o.size() != in.o_b.size() ||
        in.b_o.size() != in.d_bo.size())
        throw std::invalid_argument("aligned sequence lengths differ");
    return in;
}

/// Aligned lengths agree pairwise.
inline bool well_formed(const ModelInput& in) {
    return in.a_o.size() == in.o_a.size() && in.a_o.size() == in.d_ao.size() && in.b_o.size() == in.o_b.size() &&
           in.b_o.size() == in.d_bo.size();
}

}  // namespace mergeweave
