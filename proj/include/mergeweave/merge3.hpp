#pragma once

// Classic diff3 over arbitrary sequences.
//
// Two two-way diffs against the base give, for each base element, its match
// in A and in B (if any). Walking the three sequences together, maximal runs
// where all three advance in lockstep are stable; everything between two
// stable runs is one changed slot. A slot changed on one side only (or
// identically on both) merges cleanly, otherwise it is a conflict.

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mergeweave/diff.hpp"
#include "mergeweave/text.hpp"

namespace mergeweave {

enum class RegionKind : std::uint8_t { Stable, ChangedA, ChangedB, ChangedBoth, Conflict };

/// Half-open index ranges into the base, left (A) and right (B) sequences.
struct Merge3Region {
    RegionKind kind;
    std::size_t o_begin, o_end;
    std::size_t a_begin, a_end;
    std::size_t b_begin, b_end;
};

namespace detail {

template <class T, class Equal>
std::vector<std::size_t> base_matches(std::span<const T> base, std::span<const T> side, Equal equal) {
    std::vector<std::size_t> match(base.size(), EditOp::npos);
    for (const auto& op : diff_two_way(base, side, equal))
        if (op.kind == EditKind::Keep) match[op.old_index] = op.new_index;
    return match;
}

template <class T, class Equal>
bool ranges_equal(std::span<const T> x, std::size_t x0, std::size_t x1, std::span<const T> y, std::size_t y0,
                  std::size_t y1, Equal equal) {
    if (x1 - x0 != y1 - y0) return false;
    for (std::size_t k = 0; k < x1 - x0; ++k)
        if (!equal(x[x0 + k], y[y0 + k])) return false;
    return true;
}

}  // namespace detail

template <class T, class Equal = std::equal_to<T>>
std::vector<Merge3Region> merge3(std::span<const T> base, std::span<const T> left, std::span<const T> right,
                                 Equal equal = {}) {
    const auto ma = detail::base_matches(base, left, equal);
    const auto mb = detail::base_matches(base, right, equal);
    const std::size_t no = base.size(), na = left.size(), nb = right.size();

    std::vector<Merge3Region> regions;
    std::size_t lo = 0, la = 0, lb = 0;
    auto changed = [&](std::size_t o1, std::size_t a1, std::size_t b1) {
        Merge3Region r{RegionKind::Conflict, lo, o1, la, a1, lb, b1};
        const bool a_same = detail::ranges_equal(left, la, a1, base, lo, o1, equal);
        const bool b_same = detail::ranges_equal(right, lb, b1, base, lo, o1, equal);
        if (a_same)
            r.kind = RegionKind::ChangedB;
        else if (b_same)
            r.kind = RegionKind::ChangedA;
        else if (detail::ranges_equal(left, la, a1, right, lb, b1, equal))
            r.kind = RegionKind::ChangedBoth;
        regions.push_back(r);
        lo = o1;
        la = a1;
        lb = b1;
    };

    while (lo < no || la < na || lb < nb) {
        std::size_t i = 0;
        while (lo + i < no && la + i < na && lb + i < nb && ma[lo + i] == la + i && mb[lo + i] == lb + i) ++i;
        if (i > 0) {
            regions.push_back({RegionKind::Stable, lo, lo + i, la, la + i, lb, lb + i});
            lo += i;
            la += i;
            lb += i;
            continue;
        }
        std::size_t o = lo;
        while (o < no && (ma[o] == EditOp::npos || mb[o] == EditOp::npos)) ++o;
        if (o == no)
            changed(no, na, nb);
        else
            changed(o, ma[o], mb[o]);
    }
    return regions;
}

enum class ChunkKind : std::uint8_t { Stable, Merged, Conflict };

/// One diff3 slot materialised as sequences. Stable chunks hold the same
/// content in a, o, b and merged. Merged chunks were changed on one side (or
/// identically on both) and `merged` holds the accepted side. Conflict chunks
/// leave `merged` empty.
template <class Seq>
struct BasicChunk {
    ChunkKind kind = ChunkKind::Stable;
    Seq a, o, b, merged;

    /// Side selector for reassembly: 'a', 'b' or 'o'.
    const Seq& side(char which) const { return which == 'a' ? a : which == 'b' ? b : o; }
};

using Chunk = BasicChunk<std::string>;

template <class T, class Equal = std::equal_to<T>>
std::vector<BasicChunk<std::vector<T>>> merge3_chunks(std::span<const T> base, std::span<const T> left,
                                                      std::span<const T> right, Equal equal = {}) {
    using Seq = std::vector<T>;
    std::vector<BasicChunk<Seq>> chunks;
    auto slice = [](std::span<const T> s, std::size_t b, std::size_t e) { return Seq(s.begin() + b, s.begin() + e); };
    for (const auto& r : merge3(base, left, right, equal)) {
        BasicChunk<Seq> c;
        c.a = slice(left, r.a_begin, r.a_end);
        c.o = slice(base, r.o_begin, r.o_end);
        c.b = slice(right, r.b_begin, r.b_end);
        switch (r.kind) {
            case RegionKind::Stable:
                c.kind = ChunkKind::Stable;
                c.merged = c.o;
                break;
            case RegionKind::ChangedA:
            case RegionKind::ChangedBoth:
                c.kind = ChunkKind::Merged;
                c.merged = c.a;
                break;
            case RegionKind::ChangedB:
                c.kind = ChunkKind::Merged;
                c.merged = c.b;
                break;
            case RegionKind::Conflict:
                c.kind = ChunkKind::Conflict;
                break;
        }
        chunks.push_back(std::move(c));
    }
    return chunks;
}

/// Line-level diff3 of whole file texts.
inline std::vector<Chunk> diff3_lines(std::string_view base, std::string_view left, std::string_view right) {
    const auto o = split_lines(base);
    const auto a = split_lines(left);
    const auto b = split_lines(right);
    auto join = [](const std::vector<std::string_view>& lines) {
        std::string s;
        for (auto l : lines) s += l;
        return s;
    };
    std::vector<Chunk> out;
    for (auto& c : merge3_chunks<std::string_view>(o, a, b)) {
        out.push_back(Chunk{c.kind, join(c.a), join(c.o), join(c.b), join(c.merged)});
    }
    return out;
}

inline std::size_t count_conflicts(const std::vector<Chunk>& chunks) {
    std::size_t n = 0;
    for (const auto& c : chunks) n += c.kind == ChunkKind::Conflict;
    return n;
}

/// Concatenates every chunk choosing side `which` ('a', 'b', 'o').
template <class Seq>
Seq reassemble(const std::vector<BasicChunk<Seq>>& chunks, char which) {
    Seq out;
    for (const auto& c : chunks) {
        const auto& part = c.side(which);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Conflict markers

struct MarkerLabels {
    std::string a = "A";
    std::string o = "O";
    std::string b = "B";
};

inline void append_marker_line(std::string& out, std::string_view marker, std::string_view label) {
    if (!out.empty() && out.back() != '\n') out.push_back('\n');
    out += marker;
    if (!label.empty()) {
        out.push_back(' ');
        out += label;
    }
    out.push_back('\n');
}

/// Renders chunks as a diff3-style marked file. Clean chunks contribute their
/// merged text.
inline std::string render_conflicts(const std::vector<Chunk>& chunks, const MarkerLabels& labels = {},
                                    bool with_base = true) {
    std::string out;
    for (const auto& c : chunks) {
        if (c.kind != ChunkKind::Conflict) {
            out += c.merged;
            continue;
        }
        append_marker_line(out, "<<<<<<<", labels.a);
        out += c.a;
        if (with_base) {
            append_marker_line(out, "|||||||", labels.o);
            out += c.o;
        }
        append_marker_line(out, "=======", "");
        out += c.b;
        append_marker_line(out, ">>>>>>>", labels.b);
    }
    return out;
}

class MarkerParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A marked file split into text pieces. Each piece is either plain text or a
/// conflict block; `has_base` is false for two-way markers.
struct MarkedPiece {
    bool conflict = false;
    std::string text;  // plain pieces
    std::string a, o, b;
    bool has_base = false;
    std::string raw;  // conflict pieces: the block including marker lines
};

namespace detail {

inline bool is_marker(std::string_view line, char c) {
    if (line.size() < 7) return false;
    for (int k = 0; k < 7; ++k)
        if (line[static_cast<std::size_t>(k)] != c) return false;
    if (line.size() == 7) return true;
    char next = line[7];
    return next == ' ' || next == '\t' || next == '\n' || next == '\r';
}

}  // namespace detail

/// Parses "<<<<<<<" / "|||||||" / "=======" / ">>>>>>>" blocks. Throws
/// MarkerParseError on malformed nesting, unterminated blocks or a stray
/// ">>>>>>>"; stray "=======" and "|||||||" lines are plain text.
inline std::vector<MarkedPiece> parse_conflict_markers(std::string_view text) {
    enum class State { Plain, InA, InO, InB } state = State::Plain;
    std::vector<MarkedPiece> pieces;
    MarkedPiece plain, block;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& msg) {
        throw MarkerParseError(msg + " at line " + std::to_string(line_no));
    };
    // A marker line's own terminator belongs to the marker; when the last
    // content line before a marker has no terminator the renderer added one.
    for (auto line : split_lines(text)) {
        ++line_no;
        if (state != State::Plain) block.raw += line;
        switch (state) {
            case State::Plain:
                if (detail::is_marker(line, '<')) {
                    if (!plain.text.empty()) pieces.push_back(std::move(plain));
                    plain = MarkedPiece{};
                    block = MarkedPiece{};
                    block.conflict = true;
                    block.raw += line;
                    state = State::InA;
                } else if (detail::is_marker(line, '>')) {
                    fail("unexpected conflict marker");
                } else {
                    plain.text += line;
                }
                break;
            case State::InA:
                if (detail::is_marker(line, '|')) {
                    block.has_base = true;
                    state = State::InO;
                } else if (detail::is_marker(line, '=')) {
                    state = State::InB;
                } else if (detail::is_marker(line, '<') || detail::is_marker(line, '>')) {
                    fail("nested conflict marker");
                } else {
                    block.a += line;
                }
                break;
            case State::InO:
                if (detail::is_marker(line, '=')) {
                    state = State::InB;
                } else if (detail::is_marker(line, '<') || detail::is_marker(line, '>') ||
                           detail::is_marker(line, '|')) {
                    fail("unexpected marker in base section");
                } else {
                    block.o += line;
                }
                break;
            case State::InB:
                if (detail::is_marker(line, '>')) {
                    pieces.push_back(std::move(block));
                    block = MarkedPiece{};
                    state = State::Plain;
                } else if (detail::is_marker(line, '<') || detail::is_marker(line, '|') ||
                           detail::is_marker(line, '=')) {
                    fail("unexpected marker in right section");
                } else {
                    block.b += line;
                }
                break;
        }
    }
    if (state != State::Plain) fail("unterminated conflict block");
    if (!plain.text.empty()) pieces.push_back(std::move(plain));
    return pieces;
}

inline bool has_conflict_markers(std::string_view text) {
    for (auto line : split_lines(text))
        if (detail::is_marker(line, '<') || detail::is_marker(line, '>') || detail::is_marker(line, '|')) return true;
    return false;
}

}  // namespace mergeweave
