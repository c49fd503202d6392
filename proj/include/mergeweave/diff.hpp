#pragma once

// Two-way shortest edit scripts.
//
// diff_two_way is Myers' O(ND) algorithm in its linear-space (middle snake)
// form. Change groups are then slid over equal neighbours: up to merge with
// earlier groups, then down as far as they go. Inside every run of changes
// the script lists deletions before insertions.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace mergeweave {

enum class EditKind : std::uint8_t { Keep, Insert, Delete };

/// One step of an edit script. Keep carries both indices, Delete only the old
/// index and Insert only the new index (the other is npos).
struct EditOp {
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    EditKind kind;
    std::size_t old_index = npos;
    std::size_t new_index = npos;

    friend bool operator==(const EditOp&, const EditOp&) = default;
};

using EditScript = std::vector<EditOp>;

namespace detail {

template <class Equal>
class MyersDiff {
public:
    MyersDiff(Equal equal, EditScript& out) : equal_(std::move(equal)), out_(out) {}

    void run(std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1) {
        while (a0 < a1 && b0 < b1 && equal_(a0, b0)) keep(a0++, b0++);
        std::size_t tail = 0;
        while (a1 - tail > a0 && b1 - tail > b0 && equal_(a1 - tail - 1, b1 - tail - 1)) ++tail;
        a1 -= tail;
        b1 -= tail;

        if (a0 == a1) {
            for (auto j = b0; j < b1; ++j) insert(j);
        } else if (b0 == b1) {
            for (auto i = a0; i < a1; ++i) erase(i);
        } else if (auto split = bisect(a0, a1, b0, b1)) {
            run(a0, split->first, b0, split->second);
            run(split->first, a1, split->second, b1);
        } else {
            for (auto i = a0; i < a1; ++i) erase(i);
            for (auto j = b0; j < b1; ++j) insert(j);
        }
        for (std::size_t t = 0; t < tail; ++t) keep(a1 + t, b1 + t);
    }

private:
    struct Split {
        std::size_t first, second;
    };

    void keep(std::size_t i, std::size_t j) { out_.push_back({EditKind::Keep, i, j}); }
    void erase(std::size_t i) { out_.push_back({EditKind::Delete, i, EditOp::npos}); }
    void insert(std::size_t j) { out_.push_back({EditKind::Insert, EditOp::npos, j}); }

    // Finds a point on an optimal path roughly halfway through it by running
    // the forward and reverse searches until they overlap.
    std::optional<Split> bisect(std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1) {
        using I = std::ptrdiff_t;
        const I n = static_cast<I>(a1 - a0);
        const I m = static_cast<I>(b1 - b0);
        const I max_d = (n + m + 1) / 2;
        const I offset = max_d + 1;
        const I width = 2 * max_d + 3;
        std::vector<I> fwd(static_cast<std::size_t>(width), -1);
        std::vector<I> rev(static_cast<std::size_t>(width), -1);
        fwd[static_cast<std::size_t>(offset + 1)] = 0;
        rev[static_cast<std::size_t>(offset + 1)] = 0;
        const I delta = n - m;
        const bool front = (delta % 2 != 0);
        auto at = [](std::vector<I>& v, I k) -> I& { return v[static_cast<std::size_t>(k)]; };
        auto eq = [&](I i, I j) {
            return equal_(a0 + static_cast<std::size_t>(i), b0 + static_cast<std::size_t>(j));
        };

        I k1start = 0, k1end = 0, k2start = 0, k2end = 0;
        for (I d = 0; d < max_d; ++d) {
            for (I k1 = -d + k1start; k1 <= d - k1end; k1 += 2) {
                const I k1o = offset + k1;
                I x1 = (k1 == -d || (k1 != d && at(fwd, k1o - 1) < at(fwd, k1o + 1))) ? at(fwd, k1o + 1)
                                                                                    : at(fwd, k1o - 1) + 1;
                I y1 = x1 - k1;
                while (x1 < n && y1 < m && eq(x1, y1)) {
                    ++x1;
                    ++y1;
                }
                at(fwd, k1o) = x1;
                if (x1 > n) {
                    k1end += 2;
                } else if (y1 > m) {
                    k1start += 2;
                } else if (front) {
                    const I k2o = offset + delta - k1;
                    if (k2o >= 0 && k2o < width && at(rev, k2o) != -1) {
                        const I x2 = n - at(rev, k2o);
                        if (x1 >= x2)
                            return Split{a0 + static_cast<std::size_t>(x1), b0 + static_cast<std::size_t>(y1)};
                    }
                }
            }
            for (I k2 = -d + k2start; k2 <= d - k2end; k2 += 2) {
                const I k2o = offset + k2;
                I x2 = (k2 == -d || (k2 != d && at(rev, k2o - 1) < at(rev, k2o + 1))) ? at(rev, k2o + 1)
                                                                                    : at(rev, k2o - 1) + 1;
                I y2 = x2 - k2;
                while (x2 < n && y2 < m && eq(n - x2 - 1, m - y2 - 1)) {
                    ++x2;
                    ++y2;
                }
                at(rev, k2o) = x2;
                if (x2 > n) {
                    k2end += 2;
                } else if (y2 > m) {
                    k2start += 2;
                } else if (!front) {
                    const I k1o = offset + delta - k2;
                    if (k1o >= 0 && k1o < width && at(fwd, k1o) != -1) {
                        const I x1 = at(fwd, k1o);
                        const I y1 = offset + x1 - k1o;
                        if (x1 >= n - x2)
                            return Split{a0 + static_cast<std::size_t>(x1), b0 + static_cast<std::size_t>(y1)};
                    }
                }
            }
        }
        return std::nullopt;
    }

    Equal equal_;
    EditScript& out_;
};

}  // namespace detail

/// Reorders every maximal run of non-Keep steps so deletions precede
/// insertions. The script stays valid and minimal.
inline void normalize_runs(EditScript& script) {
    std::size_t i = 0;
    while (i < script.size()) {
        if (script[i].kind == EditKind::Keep) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < script.size() && script[j].kind != EditKind::Keep) ++j;
        std::stable_partition(script.begin() + static_cast<std::ptrdiff_t>(i),
                              script.begin() + static_cast<std::ptrdiff_t>(j),
                              [](const EditOp& op) { return op.kind == EditKind::Delete; });
        i = j;
    }
}

namespace detail {

// Slides each group of flagged elements so that groups separated only by
// shifted copies merge, and every group ends as late as possible.
template <class T, class Equal>
void compact_changes(std::span<const T> s, std::vector<bool>& chg, Equal& equal) {
    const std::size_t n = s.size();
    std::size_t i = 0;
    while (true) {
        while (i < n && !chg[i]) ++i;
        if (i == n) return;
        std::size_t start = i, end = i;
        while (end < n && chg[end]) ++end;
        std::size_t size;
        do {
            size = end - start;
            while (start > 0 && equal(s[start - 1], s[end - 1])) {
                chg[--start] = true;
                chg[--end] = false;
                while (start > 0 && chg[start - 1]) --start;
            }
            while (end < n && equal(s[start], s[end])) {
                chg[start++] = false;
                chg[end++] = true;
                while (end < n && chg[end]) ++end;
            }
        } while (size != end - start);
        i = end;
    }
}

template <class T, class Equal>
EditScript compact_script(const EditScript& script, std::span<const T> old_seq, std::span<const T> new_seq,
                          Equal& equal) {
    std::vector<bool> del(old_seq.size(), false), ins(new_seq.size(), false);
    for (const auto& op : script) {
        if (op.kind == EditKind::Delete) del[op.old_index] = true;
        if (op.kind == EditKind::Insert) ins[op.new_index] = true;
    }
    compact_changes(old_seq, del, equal);
    compact_changes(new_seq, ins, equal);
    EditScript out;
    out.reserve(script.size());
    std::size_t i = 0, j = 0;
    while (i < old_seq.size() || j < new_seq.size()) {
        if (i < old_seq.size() && del[i])
            out.push_back({EditKind::Delete, i++, EditOp::npos});
        else if (j < new_seq.size() && ins[j])
            out.push_back({EditKind::Insert, EditOp::npos, j++});
        else
            out.push_back({EditKind::Keep, i++, j++});
    }
    return out;
}

}  // namespace detail

/// Shortest edit script turning `old_seq` into `new_seq`, comparing elements
/// with `equal`.
template <class T, class Equal = std::equal_to<T>>
EditScript diff_two_way(std::span<const T> old_seq, std::span<const T> new_seq, Equal equal = {}) {
    EditScript script;
    script.reserve(std::max(old_seq.size(), new_seq.size()));
    auto eq = [&](std::size_t i, std::size_t j) { return equal(old_seq[i], new_seq[j]); };
    detail::MyersDiff<decltype(eq)> myers(eq, script);
    myers.run(0, old_seq.size(), 0, new_seq.size());
    return detail::compact_script(script, old_seq, new_seq, equal);
}

template <class T, class Equal = std::equal_to<T>>
EditScript diff_two_way(const std::vector<T>& old_seq, const std::vector<T>& new_seq, Equal equal = {}) {
    return diff_two_way(std::span<const T>(old_seq), std::span<const T>(new_seq), equal);
}

/// Number of Insert + Delete steps.
inline std::size_t edit_distance(const EditScript& script) {
    return static_cast<std::size_t>(std::count_if(
        script.begin(), script.end(), [](const EditOp& op) { return op.kind != EditKind::Keep; }));
}

/// Minimal script whose matched pairs are mirror images when the arguments
/// are swapped: when skipping either element is optimal, the element that
/// orders first under `less` is skipped. Uses a quadratic LCS table and falls
/// back to diff_two_way above `max_cells`.
template <class T, class Equal = std::equal_to<T>, class Less = std::less<T>>
EditScript diff_two_way_symmetric(std::span<const T> old_seq, std::span<const T> new_seq, Equal equal = {},
                                  Less less = {}, std::size_t max_cells = std::size_t{1} << 22) {
    const std::size_t n = old_seq.size();
    const std::size_t m = new_seq.size();
    if ((n + 1) * (m + 1) > max_cells) return diff_two_way(old_seq, new_seq, equal);

    // lcs[i][j] = LCS length of old_seq[i..] and new_seq[j..]
    std::vector<std::uint32_t> lcs((n + 1) * (m + 1), 0);
    auto cell = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return lcs[i * (m + 1) + j]; };
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = m; j-- > 0;) {
            cell(i, j) = equal(old_seq[i], new_seq[j]) ? cell(i + 1, j + 1) + 1
                                                        : std::max(cell(i + 1, j), cell(i, j + 1));
        }
    }
    EditScript script;
    std::size_t i = 0, j = 0;
    while (i < n || j < m) {
        if (i < n && j < m && equal(old_seq[i], new_seq[j])) {
            script.push_back({EditKind::Keep, i++, j++});
        } else if (j == m) {
            script.push_back({EditKind::Delete, i++, EditOp::npos});
        } else if (i == n) {
            script.push_back({EditKind::Insert, EditOp::npos, j++});
        } else {
            const auto skip_old = cell(i + 1, j);
            const auto skip_new = cell(i, j + 1);
            bool drop_old = skip_old > skip_new || (skip_old == skip_new && less(old_seq[i], new_seq[j]));
            if (drop_old) {
                script.push_back({EditKind::Delete, i++, EditOp::npos});
            } else {
                script.push_back({EditKind::Insert, EditOp::npos, j++});
            }
        }
    }
    normalize_runs(script);
    return script;
}

/// Replays a script on `old_seq`; used by tests and invariants.
template <class T>
std::vector<T> apply_script(const EditScript& script, std::span<const T> old_seq, std::span<const T> new_seq) {
    std::vector<T> out;
    for (const auto& op : script) {
        if (op.kind == EditKind::Keep) out.push_back(old_seq[op.old_index]);
        if (op.kind == EditKind::Insert) out.push_back(new_seq[op.new_index]);
    }
    return out;
}

}  // namespace mergeweave
