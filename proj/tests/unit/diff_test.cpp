#include <gtest/gtest.h>

#include "support.hpp"

using namespace mergeweave;

namespace {

std::vector<char> chars(std::string_view s) { return {s.begin(), s.end()}; }

// Textbook O(nm) LCS length.
std::size_t lcs_length(const std::vector<char>& x, const std::vector<char>& y) {
    std::vector<std::vector<std::size_t>> t(x.size() + 1, std::vector<std::size_t>(y.size() + 1, 0));
    for (std::size_t i = 1; i <= x.size(); ++i)
        for (std::size_t j = 1; j <= y.size(); ++j)
            t[i][j] = x[i - 1] == y[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
    return t[x.size()][y.size()];
}

std::vector<char> random_chars(std::mt19937_64& rng, std::size_t max_len, char top) {
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<int> c('a', top);
    std::vector<char> out(len(rng));
    for (auto& ch : out) ch = static_cast<char>(c(rng));
    return out;
}

// Maximal runs of flagged positions as [begin, end).
std::vector<std::pair<std::size_t, std::size_t>> runs(const std::vector<bool>& f) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < f.size();) {
        if (!f[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < f.size() && f[j]) ++j;
        out.emplace_back(i, j);
        i = j;
    }
    return out;
}

void check_script(const EditScript& s, const std::vector<char>& x, const std::vector<char>& y) {
    ASSERT_EQ(apply_script<char>(s, x, y), y);
    std::size_t i = 0, j = 0;
    for (const auto& op : s) {
        if (op.kind == EditKind::Keep) {
            ASSERT_EQ(op.old_index, i++);
            ASSERT_EQ(op.new_index, j++);
            ASSERT_EQ(x[op.old_index], y[op.new_index]);
        } else if (op.kind == EditKind::Delete) {
            ASSERT_EQ(op.old_index, i++);
        } else {
            ASSERT_EQ(op.new_index, j++);
        }
    }
    ASSERT_EQ(i, x.size());
    ASSERT_EQ(j, y.size());
}

}  // namespace

TEST(Diff, ClassicExampleDistance) {
    auto x = chars("abcabba"), y = chars("cbabac");
    auto s = diff_two_way(x, y);
    check_script(s, x, y);
    EXPECT_EQ(edit_distance(s), 5u);
}

TEST(Diff, EmptySides) {
    auto y = chars("abc");
    EXPECT_EQ(edit_distance(diff_two_way(std::vector<char>{}, y)), 3u);
    EXPECT_EQ(edit_distance(diff_two_way(y, std::vector<char>{})), 3u);
    EXPECT_TRUE(diff_two_way(std::vector<char>{}, std::vector<char>{}).empty());
}

TEST(Diff, DeletesComeBeforeInsertsInAChangeRun) {
    auto s = diff_two_way(chars("axb"), chars("ayb"));
    ASSERT_EQ(s.size(), 4u);
    EXPECT_EQ(s[1].kind, EditKind::Delete);
    EXPECT_EQ(s[2].kind, EditKind::Insert);
}

TEST(Diff, InsertionSlidesToLatestPosition) {
    // "b" inserted into "ab" -> "abb": the insertion lands after the kept b.
    auto s = diff_two_way(chars("ab"), chars("abb"));
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s.back().kind, EditKind::Insert);
    EXPECT_EQ(s.back().new_index, 2u);
}

TEST(Diff, ShiftedGroupsMerge) {
    // Inserting "xa" after the first 'a' of "ab" can be one run "ax" or "xa";
    // either way the inserted positions must be contiguous.
    auto s = diff_two_way(chars("ab"), chars("axab"));
    std::vector<bool> ins(4, false);
    for (const auto& op : s)
        if (op.kind == EditKind::Insert) ins[op.new_index] = true;
    EXPECT_EQ(runs(ins).size(), 1u);
}

TEST(Diff, MatchesLcsOracleAndIsCompact) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 3000; ++trial) {
        const char top = trial % 2 ? 'c' : 'f';
        auto x = random_chars(rng, 40, top), y = random_chars(rng, 40, top);
        auto s = diff_two_way(x, y);
        check_script(s, x, y);
        ASSERT_EQ(edit_distance(s), x.size() + y.size() - 2 * lcs_length(x, y));

        std::vector<bool> del(x.size(), false), ins(y.size(), false);
        for (const auto& op : s) {
            if (op.kind == EditKind::Delete) del[op.old_index] = true;
            if (op.kind == EditKind::Insert) ins[op.new_index] = true;
        }
        for (auto [b, e] : runs(del)) ASSERT_TRUE(e == x.size() || x[b] != x[e]) << "delete run can slide down";
        for (auto [b, e] : runs(ins)) ASSERT_TRUE(e == y.size() || y[b] != y[e]) << "insert run can slide down";
    }
}

TEST(Diff, SymmetricVariantMirrorsMatches) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 1500; ++trial) {
        auto x = random_chars(rng, 25, 'd'), y = random_chars(rng, 25, 'd');
        auto fwd = diff_two_way_symmetric<char>(x, y);
        auto rev = diff_two_way_symmetric<char>(y, x);
        check_script(fwd, x, y);
        ASSERT_EQ(edit_distance(fwd), x.size() + y.size() - 2 * lcs_length(x, y));
        std::set<std::pair<std::size_t, std::size_t>> pf, pr;
        for (const auto& op : fwd)
            if (op.kind == EditKind::Keep) pf.emplace(op.old_index, op.new_index);
        for (const auto& op : rev)
            if (op.kind == EditKind::Keep) pr.emplace(op.new_index, op.old_index);
        ASSERT_EQ(pf, pr);
    }
}

TEST(Diff, SymmetricFallsBackAboveCellLimit) {
    auto x = chars("abcdef"), y = chars("abXdef");
    auto s = diff_two_way_symmetric<char>(x, y, std::equal_to<char>{}, std::less<char>{}, 4);
    check_script(s, x, y);
    EXPECT_EQ(edit_distance(s), 2u);
}

TEST(Diff, TokenEqualityIgnoresKind) {
    Token t1{"x", TokenKind::Identifier}, t2{"x", TokenKind::Other};
    EXPECT_EQ(t1, t2);
    auto s = diff_two_way(mwtest::toks("a + b"), mwtest::toks("a - b"));
    EXPECT_EQ(edit_distance(s), 2u);
}
