#include <gtest/gtest.h>

#include "support.hpp"

using namespace mergeweave;
using mwtest::sig;

namespace {

LineConflict first_conflict(const std::string& file) {
    for (const auto& p : parse_conflict_markers(mwtest::slurp(std::string(MERGEWEAVE_DEMO_DIR) + "/" + file)))
        if (p.conflict) return LineConflict{0, p.a, p.b, p.o, std::nullopt, {}, {}};
    throw std::runtime_error("no conflict in " + file);
}

std::vector<TokenStream> all_sides(const TokenMergeOutcome& out, char which) {
    std::vector<TokenStream> picks;
    for (const auto& tc : out.conflicts) picks.push_back(which == 'a' ? tc.a : which == 'b' ? tc.b : tc.o);
    return picks;
}

}  // namespace

TEST(TokenDiff3, PickExampleLocalizesToOneToken) {
    auto out = token_diff3(first_conflict("pick.js"));
    ASSERT_EQ(out.kind, MergeOutcomeKind::SingleConflict);
    const auto& tc = out.conflicts.front();
    EXPECT_EQ(sig(tc.a), "11");
    EXPECT_EQ(sig(tc.b), "11 , z");
    EXPECT_EQ(sig(tc.o), "10");
    EXPECT_EQ(sig(tc.pref), "let x = max ( y ,");
    EXPECT_EQ(sig(tc.suff), ")");
}

TEST(TokenDiff3, GenerateExampleSplitsIntoTwoConflicts) {
    auto out = token_diff3(first_conflict("generate.js"));
    ASSERT_EQ(out.kind, MergeOutcomeKind::MultiConflict);
    ASSERT_EQ(out.conflicts.size(), 2u);
    const auto& c0 = out.conflicts[0];
    EXPECT_EQ(sig(c0.a), "return self . generateIntoBuffer ( function ( buffer ) {");
    EXPECT_TRUE(c0.o.empty());
    EXPECT_EQ(sig(c0.b).rfind("var splatArguments ;", 0), 0u);
    const auto& c1 = out.conflicts[1];
    EXPECT_EQ(sig(c1.a), "} ) ;");
    EXPECT_EQ(sig(c1.b), "}");
    EXPECT_TRUE(c1.o.empty());
}

TEST(TokenDiff3, IdenticalSidesMergeCleanly) {
    LineConflict lc{0, "f(a, b)\n", "f(a, b)\n", "f(a)\n", std::nullopt, {}, {}};
    auto out = token_diff3(lc);
    EXPECT_EQ(out.kind, MergeOutcomeKind::CleanMerge);
    EXPECT_TRUE(out.conflicts.empty());
    EXPECT_EQ(out.merged_text(), "f(a, b)\n");
}

TEST(TokenDiff3, DisjointTokenEditsOnAdjacentLinesMergeCleanly) {
    LineConflict lc{0, "x = 1;\ny = 20;\n", "x = 10;\ny = 2;\n", "x = 1;\ny = 2;\n", std::nullopt, {}, {}};
    auto out = token_diff3(lc);
    EXPECT_EQ(out.kind, MergeOutcomeKind::CleanMerge);
    EXPECT_EQ(out.merged_text(), "x = 10;\ny = 20;\n");
}

TEST(TokenDiff3, ShortSeparatorsAreFolded) {
    // the edits are one token apart; the separator "," is folded into one conflict
    LineConflict lc{0, "f(A,B)", "f(C,D)", "f(x,y)", std::nullopt, {}, {}};
    auto out = token_diff3(lc);
    ASSERT_EQ(out.conflicts.size(), 1u);
    EXPECT_EQ(sig(out.conflicts[0].a), "A , B");
    EXPECT_EQ(sig(out.conflicts[0].o), "x , y");
}

TEST(TokenDiff3, PrefSideSuffReproducesRegion) {
    std::mt19937_64 rng(29);
    std::size_t conflicts_seen = 0;
    for (int trial = 0; trial < 3000; ++trial) {
        auto o = mwtest::random_stream(rng, 12);
        auto a = mwtest::random_stream(rng, 12), b = mwtest::random_stream(rng, 12);
        LineConflict lc{0, detokenize(a), detokenize(b), detokenize(o), std::nullopt, {}, {}};
        auto out = token_diff3(lc);
        ASSERT_EQ(detokenize(reassemble(out.chunks, 'a')), lc.a);
        ASSERT_EQ(detokenize(reassemble(out.chunks, 'b')), lc.b);
        ASSERT_EQ(detokenize(reassemble(out.chunks, 'o')), lc.o);

        const auto with_a = assemble_region(out, all_sides(out, 'a'));
        for (const auto& tc : out.conflicts) {
            TokenStream s = tc.pref;
            s.insert(s.end(), tc.a.begin(), tc.a.end());
            s.insert(s.end(), tc.suff.begin(), tc.suff.end());
            ASSERT_EQ(detokenize(s), with_a);
            ++conflicts_seen;
        }
        if (out.kind == MergeOutcomeKind::CleanMerge) ASSERT_EQ(out.merged_text(), with_a);

        // separators between conflicts are at least kMinSeparatorTokens long
        std::size_t run = 0;
        bool after_conflict = false;
        for (const auto& c : out.chunks) {
            if (c.kind == ChunkKind::Conflict) {
                if (after_conflict) ASSERT_GE(run, kMinSeparatorTokens);
                after_conflict = true;
                run = 0;
            } else {
                run += c.merged.size();
            }
        }
    }
    EXPECT_GT(conflicts_seen, 1000u);
}
