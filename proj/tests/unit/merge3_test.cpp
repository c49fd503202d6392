#include <gtest/gtest.h>

#include "support.hpp"

using namespace mergeweave;

namespace {

std::string random_file(std::mt19937_64& rng, const std::string& base_text) {
    static const std::vector<std::string> pool = {"alpha();\n", "beta = 1;\n", "gamma(x);\n", "}\n", "{\n",
                                                  "return y;\n", "delta += 2;\n"};
    std::uniform_int_distribution<int> op(0, 9), pick(0, static_cast<int>(pool.size()) - 1);
    std::string out;
    for (auto line : split_lines(base_text)) {
        int r = op(rng);
        if (r == 0) continue;                          // delete
        if (r == 1) out += pool[static_cast<std::size_t>(pick(rng))];  // replace
        else out += line;
        if (r == 2) out += pool[static_cast<std::size_t>(pick(rng))];  // insert after
    }
    return out;
}

std::string random_base(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n(1, 14);
    std::string s;
    for (int k = 0, e = n(rng); k < e; ++k) s += "line" + std::to_string(k) + "();\n";
    return s;
}

}  // namespace

TEST(Diff3Lines, OneSidedChangesMergeCleanly) {
    auto chunks = diff3_lines("a\nb\nc\n", "A\nb\nc\n", "a\nb\nC\n");
    EXPECT_EQ(count_conflicts(chunks), 0u);
    EXPECT_EQ(reassemble(chunks, 'o'), "a\nb\nc\n");
    std::string merged;
    for (const auto& c : chunks) merged += c.merged;
    EXPECT_EQ(merged, "A\nb\nC\n");
}

TEST(Diff3Lines, IdenticalChangesAreMerged) {
    auto chunks = diff3_lines("a\nb\n", "a\nX\n", "a\nX\n");
    EXPECT_EQ(count_conflicts(chunks), 0u);
    bool saw_merged = false;
    for (const auto& c : chunks) saw_merged |= c.kind == ChunkKind::Merged;
    EXPECT_TRUE(saw_merged);
}

TEST(Diff3Lines, PickExampleConflict) {
    auto chunks = diff3_lines("let x = max(y, 10)\n", "let x = max(y, 11)\n", "let x = max(y, 10, z)\n");
    ASSERT_EQ(count_conflicts(chunks), 1u);
    auto lcs = line_conflicts(chunks);
    ASSERT_EQ(lcs.size(), 1u);
    EXPECT_EQ(lcs[0].a, "let x = max(y, 11)\n");
    EXPECT_EQ(lcs[0].o, "let x = max(y, 10)\n");
    EXPECT_EQ(lcs[0].b, "let x = max(y, 10, z)\n");
}

TEST(Diff3Lines, PrefixAndSuffixUseLeftForOtherConflicts) {
    auto chunks = diff3_lines("p\n1\nq\n2\nr\n", "p\nA1\nq\nA2\nr\n", "p\nB1\nq\nB2\nr\n");
    auto lcs = line_conflicts(chunks);
    ASSERT_EQ(lcs.size(), 2u);
    EXPECT_EQ(lcs[0].prefix, "p\n");
    EXPECT_EQ(lcs[0].suffix, "q\nA2\nr\n");
    EXPECT_EQ(lcs[1].prefix, "p\nA1\nq\n");
    EXPECT_EQ(lcs[1].index, 1u);
}

TEST(Diff3Lines, ReassemblyReproducesEveryInput) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 2000; ++trial) {
        auto o = random_base(rng);
        auto a = random_file(rng, o), b = random_file(rng, o);
        auto chunks = diff3_lines(o, a, b);
        ASSERT_EQ(reassemble(chunks, 'a'), a);
        ASSERT_EQ(reassemble(chunks, 'b'), b);
        ASSERT_EQ(reassemble(chunks, 'o'), o);
        for (const auto& c : chunks) {
            if (c.kind == ChunkKind::Stable) ASSERT_TRUE(c.a == c.o && c.b == c.o);
            if (c.kind == ChunkKind::Merged) ASSERT_TRUE(c.a == c.o || c.b == c.o || c.a == c.b);
            if (c.kind == ChunkKind::Conflict) ASSERT_TRUE(c.a != c.o && c.b != c.o && c.a != c.b);
        }
    }
}

TEST(Diff3Lines, AgreesWithGitMergeFile) {
    mwtest::TempDir tmp("merge3");
    std::mt19937_64 rng(23);
    int trials = 300, agree = 0, text_equal = 0, both_clean = 0;
    for (int trial = 0; trial < trials; ++trial) {
        auto o = random_base(rng);
        auto a = random_file(rng, o), b = random_file(rng, o);
        auto ours = diff3_lines(o, a, b);
        auto git = git_merge_file(a, o, b, tmp.path());
        const bool our_conflict = count_conflicts(ours) > 0;
        agree += our_conflict == (git.conflicts > 0);
        if (!our_conflict && git.conflicts == 0) {
            ++both_clean;
            std::string merged;
            for (const auto& c : ours) merged += c.merged;
            text_equal += merged == git.text;
        }
    }
    EXPECT_GE(agree, trials * 95 / 100);
    EXPECT_EQ(text_equal, both_clean);
}

TEST(Markers, RenderParseRoundTrip) {
    auto chunks = diff3_lines("p\n1\nq\n", "p\nA\nq\n", "p\nB\nq\n");
    auto text = render_conflicts(chunks, {"ours", "base", "theirs"});
    EXPECT_EQ(text, "p\n<<<<<<< ours\nA\n||||||| base\n1\n=======\nB\n>>>>>>> theirs\nq\n");
    auto pieces = parse_conflict_markers(text);
    ASSERT_EQ(pieces.size(), 3u);
    EXPECT_FALSE(pieces[0].conflict);
    EXPECT_EQ(pieces[0].text, "p\n");
    ASSERT_TRUE(pieces[1].conflict);
    EXPECT_TRUE(pieces[1].has_base);
    EXPECT_EQ(pieces[1].a, "A\n");
    EXPECT_EQ(pieces[1].o, "1\n");
    EXPECT_EQ(pieces[1].b, "B\n");
    EXPECT_EQ(pieces[1].raw, "<<<<<<< ours\nA\n||||||| base\n1\n=======\nB\n>>>>>>> theirs\n");
    EXPECT_EQ(pieces[2].text, "q\n");
}

TEST(Markers, TwoWayBlocksHaveNoBase) {
    auto pieces = parse_conflict_markers("<<<<<<< HEAD\nx\n=======\ny\n>>>>>>> topic\n");
    ASSERT_EQ(pieces.size(), 1u);
    EXPECT_TRUE(pieces[0].conflict);
    EXPECT_FALSE(pieces[0].has_base);
    EXPECT_EQ(pieces[0].a, "x\n");
    EXPECT_EQ(pieces[0].b, "y\n");
}

TEST(Markers, CrlfMarkersAndLookalikes) {
    auto pieces = parse_conflict_markers("<<<<<<< a\r\nx\r\n=======\r\ny\r\n>>>>>>> b\r\n========== not a marker\n");
    ASSERT_EQ(pieces.size(), 2u);
    EXPECT_EQ(pieces[0].a, "x\r\n");
    EXPECT_EQ(pieces[1].text, "========== not a marker\n");
    EXPECT_FALSE(has_conflict_markers("a <<<<<<< b\n"));
}

TEST(Markers, MalformedInputThrows) {
    EXPECT_THROW(parse_conflict_markers("<<<<<<< a\nx\n"), MarkerParseError);
    EXPECT_THROW(parse_conflict_markers("x\n=======\ny\n>>>>>>> b\n"), MarkerParseError);
    EXPECT_EQ(parse_conflict_markers("Title\n=======\n").front().text, "Title\n=======\n");
    EXPECT_THROW(parse_conflict_markers("<<<<<<< a\n<<<<<<< b\n"), MarkerParseError);
}
