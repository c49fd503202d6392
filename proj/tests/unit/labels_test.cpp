#include <gtest/gtest.h>

#include "support.hpp"

using namespace mergeweave;
using mwtest::sig;
using mwtest::toks;

namespace {

std::string apply_text(ResolutionLabel l, std::string_view a, std::string_view b, std::string_view o) {
    return detokenize(apply_label(l, toks(a), toks(b), toks(o)));
}

// Lines of a sample file without its first `skip_head` and last `skip_tail` lines.
std::string region_of(const std::string& file, std::size_t skip_head, std::size_t skip_tail) {
    auto lines = split_lines(mwtest::slurp(std::string(MERGEWEAVE_DEMO_DIR) + "/" + file));
    std::string out;
    for (std::size_t k = skip_head; k + skip_tail < lines.size(); ++k) out += lines[k];
    return out;
}

LineConflict sample_conflict(const std::string& file) {
    for (const auto& p : parse_conflict_markers(mwtest::slurp(std::string(MERGEWEAVE_DEMO_DIR) + "/" + file)))
        if (p.conflict) return LineConflict{0, p.a, p.b, p.o, std::nullopt, {}, {}};
    throw std::runtime_error("no conflict");
}

}  // namespace

TEST(Labels, OrdinalsAndNames) {
    EXPECT_EQ(kAllLabels.size(), 9u);
    for (int v = 1; v <= 9; ++v) {
        EXPECT_EQ(ordinal(label_from_ordinal(v)), v);
        EXPECT_EQ(class_index(label_from_ordinal(v)), static_cast<std::size_t>(v - 1));
    }
    EXPECT_FALSE(outcome_from_ordinal(0).has_value());
    EXPECT_THROW(label_from_ordinal(10), std::out_of_range);
    EXPECT_EQ(label_name(ResolutionLabel::ConcatBAExclBase), "ConcatBAExclBase");
    EXPECT_EQ(label_name(std::nullopt), "Unrepresentable");
}

TEST(Labels, ApplyEachLabel) {
    const std::string a = "x();\nkeep();\n", b = "y();\nkeep();\n", o = "keep();\n";
    EXPECT_EQ(apply_text(ResolutionLabel::TakeA, a, b, o), a);
    EXPECT_EQ(apply_text(ResolutionLabel::TakeB, a, b, o), b);
    EXPECT_EQ(apply_text(ResolutionLabel::TakeBase, a, b, o), o);
    EXPECT_EQ(apply_text(ResolutionLabel::ConcatAB, a, b, o), a + b);
    EXPECT_EQ(apply_text(ResolutionLabel::ConcatBA, a, b, o), b + a);
    EXPECT_EQ(apply_text(ResolutionLabel::TakeAExclBase, a, b, o), "x();\n");
    EXPECT_EQ(apply_text(ResolutionLabel::TakeBExclBase, a, b, o), "y();\n");
    EXPECT_EQ(apply_text(ResolutionLabel::ConcatABExclBase, a, b, o), "x();\ny();\n");
    EXPECT_EQ(apply_text(ResolutionLabel::ConcatBAExclBase, a, b, o), "y();\nx();\n");
}

TEST(Labels, ExclBaseMatchesTrimmedLines) {
    auto kept = exclude_base_lines(toks("  keep();  \nnew();\n"), toks("keep();\n"));
    EXPECT_EQ(detokenize(kept), "new();\n");
    // empty base leaves the side untouched
    EXPECT_EQ(detokenize(exclude_base_lines(toks("a\n"), {})), "a\n");
}

TEST(Labels, ExtractionPicksLowestMatchingLabel) {
    // a == b: TakeA and TakeB coincide, TakeA wins
    EXPECT_EQ(extract_label(toks("f(1)"), toks("f(1)"), toks("f(0)"), toks("f(1)")), ResolutionLabel::TakeA);
    const auto a = toks("x;\n"), b = toks("y;\n"), o = toks("z;\n");
    EXPECT_EQ(extract_label(a, b, o, toks("y;\n")), ResolutionLabel::TakeB);
    EXPECT_EQ(extract_label(a, b, o, toks("z;\n")), ResolutionLabel::TakeBase);
    EXPECT_EQ(extract_label(a, b, o, toks("x;\ny;\n")), ResolutionLabel::ConcatAB);
    EXPECT_EQ(extract_label(a, b, o, toks("y;\nx;\n")), ResolutionLabel::ConcatBA);
    EXPECT_FALSE(extract_label(a, b, o, toks("w;\n")).has_value());
}

TEST(Labels, ComparisonCollapsesWhitespaceRuns) {
    EXPECT_EQ(extract_label(toks("f(a, b)"), toks("g()"), toks(""), toks("  f(a,\t  b)\n\n")), ResolutionLabel::TakeA);
    EXPECT_TRUE(same_resolution(toks("a  b\n"), toks("a b")));
    // whitespace between tokens is collapsed, not removed
    EXPECT_FALSE(same_resolution(toks("f(a,b)"), toks("f(a, b)")));
}

TEST(Labels, PickExampleIsTakeB) {
    auto out = token_diff3(sample_conflict("pick.js"));
    ASSERT_TRUE(attach_resolutions(out, "  let x = max(y, 11, z)\n"));
    ASSERT_EQ(out.conflicts.size(), 1u);
    EXPECT_EQ(sig(*out.conflicts[0].resolution), "11 , z");
    EXPECT_EQ(extract_label(out.conflicts[0]), ResolutionLabel::TakeB);
}

TEST(Labels, GenerateExampleIsConcatABThenConcatBA) {
    auto out = token_diff3(sample_conflict("generate.js"));
    ASSERT_TRUE(attach_resolutions(out, region_of("generate.resolved.js", 2, 1)));
    ASSERT_EQ(out.conflicts.size(), 2u);
    EXPECT_EQ(extract_label(out.conflicts[0]), ResolutionLabel::ConcatAB);
    EXPECT_EQ(extract_label(out.conflicts[1]), ResolutionLabel::ConcatBA);
}

TEST(Labels, SplitFailsWhenAnchorsAreMissing) {
    LineConflict lc{0, "f(A, 1)\n", "f(B, 1)\n", "f(x, 1)\n", std::nullopt, {}, {}};
    auto out = token_diff3(lc);
    EXPECT_FALSE(attach_resolutions(out, "g(A, 2)\n"));
    EXPECT_TRUE(attach_resolutions(out, "f(B, 1)\n"));
    EXPECT_EQ(extract_label(out.conflicts[0]), ResolutionLabel::TakeB);
}

TEST(Labels, RoundTripOnRandomConflicts) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 3000; ++trial) {
        auto a = mwtest::random_stream(rng, 8), b = mwtest::random_stream(rng, 8), o = mwtest::random_stream(rng, 8);
        for (auto l : kAllLabels) {
            auto r = apply_label(l, a, b, o);
            auto got = extract_label(a, b, o, r);
            ASSERT_TRUE(got.has_value());
            ASSERT_LE(ordinal(*got), ordinal(l));
            ASSERT_TRUE(same_resolution(apply_label(*got, a, b, o), r));
        }
    }
}

TEST(Labels, ExclBaseIsIdempotent) {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 2000; ++trial) {
        auto s = mwtest::random_stream(rng, 10), o = mwtest::random_stream(rng, 10);
        auto once = exclude_base_lines(s, o);
        ASSERT_EQ(detokenize(exclude_base_lines(once, o)), detokenize(once));
    }
}

TEST(Labels, ConcatOfEqualSidesExtractsAsTakeA) {
    // when a == b every concatenation doubles the text, so TakeA must win
    auto a = toks("k = 1;\n");
    EXPECT_EQ(extract_label(a, a, toks("k = 0;\n"), a), ResolutionLabel::TakeA);
    auto doubled = apply_label(ResolutionLabel::ConcatBA, a, a, toks("k = 0;\n"));
    EXPECT_EQ(extract_label(a, a, toks("k = 0;\n"), doubled), ResolutionLabel::ConcatAB);
}

TEST(Labels, Histogram) {
    std::vector<LabelOutcome> v = {ResolutionLabel::TakeA, ResolutionLabel::TakeA, ResolutionLabel::TakeB,
                                   std::nullopt};
    auto h = label_distribution(v);
    EXPECT_EQ(h.total, 4u);
    EXPECT_EQ(h.counts[1], 2u);
    EXPECT_EQ(h.counts[0], 1u);
    EXPECT_DOUBLE_EQ(h.fraction(1), 0.5);
    EXPECT_DOUBLE_EQ(h.coverage(), 0.75);
    EXPECT_DOUBLE_EQ(LabelHistogram{}.coverage(), 0.0);
}
