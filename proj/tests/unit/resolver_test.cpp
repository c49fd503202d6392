#include <gtest/gtest.h>

#include "support.hpp"

using namespace mergeweave;
using mwtest::sig;

namespace {

const char* kPick =
    "function pick(y, z) {\n"
    "<<<<<<< A\n"
    "  let x = max(y, 11)\n"
    "||||||| O\n"
    "  var x = max(y, 10)\n"
    "=======\n"
    "  var x = max(y, 11, z)\n"
    ">>>>>>> B\n"
    "  return x\n"
    "}\n";

LabelProbs random_probs(std::mt19937_64& rng, bool with_zeros) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    LabelProbs p{};
    double z = 0;
    for (auto& v : p) {
        v = (with_zeros && u(rng) < 0.3) ? 0.0 : u(rng);
        z += v;
    }
    if (z == 0) {
        p[0] = 1;
        z = 1;
    }
    for (auto& v : p) v /= z;
    return p;
}

struct Best {
    double logprob = -std::numeric_limits<double>::infinity();
    std::set<std::string> texts;
};

// Enumerates every label sequence.
Best exhaustive(const TokenMergeOutcome& out, const std::vector<LabelProbs>& probs) {
    Best best;
    const std::size_t n = out.conflicts.size();
    std::vector<std::size_t> idx(n, 0);
    while (true) {
        double lp = 0;
        std::vector<TokenStream> picks;
        bool possible = true;
        for (std::size_t j = 0; j < n; ++j) {
            const auto l = kAllLabels[idx[j]];
            if (probs[j][idx[j]] <= 0) possible = false;
            lp += std::log(probs[j][idx[j]]);
            picks.push_back(apply_label(l, out.conflicts[j].a, out.conflicts[j].b, out.conflicts[j].o));
        }
        if (possible) {
            auto text = assemble_region(out, picks);
            if (lp > best.logprob + 1e-12) {
                best.logprob = lp;
                best.texts = {text};
            } else if (std::abs(lp - best.logprob) <= 1e-12) {
                best.texts.insert(text);
            }
        }
        std::size_t j = 0;
        while (j < n && ++idx[j] == kNumLabels) idx[j++] = 0;
        if (j == n) break;
    }
    return best;
}

TokenMergeOutcome random_outcome(std::mt19937_64& rng, std::size_t want) {
    while (true) {
        auto o = mwtest::random_stream(rng, 14);
        auto a = mwtest::random_stream(rng, 14), b = mwtest::random_stream(rng, 14);
        auto out = token_diff3(LineConflict{0, detokenize(a), detokenize(b), detokenize(o), std::nullopt, {}, {}});
        if (out.conflicts.size() == want) return out;
    }
}

}  // namespace

TEST(Beam, CleanOutcomeHasLogprobZero) {
    auto out = token_diff3(LineConflict{0, "x = 10;\ny = 2;\n", "x = 1;\ny = 20;\n", "x = 1;\ny = 2;\n",
                                        std::nullopt, {}, {}});
    HeuristicClassifier h;
    auto dec = decode_outcome(out, h);
    EXPECT_TRUE(dec.clean);
    ASSERT_EQ(dec.candidates.size(), 1u);
    EXPECT_EQ(dec.candidates[0].logprob, 0.0);
    EXPECT_EQ(dec.candidates[0].text, "x = 10;\ny = 20;\n");
}

TEST(Beam, FullWidthMatchesExhaustiveSearch) {
    std::mt19937_64 rng(47);
    for (std::size_t n = 1; n <= 3; ++n) {
        for (int trial = 0; trial < 60; ++trial) {
            auto out = random_outcome(rng, n);
            std::vector<LabelProbs> probs;
            for (std::size_t j = 0; j < n; ++j) probs.push_back(random_probs(rng, trial % 2 == 1));
            std::size_t M = 1;
            for (std::size_t j = 0; j < n; ++j) M *= kNumLabels;
            auto beam = beam_decode(out, probs, kNumLabels, M);
            auto best = exhaustive(out, probs);
            ASSERT_FALSE(beam.empty());
            ASSERT_NEAR(beam.front().logprob, best.logprob, 1e-9);
            ASSERT_TRUE(best.texts.count(beam.front().text));
            for (std::size_t k = 1; k < beam.size(); ++k) ASSERT_LE(beam[k].logprob, beam[k - 1].logprob);
            for (const auto& s : beam) ASSERT_TRUE(std::isfinite(s.logprob));
        }
    }
}

TEST(Beam, WidthOneIsGreedy) {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 100; ++trial) {
        auto out = random_outcome(rng, 2);
        std::vector<LabelProbs> probs = {random_probs(rng, false), random_probs(rng, false)};
        auto beam = beam_decode(out, probs, 3, 1);
        ASSERT_EQ(beam.size(), 1u);
        ASSERT_EQ(beam[0].labels[0], argmax_label(probs[0]));
        ASSERT_EQ(beam[0].labels[1], argmax_label(probs[1]));
    }
}

TEST(Beam, CandidatesAreDistinctTexts) {
    // no line of a or b occurs in o, so each ExclBase label repeats a plain one
    auto out = token_diff3(LineConflict{0, "f(1, q)\n", "f(2, q)\n", "f(0, q)\n", std::nullopt, {}, {}});
    FixedClassifier uniform(LabelProbs{0.2, 0.2, 0.2, 0.1, 0.1, 0.05, 0.05, 0.05, 0.05});
    DecodeOptions opt;
    opt.K = 9;
    opt.M = 9;
    auto dec = decode_outcome(out, uniform, opt);
    std::set<std::string> texts;
    for (const auto& c : dec.candidates) EXPECT_TRUE(texts.insert(c.text).second);
    EXPECT_LT(dec.candidates.size(), 9u);
}

TEST(Beam, RejectsBadOptions) {
    std::mt19937_64 rng(1);
    auto out = random_outcome(rng, 1);
    EXPECT_THROW(beam_decode(out, {}, 3, 5), std::invalid_argument);
    DecodeOptions bad;
    bad.K = 0;
    HeuristicClassifier h;
    EXPECT_THROW(decode_outcome(out, h, bad), std::invalid_argument);
    bad.K = 10;
    EXPECT_THROW(decode_outcome(out, h, bad), std::invalid_argument);
}

TEST(ResolveFile, PickExampleWithTakeB) {
    FixedClassifier take_b(ResolutionLabel::TakeB);
    auto r = resolve_file(kPick, take_b);
    EXPECT_EQ(r.status, ResolutionStatus::Resolved);
    EXPECT_EQ(r.file_text, "function pick(y, z) {\n  let x = max(y, 11, z)\n  return x\n}\n");
    ASSERT_EQ(r.per_conflict.size(), 1u);
    EXPECT_EQ(r.per_conflict[0].labels, std::vector<ResolutionLabel>{ResolutionLabel::TakeB});
    EXPECT_DOUBLE_EQ(r.per_conflict[0].logprob, 0.0);
}

TEST(ResolveFile, OracleUsesReferenceRegions) {
    OracleClassifier oracle;
    ResolveOptions opt;
    opt.reference_regions = {std::string("  let x = max(y, 11, z)\n")};
    auto r = resolve_file(kPick, oracle, opt);
    EXPECT_EQ(r.status, ResolutionStatus::Resolved);
    EXPECT_EQ(r.file_text, "function pick(y, z) {\n  let x = max(y, 11, z)\n  return x\n}\n");
}

TEST(ResolveFile, NoMarkersIsIdentity) {
    HeuristicClassifier h;
    auto r = resolve_file("int main() { return 0; }\n", h);
    EXPECT_EQ(r.status, ResolutionStatus::Resolved);
    EXPECT_TRUE(r.per_conflict.empty());
    EXPECT_EQ(r.file_text, "int main() { return 0; }\n");
}

TEST(ResolveFile, AbstainingKeepsMarkers) {
    AbstainClassifier abstain;
    auto r = resolve_file(kPick, abstain);
    EXPECT_EQ(r.status, ResolutionStatus::Abstained);
    EXPECT_EQ(r.file_text, kPick);
    EXPECT_FALSE(r.per_conflict[0].error.empty());
}

TEST(ResolveFile, ThresholdAbstention) {
    FixedClassifier spread(LabelProbs{0.3, 0.2, 0.1, 0.1, 0.1, 0.05, 0.05, 0.05, 0.05});
    ResolveOptions opt;
    opt.tau = 0.5;
    auto r = resolve_file(kPick, spread, opt);
    EXPECT_EQ(r.status, ResolutionStatus::Abstained);
    EXPECT_EQ(r.per_conflict[0].error, "below abstention threshold");
    opt.tau = 0.25;
    EXPECT_EQ(resolve_file(kPick, spread, opt).status, ResolutionStatus::Resolved);
}

TEST(ResolveFile, SyntaxFailureDemotesTheTopCandidate) {
    const std::string text =
        "f(\n"
        "<<<<<<< A\n"
        "  a\n"
        "||||||| O\n"
        "  (o\n"
        "=======\n"
        "  b\n"
        ">>>>>>> B\n"
        ")\n";
    // TakeBase reintroduces the unmatched "(", so TakeB is accepted instead
    FixedClassifier base_first(LabelProbs{0.1, 0.3, 0.6, 0, 0, 0, 0, 0, 0});
    auto r = resolve_file(text, base_first);
    ASSERT_TRUE(r.per_conflict[0].resolved);
    EXPECT_EQ(r.per_conflict[0].candidate_rank, 1u);
    EXPECT_EQ(r.per_conflict[0].labels.front(), ResolutionLabel::TakeB);
    EXPECT_TRUE(r.per_conflict[0].syntax_ok);
    EXPECT_EQ(r.file_text, "f(\n  b\n)\n");

    // only unparsable candidates: the conflict stays unresolved
    FixedClassifier only_base(ResolutionLabel::TakeBase);
    auto u = resolve_file(text, only_base);
    EXPECT_EQ(u.status, ResolutionStatus::Abstained);
    EXPECT_EQ(u.per_conflict[0].error, "every candidate failed the syntax check");
}

TEST(ResolveFile, GatingIsOffWhenTheLeftRenderingFails) {
    const std::string text =
        "f(\n"
        "<<<<<<< A\n"
        "  a, (\n"
        "||||||| O\n"
        "  o\n"
        "=======\n"
        "  b\n"
        ">>>>>>> B\n"
        ")\n";
    FixedClassifier take_a(ResolutionLabel::TakeA);
    auto r = resolve_file(text, take_a);
    EXPECT_EQ(r.status, ResolutionStatus::Resolved);
    EXPECT_FALSE(r.per_conflict[0].syntax_ok);
}

TEST(ResolveFile, EarlierResolutionsBecomeContext) {
    const std::string text =
        "<<<<<<< A\n"
        "first_a();\n"
        "||||||| O\n"
        "first_o();\n"
        "=======\n"
        "first_b();\n"
        ">>>>>>> B\n"
        "middle();\n"
        "<<<<<<< A\n"
        "second_a();\n"
        "||||||| O\n"
        "second_o();\n"
        "=======\n"
        "second_b();\n"
        ">>>>>>> B\n";
    std::vector<std::string> seen;
    FunctionClassifier spy([&](const ModelInput& in) {
        std::string ctx;
        for (const auto& s : in.a_o)
            if (s && !is_layout(*s)) ctx += s->text + " ";
        seen.push_back(ctx);
        return unit_mass(ResolutionLabel::TakeB);
    });
    ResolveOptions opt;
    opt.decode.context_budget = 64;
    auto r = resolve_file(text, spy, opt);
    ASSERT_EQ(r.status, ResolutionStatus::Resolved);
    ASSERT_EQ(seen.size(), 2u);
    // the first conflict sees the second as its left side
    EXPECT_NE(seen[0].find("second_a"), std::string::npos);
    // the second sees the first as resolved (TakeB), not as its left side
    EXPECT_NE(seen[1].find("first_b"), std::string::npos);
    EXPECT_EQ(seen[1].find("first_a"), std::string::npos);
    EXPECT_EQ(r.file_text, "first_b();\nmiddle();\nsecond_b();\n");
}

TEST(ResolveFile, PartialResolution) {
    const std::string text =
        "<<<<<<< A\nx = 1;\n||||||| O\nx = 0;\n=======\nx = 2;\n>>>>>>> B\n"
        "k();\n"
        "<<<<<<< A\ny = 1;\n||||||| O\ny = 0;\n=======\ny = 2;\n>>>>>>> B\n";
    int calls = 0;
    FunctionClassifier second_unsure([&](const ModelInput&) {
        return ++calls == 1 ? unit_mass(ResolutionLabel::TakeA) : LabelProbs{0.2, 0.2, 0.2, 0.1, 0.1, 0.05, 0.05, 0.05, 0.05};
    });
    ResolveOptions opt;
    opt.tau = 0.5;
    auto r = resolve_file(text, second_unsure, opt);
    EXPECT_EQ(r.status, ResolutionStatus::PartiallyResolved);
    EXPECT_EQ(r.file_text.substr(0, 12), "x = 1;\nk();\n");
    EXPECT_NE(r.file_text.find("<<<<<<< A\ny = 1;"), std::string::npos);
    auto j = to_json(r);
    EXPECT_EQ(j["status"], "partially-resolved");
    EXPECT_EQ(j["conflicts"].size(), 2u);
}

TEST(ResolveFile, TwoWayMarkersGetTheirBaseFromTheMergeBase) {
    const std::string base = "head();\nvar x = max(y, 10)\ntail();\n";
    const std::string two_way =
        "head();\n"
        "<<<<<<< HEAD\n"
        "let x = max(y, 11)\n"
        "=======\n"
        "var x = max(y, 11, z)\n"
        ">>>>>>> topic\n"
        "tail();\n";
    auto pieces = parse_conflict_markers(two_way);
    EXPECT_EQ(fill_base_sections(pieces, base), 1u);
    EXPECT_EQ(pieces[1].o, "var x = max(y, 10)\n");

    // with the base, the token merge keeps the left edit of "var"
    FixedClassifier take_b(ResolutionLabel::TakeB);
    ResolveOptions opt;
    opt.base_text = base;
    auto r = resolve_file(two_way, take_b, opt);
    EXPECT_EQ(r.file_text, "head();\nlet x = max(y, 11, z)\ntail();\n");

    // without it the whole line is one conflict and TakeB drops the left edit
    EXPECT_EQ(resolve_file(two_way, take_b).file_text, "head();\nvar x = max(y, 11, z)\ntail();\n");
}

TEST(ResolveFile, MismatchedBaseLeavesBlocksAlone) {
    auto pieces = parse_conflict_markers("head\n<<<<<<< a\nx\n=======\ny\n>>>>>>> b\ntail\n");
    EXPECT_EQ(fill_base_sections(pieces, "unrelated\n"), 0u);
    EXPECT_FALSE(pieces[1].has_base);
}
