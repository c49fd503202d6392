// Walks one conflicted file through the pipeline: markers, token-level
// diff3, aligned classifier input, label distribution and beam candidates.
//
//   walkthrough [FILE [RESOLVED]]
//
// With RESOLVED the developer's regions are cut into per-token resolutions
// and their labels are printed too.

#include <fstream>
#include <iostream>
#include <sstream>

#include "mergeweave/mergeweave.hpp"

namespace mw = mergeweave;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string show(const mw::TokenStream& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (mw::is_layout(s[i])) continue;
        if (out.size() > 1) out += ' ';
        out += s[i].text;
    }
    return out + "]";
}

std::string show(const std::vector<mw::Slot>& s) {
    std::string out;
    for (const auto& t : s) out += (t ? t->text : "_") + " ";
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string path = argc > 1 ? argv[1] : MERGEWEAVE_DEMO_DIR "/pick.js";
    const std::string text = slurp(path);
    std::vector<mw::ExtractedConflict> reference;
    if (argc > 2) reference = mw::extract_resolution_regions(text, slurp(argv[2]));

    mw::HeuristicClassifier clf;
    std::size_t index = 0;
    for (const auto& piece : mw::parse_conflict_markers(text)) {
        if (!piece.conflict) continue;
        mw::LineConflict lc{index, piece.a, piece.b, piece.o, std::nullopt, {}, {}};
        if (index < reference.size() && reference[index].extractable) lc.resolution = reference[index].conflict.resolution;
        std::cout << "== line conflict " << index++ << "\n";

        auto outcome = mw::token_diff3(lc);
        if (lc.resolution) mw::attach_resolutions(outcome, *lc.resolution);
        std::cout << "token conflicts: " << outcome.conflicts.size() << "\n";
        for (const auto& tc : outcome.conflicts) {
            std::cout << "  a=" << show(tc.a) << " o=" << show(tc.o) << " b=" << show(tc.b);
            if (tc.resolution) std::cout << "  r=" << show(*tc.resolution) << " label=" << mw::label_name(mw::extract_label(tc));
            std::cout << "\n";
            auto in = mw::build_model_input(tc, 8);
            std::cout << "    a_o: " << show(in.a_o) << "\n    o_a: " << show(in.o_a) << "\n    d_ao: ";
            for (auto e : in.d_ao) std::cout << mw::action_code(e);
            std::cout << "\n";
        }

        auto dec = mw::decode_outcome(outcome, clf);
        for (std::size_t j = 0; j < dec.probs.size(); ++j) {
            std::cout << "  p(label | conflict " << j << "):";
            for (auto l : mw::ranked_labels(dec.probs[j])) {
                if (dec.probs[j][mw::class_index(l)] < 0.05) break;
                std::printf(" %s=%.2f", std::string(mw::label_name(l)).c_str(), dec.probs[j][mw::class_index(l)]);
            }
            std::cout << "\n";
        }
        for (const auto& c : dec.candidates) {
            std::printf("  candidate p=%.3f ", std::exp(c.logprob));
            for (auto l : c.labels) std::cout << mw::label_name(l) << ' ';
            std::cout << "\n" << c.text;
        }
    }

    mw::ResolveOptions opt;
    opt.language = mw::language_from_path(path);
    auto result = mw::resolve_file(text, clf, opt);
    std::cout << "== resolved file (" << mw::status_name(result.status) << ")\n" << result.file_text;
    return 0;
}
