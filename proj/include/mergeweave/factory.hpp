#pragma once

// Building a classifier from its textual spec.
//
//   heuristic | oracle | abstain | fixed:<ordinal or label name>
//   cmd:<command line>  (split into words like a shell)
//   tcp:<host>:<port>

#include <wordexp.h>

#include <memory>
#include <string>
#include <vector>

#include "mergeweave/classifier.hpp"
#include "mergeweave/config.hpp"

namespace mergeweave {

inline ResolutionLabel parse_label(const std::string& s) {
    for (auto l : kAllLabels)
        if (s == label_name(l)) return l;
    try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used == s.size()) return label_from_ordinal(v);
    } catch (const std::exception&) {
    }
    throw ConfigError("unknown label '" + s + "'");
}

/// Shell-style word splitting (quotes, escapes, variables); command
/// substitution is refused.
inline std::vector<std::string> split_command(const std::string& cmd) {
    wordexp_t w;
    const int rc = ::wordexp(cmd.c_str(), &w, WRDE_NOCMD);
    if (rc != 0) {
        if (rc == WRDE_NOSPACE) ::wordfree(&w);
        throw ConfigError("cannot parse command '" + cmd + "'");
    }
    std::vector<std::string> argv(w.we_wordv, w.we_wordv + w.we_wordc);
    ::wordfree(&w);
    if (argv.empty()) throw ConfigError("empty command");
    return argv;
}

struct ClassifierOptions {
    std::chrono::milliseconds timeout = kDefaultScorerTimeout;
    bool fallback_to_heuristic = false;  // external backends only
};

inline std::unique_ptr<Classifier> make_classifier(const std::string& spec, const ClassifierOptions& opt = {}) {
    auto starts = [&](std::string_view p) { return spec.rfind(p, 0) == 0; };
    std::unique_ptr<Classifier> external;
    if (spec == "heuristic") return std::make_unique<HeuristicClassifier>();
    if (spec == "oracle") return std::make_unique<OracleClassifier>();
    if (spec == "abstain") return std::make_unique<AbstainClassifier>();
    if (starts("fixed:")) return std::make_unique<FixedClassifier>(parse_label(spec.substr(6)));
    if (starts("cmd:")) {
        external = ExternalClassifier::spawn(split_command(spec.substr(4)), opt.timeout);
    } else if (starts("tcp:")) {
        auto rest = spec.substr(4);
        auto colon = rest.rfind(':');
        if (colon == std::string::npos) throw ConfigError("tcp spec needs host:port");
        external = ExternalClassifier::connect(rest.substr(0, colon), rest.substr(colon + 1), opt.timeout);
    } else {
        throw ConfigError("unknown classifier '" + spec + "'");
    }
    if (opt.fallback_to_heuristic)
        return std::make_unique<FallbackClassifier>(std::move(external), std::make_unique<HeuristicClassifier>());
    return external;
}

}  // namespace mergeweave
