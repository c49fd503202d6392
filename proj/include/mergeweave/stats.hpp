#pragma once

// Label statistics over a mined dataset.

#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "mergeweave/classifier.hpp"
#include "mergeweave/dataset.hpp"
#include "mergeweave/labels.hpp"

namespace mergeweave {

struct DatasetStats {
    std::size_t records = 0;
    std::size_t malformed = 0;
    LabelHistogram token_labels;
    LabelHistogram token_labels_nontrivial;
    LabelHistogram line_labels;  // one per line conflict present in the dataset
    std::map<std::string, std::size_t> languages;
    std::map<std::string, std::size_t> splits;
};

inline DatasetStats dataset_stats(const std::vector<DatasetRecord>& records, std::size_t malformed = 0) {
    DatasetStats s;
    s.records = records.size();
    s.malformed = malformed;
    std::set<std::tuple<std::string, std::string, std::string, std::size_t>> seen_lines;
    for (const auto& r : records) {
        auto label = outcome_from_ordinal(r.label);
        s.token_labels.add(label);
        if (!r.trivial) s.token_labels_nontrivial.add(label);
        ++s.languages[r.language];
        ++s.splits[r.split];
        if (seen_lines.emplace(r.meta.repo, r.meta.commit, r.meta.path, r.line_conflict_index).second)
            s.line_labels.add(outcome_from_ordinal(r.line_label));
    }
    return s;
}

inline nlohmann::ordered_json label_histogram_json(const LabelHistogram& h) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (auto l : kAllLabels) j[std::string(label_name(l))] = h.counts[static_cast<std::size_t>(ordinal(l))];
    j["Unrepresentable"] = h.counts[0];
    return j;
}

inline nlohmann::ordered_json to_json(const DatasetStats& s) {
    nlohmann::ordered_json j;
    j["records"] = s.records;
    j["malformed"] = s.malformed;
    j["coverage"] = s.token_labels.coverage();
    j["labels"] = label_histogram_json(s.token_labels);
    j["labels_nontrivial"] = label_histogram_json(s.token_labels_nontrivial);
    j["line_labels"] = label_histogram_json(s.line_labels);
    j["languages"] = s.languages;
    j["splits"] = s.splits;
    return j;
}

/// Text histogram with one row per label and a percentage column for each
/// of the given histograms.
inline std::string format_histograms(const std::vector<std::pair<std::string, const LabelHistogram*>>& cols) {
    std::ostringstream out;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-18s", "Label");
    out << buf;
    for (const auto& [name, h] : cols) {
        std::snprintf(buf, sizeof buf, " | %22s", name.c_str());
        out << buf;
    }
    out << '\n';
    auto row = [&](int ord) {
        std::snprintf(buf, sizeof buf, "%-18s", std::string(label_name(outcome_from_ordinal(ord))).c_str());
        out << buf;
        for (const auto& [name, h] : cols) {
            std::snprintf(buf, sizeof buf, " | %13zu (%5.1f%%)", h->counts[static_cast<std::size_t>(ord)],
                          100.0 * h->fraction(ord));
            out << buf;
        }
        out << '\n';
    };
    for (int ord = 1; ord <= static_cast<int>(kNumLabels); ++ord) row(ord);
    row(0);
    std::snprintf(buf, sizeof buf, "%-18s", "Total");
    out << buf;
    for (const auto& [name, h] : cols) {
        std::snprintf(buf, sizeof buf, " | %22zu", h->total);
        out << buf;
    }
    out << '\n';
    return out.str();
}

/// Add-one smoothed label frequencies of representable training records.
inline LabelProbs label_prior(const std::vector<DatasetRecord>& records, const std::string& split = "train") {
    LabelProbs p{};
    p.fill(1.0);
    double total = static_cast<double>(kNumLabels);
    for (const auto& r : records) {
        if (r.label == 0 || (!split.empty() && r.split != split)) continue;
        p[static_cast<std::size_t>(r.label - 1)] += 1.0;
        total += 1.0;
    }
    for (auto& v : p) v /= total;
    return p;
}

}  // namespace mergeweave
