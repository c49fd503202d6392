#pragma once

// JSONL dataset records: one per token conflict.

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "mergeweave/conflict.hpp"
#include "mergeweave/labels.hpp"

namespace mergeweave {

struct DatasetRecord {
    MergeMeta meta;
    std::size_t line_conflict_index = 0;
    std::size_t token_conflict_index = 0;
    std::string a, b, o;
    std::string resolution;
    std::string pref, suff;
    int label = 0;  // 1..9, 0 = Unrepresentable
    std::string language = "unknown";

    // appended after the fixed keys
    std::string split = "train";
    int line_label = 0;
    bool trivial = false;  // the line region was resolved by verbatim take-A or take-B
    bool octopus = false;  // merge commit had more than two parents
    bool aligned = true;   // resolution could be cut into per-conflict pieces
    std::optional<std::string> line_resolution;  // only when not aligned
};

inline nlohmann::ordered_json to_json(const DatasetRecord& r) {
    nlohmann::ordered_json j;
    j["meta"] = {{"repo", r.meta.repo}, {"commit", r.meta.commit}, {"path", r.meta.path}};
    j["line_conflict_index"] = r.line_conflict_index;
    j["token_conflict_index"] = r.token_conflict_index;
    j["a"] = r.a;
    j["b"] = r.b;
    j["o"] = r.o;
    j["resolution"] = r.resolution;
    j["pref"] = r.pref;
    j["suff"] = r.suff;
    j["label"] = r.label;
    j["language"] = r.language;
    j["split"] = r.split;
    j["line_label"] = r.line_label;
    j["trivial"] = r.trivial;
    j["octopus"] = r.octopus;
    j["aligned"] = r.aligned;
    if (r.line_resolution) j["line_resolution"] = *r.line_resolution;
    return j;
}

/// Throws nlohmann::json exceptions or std::invalid_argument on bad input.
inline DatasetRecord record_from_json(const nlohmann::json& j) {
    DatasetRecord r;
    const auto& m = j.at("meta");
    r.meta = {m.at("repo").get<std::string>(), m.at("commit").get<std::string>(), m.at("path").get<std::string>()};
    r.line_conflict_index = j.at("line_conflict_index").get<std::size_t>();
    r.token_conflict_index = j.at("token_conflict_index").get<std::size_t>();
    r.a = j.at("a").get<std::string>();
    r.b = j.at("b").get<std::string>();
    r.o = j.at("o").get<std::string>();
    r.resolution = j.at("resolution").get<std::string>();
    r.pref = j.at("pref").get<std::string>();
    r.suff = j.at("suff").get<std::string>();
    r.label = j.at("label").get<int>();
    if (r.label < 0 || r.label > static_cast<int>(kNumLabels)) throw std::invalid_argument("label out of range");
    r.language = j.value("language", std::string("unknown"));
    r.split = j.value("split", std::string("train"));
    r.line_label = j.value("line_label", 0);
    r.trivial = j.value("trivial", false);
    r.octopus = j.value("octopus", false);
    r.aligned = j.value("aligned", true);
    if (j.contains("line_resolution")) r.line_resolution = j["line_resolution"].get<std::string>();
    return r;
}

struct DatasetReadResult {
    std::vector<DatasetRecord> records;
    std::size_t malformed = 0;
};

inline DatasetReadResult read_dataset(std::istream& in) {
    DatasetReadResult out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            ++out.malformed;
            continue;
        }
        try {
            out.records.push_back(record_from_json(j));
        } catch (const std::exception&) {
            ++out.malformed;
        }
    }
    return out;
}

/// Records of one line-level conflict, in token order.
struct RecordGroup {
    std::vector<const DatasetRecord*> records;

    const DatasetRecord& front() const { return *records.front(); }
};

inline std::vector<RecordGroup> group_by_line_conflict(const std::vector<DatasetRecord>& records) {
    using Key = std::tuple<std::string, std::string, std::string, std::size_t>;
    std::map<Key, RecordGroup> groups;
    std::vector<Key> order;
    for (const auto& r : records) {
        Key key{r.meta.repo, r.meta.commit, r.meta.path, r.line_conflict_index};
        auto [it, fresh] = groups.try_emplace(key);
        if (fresh) order.push_back(key);
        it->second.records.push_back(&r);
    }
    std::vector<RecordGroup> out;
    for (const auto& k : order) {
        auto g = std::move(groups[k]);
        std::stable_sort(g.records.begin(), g.records.end(), [](const DatasetRecord* x, const DatasetRecord* y) {
            return x->token_conflict_index < y->token_conflict_index;
        });
        out.push_back(std::move(g));
    }
    return out;
}

/// Rebuilds the token merge outcome of a line region from its records. The
/// clean separator between conflicts j-1 and j is what pref_j adds beyond
/// pref_{j-1} followed by a_{j-1}. Returns nullopt when the records are
/// inconsistent.
inline std::optional<TokenMergeOutcome> outcome_from_records(const RecordGroup& g) {
    TokenMergeOutcome out;
    std::vector<std::string> seps;
    for (std::size_t j = 0; j < g.records.size(); ++j) {
        const auto& r = *g.records[j];
        if (r.token_conflict_index != j) return std::nullopt;
        if (j == 0) {
            seps.push_back(r.pref);
            continue;
        }
        const auto& prev = *g.records[j - 1];
        const auto head = prev.pref + prev.a;
        if (r.pref.compare(0, head.size(), head) != 0) return std::nullopt;
        seps.push_back(r.pref.substr(head.size()));
    }
    seps.push_back(g.records.back()->suff);

    auto push_clean = [&](const std::string& text) {
        if (text.empty()) return;
        TokenChunk c;
        c.kind = ChunkKind::Stable;
        c.merged = tokenize(text);
        c.a = c.o = c.b = c.merged;
        out.chunks.push_back(std::move(c));
    };
    for (std::size_t j = 0; j < g.records.size(); ++j) {
        const auto& r = *g.records[j];
        push_clean(seps[j]);
        TokenChunk c;
        c.kind = ChunkKind::Conflict;
        c.a = tokenize(r.a);
        c.b = tokenize(r.b);
        c.o = tokenize(r.o);
        out.chunks.push_back(c);

        TokenConflict tc;
        tc.index = j;
        tc.a = c.a;
        tc.b = c.b;
        tc.o = c.o;
        tc.pref = tokenize(r.pref);
        tc.suff = tokenize(r.suff);
        if (r.aligned) tc.resolution = tokenize(r.resolution);
        out.conflicts.push_back(std::move(tc));
    }
    push_clean(seps.back());
    out.kind = out.conflicts.size() == 1 ? MergeOutcomeKind::SingleConflict : MergeOutcomeKind::MultiConflict;
    return out;
}

/// Developer resolution of the whole line region.
inline std::string reference_region(const RecordGroup& g, const TokenMergeOutcome& outcome) {
    if (g.front().line_resolution) return *g.front().line_resolution;
    std::vector<TokenStream> picks;
    for (const auto* r : g.records) picks.push_back(tokenize(r->resolution));
    return assemble_region(outcome, picks);
}

}  // namespace mergeweave
