#pragma once

// Evaluation metrics: exact match modulo whitespace, BLEU-4, fraction merged,
// syntax agreement.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mergeweave/classifier.hpp"
#include "mergeweave/dataset.hpp"
#include "mergeweave/resolver.hpp"
#include "mergeweave/syntax.hpp"

namespace mergeweave {

// ---------------------------------------------------------------------------
// BLEU-4

/// Clipped n-gram matches and candidate n-gram counts for n = 1..4, plus
/// lengths.
struct BleuStats {
    std::array<std::size_t, 4> matches{};
    std::array<std::size_t, 4> totals{};
    std::size_t cand_len = 0;
    std::size_t ref_len = 0;

    BleuStats& operator+=(const BleuStats& o) {
        for (std::size_t n = 0; n < 4; ++n) {
            matches[n] += o.matches[n];
            totals[n] += o.totals[n];
        }
        cand_len += o.cand_len;
        ref_len += o.ref_len;
        return *this;
    }
};

inline std::vector<std::string> bleu_tokens(std::string_view text) {
    std::vector<std::string> out;
    for (auto& t : tokenize(text))
        if (!is_layout(t)) out.push_back(std::move(t.text));
    return out;
}

inline BleuStats bleu_stats(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
    BleuStats s;
    s.cand_len = cand.size();
    s.ref_len = ref.size();
    for (std::size_t n = 1; n <= 4; ++n) {
        std::map<std::vector<std::string>, std::size_t> ref_counts, cand_counts;
        for (std::size_t i = 0; i + n <= ref.size(); ++i) ++ref_counts[{ref.begin() + i, ref.begin() + i + n}];
        for (std::size_t i = 0; i + n <= cand.size(); ++i) ++cand_counts[{cand.begin() + i, cand.begin() + i + n}];
        std::size_t m = 0, c = 0;
        for (const auto& [gram, cnt] : cand_counts) {
            c += cnt;
            auto it = ref_counts.find(gram);
            if (it != ref_counts.end()) m += std::min(cnt, it->second);
        }
        s.matches[n - 1] = m;
        s.totals[n - 1] = c;
    }
    return s;
}

/// Uniform weights and brevity penalty. Unigram precision is unsmoothed;
/// orders 2..4 use add-one smoothing (m + 1) / (c + 1).
inline double bleu_from_stats(const BleuStats& s) {
    if (s.cand_len == 0) return s.ref_len == 0 ? 1.0 : 0.0;
    if (s.matches[0] == 0) return 0.0;
    double log_sum = std::log(static_cast<double>(s.matches[0]) / static_cast<double>(s.totals[0]));
    for (std::size_t n = 1; n < 4; ++n)
        log_sum += std::log((static_cast<double>(s.matches[n]) + 1.0) / (static_cast<double>(s.totals[n]) + 1.0));
    const double bp = s.cand_len >= s.ref_len
                          ? 1.0
                          : std::exp(1.0 - static_cast<double>(s.ref_len) / static_cast<double>(s.cand_len));
    return bp * std::exp(log_sum / 4.0);
}

inline double bleu4(std::string_view candidate, std::string_view reference) {
    return bleu_from_stats(bleu_stats(bleu_tokens(candidate), bleu_tokens(reference)));
}

// ---------------------------------------------------------------------------
// Reports

struct EvalCounts {
    std::size_t total = 0;
    std::size_t attempted = 0;
    std::size_t exact_match = 0;
    std::size_t syntax_ok = 0;
};

struct EvalMetrics {
    EvalCounts counts;
    double precision = 0, recall = 0, f_score = 0, bleu4 = 0, bleu4_sentence_mean = 0, fraction_merged = 0,
           syntax_correct = 0;
};

struct EvalReport {
    EvalMetrics overall;
    std::map<std::string, EvalMetrics> per_language;
    std::size_t malformed = 0;
    std::string unit = "line";  // "line" or "token"
    std::string classifier;
};

/// Accumulates per-item outcomes into metrics.
class MetricsAccumulator {
public:
    void add(bool attempted, bool exact, bool syntax_ok, std::string_view candidate, std::string_view reference) {
        ++counts_.total;
        if (!attempted) return;
        ++counts_.attempted;
        counts_.exact_match += exact;
        counts_.syntax_ok += syntax_ok;
        auto s = bleu_stats(bleu_tokens(candidate), bleu_tokens(reference));
        corpus_ += s;
        sentence_sum_ += bleu_from_stats(s);
    }

    EvalMetrics finish() const {
        EvalMetrics m;
        m.counts = counts_;
        const auto att = static_cast<double>(counts_.attempted);
        const auto tot = static_cast<double>(counts_.total);
        m.precision = counts_.attempted ? static_cast<double>(counts_.exact_match) / att : 0.0;
        m.recall = counts_.total ? static_cast<double>(counts_.exact_match) / tot : 0.0;
        m.f_score = (m.precision + m.recall) > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
        m.fraction_merged = counts_.total ? att / tot : 0.0;
        m.syntax_correct = counts_.attempted ? static_cast<double>(counts_.syntax_ok) / att : 0.0;
        m.bleu4 = counts_.attempted ? bleu_from_stats(corpus_) : 0.0;
        m.bleu4_sentence_mean = counts_.attempted ? sentence_sum_ / att : 0.0;
        return m;
    }

private:
    EvalCounts counts_;
    BleuStats corpus_;
    double sentence_sum_ = 0.0;
};

/// Syntax agreement for a region that is not a whole program: the candidate
/// leaves the same unmatched brackets and string state as the developer's
/// resolution.
inline bool region_syntax_agrees(std::string_view candidate, std::string_view reference, std::string_view language) {
    const auto c = scan_brackets(candidate, language);
    const auto r = scan_brackets(reference, language);
    return c.open == r.open && c.stray == r.stray && c.unterminated == r.unterminated;
}

struct EvalOptions {
    DecodeOptions decode;
    double tau = 0.0;
    bool token_level = false;        // score each token conflict on its own
    bool representable_only = false; // drop line conflicts with any label-0 record
    std::string split = "test";      // "" keeps every split
    std::size_t workers = 1;
};

/// Per-item result before reduction.
struct EvalItem {
    std::string language;
    bool attempted = false;
    bool exact = false;
    bool syntax_ok = false;
    std::string candidate, reference;
};

inline std::vector<EvalItem> evaluate_group(const RecordGroup& g, Classifier& clf, const EvalOptions& opt) {
    std::vector<EvalItem> items;
    auto outcome = outcome_from_records(g);
    const auto& lang = g.front().language;
    if (!outcome) return items;
    if (opt.token_level) {
        for (std::size_t j = 0; j < outcome->conflicts.size(); ++j) {
            const auto& tc = outcome->conflicts[j];
            EvalItem it;
            it.language = lang;
            it.reference = g.records[j]->resolution;
            auto in = build_model_input(tc, opt.decode.context_budget);
            if (tc.resolution) in.reference_label = extract_label(tc);
            auto slot = clf.predict_batch(std::span<const ModelInput>(&in, 1)).front();
            if (slot.ok()) {
                const auto& p = slot.prediction->probs;
                auto label = argmax_label(p);
                if (p[class_index(label)] >= opt.tau) {
                    it.attempted = true;
                    it.candidate = detokenize(apply_label(label, tc.a, tc.b, tc.o));
                    it.exact = g.records[j]->aligned && equal_modulo_whitespace(it.candidate, it.reference);
                    it.syntax_ok = region_syntax_agrees(it.candidate, it.reference, lang);
                }
            }
            items.push_back(std::move(it));
        }
        return items;
    }
    EvalItem it;
    it.language = lang;
    it.reference = reference_region(g, *outcome);
    DecodeResult dec;
    try {
        dec = decode_outcome(*outcome, clf, opt.decode);
    } catch (const std::exception& e) {
        dec.error = e.what();
    }
    if (!dec.error && !dec.candidates.empty() && std::exp(dec.candidates.front().logprob) >= opt.tau) {
        it.attempted = true;
        it.candidate = dec.candidates.front().text;
        it.exact = equal_modulo_whitespace(it.candidate, it.reference);
        it.syntax_ok = region_syntax_agrees(it.candidate, it.reference, lang);
    }
    items.push_back(std::move(it));
    return items;
}

/// Runs the classifier over a dataset. Groups are scored in parallel when
/// `workers` > 1 (the classifier must then be thread-safe); the reduction is
/// sequential in dataset order.
inline EvalReport evaluate(const std::vector<DatasetRecord>& all, Classifier& clf, const EvalOptions& opt = {}) {
    validate(opt.decode);
    std::vector<DatasetRecord> records;
    for (const auto& r : all)
        if (opt.split.empty() || r.split == opt.split) records.push_back(r);
    auto groups = group_by_line_conflict(records);
    if (opt.representable_only) {
        std::erase_if(groups, [](const RecordGroup& g) {
            for (const auto* r : g.records)
                if (r->label == 0 || !r->aligned) return true;
            return false;
        });
    }

    std::vector<std::vector<EvalItem>> results(groups.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min(opt.workers, groups.size()));
    if (workers <= 1) {
        for (std::size_t k = 0; k < groups.size(); ++k) results[k] = evaluate_group(groups[k], clf, opt);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t k; (k = next++) < groups.size();) results[k] = evaluate_group(groups[k], clf, opt);
            });
        for (auto& t : pool) t.join();
    }

    MetricsAccumulator overall;
    std::map<std::string, MetricsAccumulator> per_lang;
    for (const auto& items : results)
        for (const auto& it : items) {
            overall.add(it.attempted, it.exact, it.syntax_ok, it.candidate, it.reference);
            per_lang[it.language].add(it.attempted, it.exact, it.syntax_ok, it.candidate, it.reference);
        }
    EvalReport rep;
    rep.overall = overall.finish();
    for (const auto& [lang, acc] : per_lang) rep.per_language[lang] = acc.finish();
    rep.unit = opt.token_level ? "token" : "line";
    rep.classifier = clf.name();
    return rep;
}

// ---------------------------------------------------------------------------
// Output

inline nlohmann::ordered_json to_json(const EvalMetrics& m) {
    nlohmann::ordered_json j;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f_score"] = m.f_score;
    j["bleu4"] = m.bleu4;
    j["bleu4_sentence_mean"] = m.bleu4_sentence_mean;
    j["fraction_merged"] = m.fraction_merged;
    j["syntax_correct"] = m.syntax_correct;
    j["counts"] = {{"total", m.counts.total},
                   {"attempted", m.counts.attempted},
                   {"exact_match", m.counts.exact_match},
                   {"syntax_ok", m.counts.syntax_ok}};
    return j;
}

inline nlohmann::ordered_json to_json(const EvalReport& r) {
    nlohmann::ordered_json j = to_json(r.overall);
    j["unit"] = r.unit;
    j["classifier"] = r.classifier;
    j["malformed"] = r.malformed;
    auto langs = nlohmann::ordered_json::object();
    for (const auto& [lang, m] : r.per_language) langs[lang] = to_json(m);
    j["per_language"] = langs;
    return j;
}

/// Column headers of the comparison table.
inline const std::array<std::string, 6>& report_columns() {
    static const std::array<std::string, 6> cols = {"Precision", "Recall", "F-score",
                                                    "BLEU-4",    "Fraction Merged", "Syntax correct"};
    return cols;
}

/// A named row of percentages; missing values print as "-".
struct TableRow {
    std::string name;
    std::array<std::optional<double>, 6> values;
};

inline TableRow table_row(const std::string& name, const EvalMetrics& m) {
    return {name,
            {m.precision * 100, m.recall * 100, m.f_score * 100, m.bleu4 * 100, m.fraction_merged * 100,
             m.syntax_correct * 100}};
}

/// Rows from a JSON array of {"name": ..., "precision": ..., ...} with values
/// in percent; absent keys stay empty.
inline std::vector<TableRow> rows_from_json(const nlohmann::json& j) {
    static const std::array<const char*, 6> keys = {"precision", "recall", "f_score",
                                                    "bleu4",     "fraction_merged", "syntax_correct"};
    std::vector<TableRow> rows;
    for (const auto& e : j) {
        TableRow r;
        r.name = e.at("name").get<std::string>();
        for (std::size_t k = 0; k < keys.size(); ++k)
            if (e.contains(keys[k]) && e[keys[k]].is_number()) r.values[k] = e[keys[k]].get<double>();
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::string format_table(const std::vector<TableRow>& rows) {
    const auto& cols = report_columns();
    std::size_t name_w = 8;
    for (const auto& r : rows) name_w = std::max(name_w, r.name.size());
    std::array<std::size_t, 6> w{};
    for (std::size_t k = 0; k < cols.size(); ++k) w[k] = std::max<std::size_t>(cols[k].size(), 6);

    std::ostringstream out;
    auto pad = [&](const std::string& s, std::size_t width, bool left) {
        if (s.size() >= width) return s;
        return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
    };
    out << pad("Approach", name_w, true);
    for (std::size_t k = 0; k < cols.size(); ++k) out << " | " << pad(cols[k], w[k], false);
    out << '\n' << std::string(name_w, '-');
    for (std::size_t k = 0; k < cols.size(); ++k) out << "-|-" << std::string(w[k], '-');
    out << '\n';
    for (const auto& r : rows) {
        out << pad(r.name, name_w, true);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            std::string cell = "-";
            if (r.values[k]) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.1f", *r.values[k]);
                cell = buf;
            }
            out << " | " << pad(cell, w[k], false);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace mergeweave
