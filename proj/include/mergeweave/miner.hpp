#pragma once

// Mining labeled token conflicts from git histories.
//
// For every merge commit the two (first) parents are merged again file by
// file with git's own three-way merge. Files that conflict are paired with
// their content at the merge commit, each conflict's resolution region is cut
// out between unique context anchors, and every token-level conflict inside
// it becomes one dataset record.

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "mergeweave/conflict.hpp"
#include "mergeweave/dataset.hpp"
#include "mergeweave/git.hpp"
#include "mergeweave/labels.hpp"
#include "mergeweave/merge3.hpp"
#include "mergeweave/stats.hpp"
#include "mergeweave/syntax.hpp"
#include "mergeweave/text.hpp"
#include "mergeweave/tokenizer.hpp"

namespace mergeweave {

// ---------------------------------------------------------------------------
// Resolution regions

inline constexpr std::size_t kAnchorLines = 3;

struct ExtractedConflict {
    LineConflict conflict;  // resolution empty when unextractable
    bool extractable = false;
    std::string reason;
};

namespace detail {

// Line boundaries: offsets[k] is where line k starts; offsets.back() == size.
struct LineIndex {
    std::vector<std::string_view> lines;
    std::vector<std::size_t> offsets;
};

inline LineIndex index_lines(std::string_view text) {
    LineIndex ix;
    ix.lines = split_lines(text);
    ix.offsets.push_back(0);
    for (auto l : ix.lines) ix.offsets.push_back(ix.offsets.back() + l.size());
    return ix;
}

// Occurrences of `anchor` as consecutive lines of `hay` starting at or after
// `lo`, compared exactly or trimmed.
inline std::vector<std::size_t> find_anchor(const LineIndex& hay, const std::vector<std::string_view>& anchor,
                                            std::size_t lo, bool trimmed) {
    std::vector<std::size_t> hits;
    if (anchor.empty() || anchor.size() > hay.lines.size()) return hits;
    auto same = [&](std::string_view x, std::string_view y) { return trimmed ? trim(x) == trim(y) : x == y; };
    for (std::size_t s = lo; s + anchor.size() <= hay.lines.size(); ++s) {
        bool ok = true;
        for (std::size_t k = 0; k < anchor.size() && ok; ++k) ok = same(hay.lines[s + k], anchor[k]);
        if (ok) hits.push_back(s);
    }
    return hits;
}

// Unique placement of the longest usable anchor (kAnchorLines shrinking to 1),
// exact matches first. `context` holds the stable lines next to the conflict;
// `from_end` takes the anchor from its end (prefix side).
inline std::optional<std::pair<std::size_t, std::size_t>> place_anchor(const LineIndex& hay,
                                                                       const std::vector<std::string_view>& context,
                                                                       bool from_end, std::size_t lo,
                                                                       std::string& reason) {
    const std::size_t max_len = std::min(kAnchorLines, context.size());
    bool ambiguous = false;
    for (bool trimmed : {false, true}) {
        for (std::size_t len = max_len; len >= 1; --len) {
            std::vector<std::string_view> anchor =
                from_end ? std::vector<std::string_view>(context.end() - len, context.end())
                         : std::vector<std::string_view>(context.begin(), context.begin() + len);
            auto hits = find_anchor(hay, anchor, lo, trimmed);
            if (hits.size() == 1) return std::pair{hits.front(), len};
            if (hits.size() > 1) {
                ambiguous = true;
                break;
            }
        }
    }
    reason = ambiguous ? "ambiguous anchor" : "anchor not found";
    return std::nullopt;
}

// Whole-piece match of the file's leading (or trailing) plain text.
inline bool matches_edge(const LineIndex& hay, const std::vector<std::string_view>& context, bool at_file_start) {
    if (context.size() > hay.lines.size()) return false;
    const std::size_t off = at_file_start ? 0 : hay.lines.size() - context.size();
    for (std::size_t k = 0; k < context.size(); ++k)
        if (trim(hay.lines[off + k]) != trim(context[k])) return false;
    return true;
}

}  // namespace detail

/// Cuts the developer resolution of every conflict block out of the resolved
/// file. Throws MarkerParseError on malformed markers.
inline std::vector<ExtractedConflict> extract_resolution_regions(std::string_view conflicted_text,
                                                                 std::string_view resolved_text) {
    const auto pieces = parse_conflict_markers(conflicted_text);
    const auto hay = detail::index_lines(resolved_text);
    std::vector<ExtractedConflict> out;

    // Chunks with A side for other conflicts give Pref/Suff text.
    std::vector<Chunk> chunks;
    for (const auto& p : pieces) {
        Chunk c;
        if (p.conflict) {
            c.kind = ChunkKind::Conflict;
            c.a = p.a;
            c.b = p.b;
            c.o = p.o;
        } else {
            c.kind = ChunkKind::Stable;
            c.a = c.b = c.o = c.merged = p.text;
        }
        chunks.push_back(std::move(c));
    }
    auto lcs = line_conflicts(chunks);

    std::size_t ci = 0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        if (!pieces[k].conflict) continue;
        ExtractedConflict ec;
        ec.conflict = lcs[ci++];

        const bool at_start = k == 0;
        const bool at_end = k + 1 == pieces.size();
        std::vector<std::string_view> before, after;
        if (!at_start && !pieces[k - 1].conflict) before = split_lines(pieces[k - 1].text);
        if (!at_end && !pieces[k + 1].conflict) after = split_lines(pieces[k + 1].text);

        std::size_t begin_line = 0, end_line = hay.lines.size();
        bool ok = true;
        if (!at_start) {
            if (before.empty()) {
                ok = false;
                ec.reason = "no stable context before conflict";
            } else if (k == 1 && detail::matches_edge(hay, before, true)) {
                begin_line = before.size();
            } else if (auto placed = detail::place_anchor(hay, before, true, 0, ec.reason)) {
                begin_line = placed->first + placed->second;
            } else {
                ok = false;
            }
        }
        if (ok && !at_end) {
            if (after.empty()) {
                ok = false;
                ec.reason = "no stable context after conflict";
            } else if (k + 2 == pieces.size() && detail::matches_edge(hay, after, false) &&
                       hay.lines.size() - after.size() >= begin_line) {
                end_line = hay.lines.size() - after.size();
            } else if (auto placed = detail::place_anchor(hay, after, false, begin_line, ec.reason)) {
                end_line = placed->first;
            } else {
                ok = false;
            }
        }
        if (ok && end_line < begin_line) {
            ok = false;
            ec.reason = "anchors out of order";
        }
        if (ok) {
            ec.extractable = true;
            ec.reason.clear();
            ec.conflict.resolution = std::string(
                resolved_text.substr(hay.offsets[begin_line], hay.offsets[end_line] - hay.offsets[begin_line]));
        }
        out.push_back(std::move(ec));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Statistics

struct MineStats {
    std::size_t repos = 0;
    std::size_t repo_failures = 0;
    std::size_t merge_commits = 0;
    std::size_t octopus_merges = 0;
    std::size_t conflicting_merges = 0;
    std::size_t candidate_files = 0;  // modified on both sides
    std::size_t conflicted_files = 0;
    std::size_t line_conflicts = 0;
    std::size_t unextractable = 0;
    std::size_t unaligned = 0;  // resolution could not be cut per token conflict
    std::size_t oversized = 0;  // above the configured line cap
    std::size_t records = 0;
    std::map<std::string, std::size_t> skipped;  // reason -> files
    std::size_t token_clean = 0, token_single = 0, token_multi = 0;
    LabelHistogram token_labels;
    LabelHistogram token_labels_nontrivial;
    LabelHistogram line_labels;
    std::map<std::string, std::size_t> languages;
    std::map<std::string, std::map<std::string, std::size_t>> splits;  // split -> language -> records

    void merge_from(const MineStats& o) {
        repos += o.repos;
        repo_failures += o.repo_failures;
        merge_commits += o.merge_commits;
        octopus_merges += o.octopus_merges;
        conflicting_merges += o.conflicting_merges;
        candidate_files += o.candidate_files;
        conflicted_files += o.conflicted_files;
        line_conflicts += o.line_conflicts;
        unextractable += o.unextractable;
        unaligned += o.unaligned;
        oversized += o.oversized;
        records += o.records;
        for (const auto& [k, v] : o.skipped) skipped[k] += v;
        token_clean += o.token_clean;
        token_single += o.token_single;
        token_multi += o.token_multi;
        auto add_hist = [](LabelHistogram& dst, const LabelHistogram& src) {
            for (std::size_t k = 0; k < dst.counts.size(); ++k) dst.counts[k] += src.counts[k];
            dst.total += src.total;
        };
        add_hist(token_labels, o.token_labels);
        add_hist(token_labels_nontrivial, o.token_labels_nontrivial);
        add_hist(line_labels, o.line_labels);
        for (const auto& [k, v] : o.languages) languages[k] += v;
        for (const auto& [s, m] : o.splits)
            for (const auto& [k, v] : m) splits[s][k] += v;
    }
};

inline nlohmann::ordered_json to_json(const MineStats& s) {
    nlohmann::ordered_json j;
    j["records"] = s.records;
    j["labels"] = label_histogram_json(s.token_labels);
    j["languages"] = s.languages;
    j["unextractable"] = s.unextractable;
    j["unrepresentable"] = s.token_labels.counts[0];
    j["coverage"] = s.token_labels.coverage();
    j["labels_nontrivial"] = label_histogram_json(s.token_labels_nontrivial);
    j["line_labels"] = label_histogram_json(s.line_labels);
    j["token_outcomes"] = {{"clean", s.token_clean}, {"single", s.token_single}, {"multi", s.token_multi}};
    j["splits"] = s.splits;
    j["repos"] = s.repos;
    j["repo_failures"] = s.repo_failures;
    j["merge_commits"] = s.merge_commits;
    j["octopus_merges"] = s.octopus_merges;
    j["conflicting_merges"] = s.conflicting_merges;
    j["candidate_files"] = s.candidate_files;
    j["conflicted_files"] = s.conflicted_files;
    j["line_conflicts"] = s.line_conflicts;
    j["unaligned"] = s.unaligned;
    j["oversized"] = s.oversized;
    j["skipped"] = s.skipped;
    j["label_matching"] = "whitespace-normalized text; base-line exclusion compares trimmed lines";
    return j;
}

// ---------------------------------------------------------------------------
// Mining

struct MinerOptions {
    std::uint64_t seed = 1;
    double test_fraction = 0.2;
    std::size_t max_conflict_lines = 0;  // 0 = unlimited
    std::size_t workers = 1;
    bool collect_scenarios = false;
    std::string git = "git";
    std::filesystem::path scratch_root = std::filesystem::temp_directory_path();
};

/// Three versions of one file modified on both sides of a merge, plus git's
/// verdict and the developer's file.
struct MergeScenario {
    MergeMeta meta;
    std::string base, left, right;
    int git_conflicts = 0;
    std::string git_output;
    std::optional<std::string> resolved;
};

struct RepoMineResult {
    std::string repo;
    std::vector<DatasetRecord> records;
    MineStats stats;
    std::vector<MergeScenario> scenarios;
    std::vector<std::string> errors;
};

/// FNV-1a, stable across platforms.
inline std::uint64_t stable_hash(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

/// "train" or "test", a function of the repository name and seed only.
inline std::string split_for_repo(const std::string& repo, std::uint64_t seed, double test_fraction) {
    const auto h = stable_hash(repo, stable_hash(std::to_string(seed)));
    const double u = static_cast<double>(h % 1000000ULL) / 1e6;
    return u < test_fraction ? "test" : "train";
}

inline bool looks_binary(std::string_view s) { return s.substr(0, 8000).find('\0') != std::string_view::npos; }

/// Records of one conflicted file.
inline void mine_file(const MergeMeta& meta, std::string_view conflicted, std::string_view resolved,
                      const std::string& split, bool octopus, const MinerOptions& opt, RepoMineResult& out) {
    std::vector<ExtractedConflict> extracted;
    try {
        extracted = extract_resolution_regions(conflicted, resolved);
    } catch (const MarkerParseError& e) {
        ++out.stats.skipped["marker parse error"];
        spdlog::warn("{}@{}:{}: {}", meta.repo, meta.commit, meta.path, e.what());
        return;
    }
    const auto language = language_from_path(meta.path);
    for (auto& ec : extracted) {
        ++out.stats.line_conflicts;
        if (!ec.extractable) {
            ++out.stats.unextractable;
            spdlog::debug("{}@{}:{} conflict {} unextractable: {}", meta.repo, meta.commit, meta.path,
                          ec.conflict.index, ec.reason);
            continue;
        }
        const auto& lc = ec.conflict;
        if (opt.max_conflict_lines > 0) {
            const auto lines = std::max({split_lines(lc.a).size(), split_lines(lc.b).size(),
                                         split_lines(lc.o).size()});
            if (lines > opt.max_conflict_lines) {
                ++out.stats.oversized;
                continue;
            }
        }
        const auto line_label = extract_line_label(lc);
        out.stats.line_labels.add(line_label);
        const bool trivial =
            line_label == ResolutionLabel::TakeA || line_label == ResolutionLabel::TakeB;

        auto outcome = token_diff3(lc);
        switch (outcome.kind) {
            case MergeOutcomeKind::CleanMerge: ++out.stats.token_clean; break;
            case MergeOutcomeKind::SingleConflict: ++out.stats.token_single; break;
            case MergeOutcomeKind::MultiConflict: ++out.stats.token_multi; break;
        }
        if (outcome.kind == MergeOutcomeKind::CleanMerge) continue;
        const bool aligned = attach_resolutions(outcome, *lc.resolution);
        if (!aligned) ++out.stats.unaligned;

        for (const auto& tc : outcome.conflicts) {
            DatasetRecord r;
            r.meta = meta;
            r.line_conflict_index = lc.index;
            r.token_conflict_index = tc.index;
            r.a = detokenize(tc.a);
            r.b = detokenize(tc.b);
            r.o = detokenize(tc.o);
            r.pref = detokenize(tc.pref);
            r.suff = detokenize(tc.suff);
            LabelOutcome label;
            if (aligned) {
                r.resolution = detokenize(*tc.resolution);
                label = extract_label(tc);
            } else {
                r.line_resolution = *lc.resolution;
            }
            r.label = ordinal(label);
            r.language = language;
            r.split = split;
            r.line_label = ordinal(line_label);
            r.trivial = trivial;
            r.octopus = octopus;
            r.aligned = aligned;

            out.stats.token_labels.add(label);
            if (!trivial) out.stats.token_labels_nontrivial.add(label);
            ++out.stats.languages[language];
            ++out.stats.splits[split][language];
            ++out.stats.records;
            out.records.push_back(std::move(r));
        }
    }
}

inline std::filesystem::path scratch_dir(const MinerOptions& opt) {
    static std::atomic<unsigned> counter{0};
    return opt.scratch_root / ("mergeweave-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
}

/// Replays every merge of one repository.
inline RepoMineResult mine_repository(const std::filesystem::path& path, const MinerOptions& opt = {}) {
    RepoMineResult out;
    GitRepo repo(path, opt.git);
    out.repo = repo.repo_name();
    out.stats.repos = 1;
    if (!repo.valid()) {
        out.errors.push_back(path.string() + ": not a git repository");
        out.stats.repo_failures = 1;
        return out;
    }
    const auto split = split_for_repo(out.repo, opt.seed, opt.test_fraction);
    const auto scratch = scratch_dir(opt);
    try {
        auto merges = repo.merge_commits();
        std::sort(merges.begin(), merges.end(),
                  [](const MergeCommit& x, const MergeCommit& y) { return x.commit < y.commit; });
        for (const auto& m : merges) {
            ++out.stats.merge_commits;
            const bool octopus = m.octopus();
            if (octopus) ++out.stats.octopus_merges;
            const auto& pa = m.parents[0];
            const auto& pb = m.parents[1];
            auto base = repo.merge_base(pa, pb);
            if (!base) {
                ++out.stats.skipped["no merge base"];
                continue;
            }
            auto ca = repo.changed_paths(*base, pa);
            auto cb = repo.changed_paths(*base, pb);
            std::sort(ca.begin(), ca.end());
            std::sort(cb.begin(), cb.end());
            std::vector<std::string> both;
            std::set_intersection(ca.begin(), ca.end(), cb.begin(), cb.end(), std::back_inserter(both));
            if (both.empty()) continue;

            std::vector<std::string> specs;
            for (const auto& p : both) {
                specs.push_back(*base + ":" + p);
                specs.push_back(pa + ":" + p);
                specs.push_back(pb + ":" + p);
                specs.push_back(m.commit + ":" + p);
            }
            const auto blobs = repo.read_objects(specs);
            bool merge_conflicted = false;
            for (std::size_t f = 0; f < both.size(); ++f) {
                const MergeMeta meta{out.repo, m.commit, both[f]};
                const auto& bo = blobs[4 * f];
                const auto& ba = blobs[4 * f + 1];
                const auto& bb = blobs[4 * f + 2];
                const auto& bm = blobs[4 * f + 3];
                if (bo.missing || ba.missing || bb.missing) {
                    ++out.stats.skipped["added or deleted on a side"];
                    continue;
                }
                if (bo.type != "blob" || ba.type != "blob" || bb.type != "blob") {
                    ++out.stats.skipped["not a blob"];
                    continue;
                }
                if (looks_binary(bo.content) || looks_binary(ba.content) || looks_binary(bb.content)) {
                    ++out.stats.skipped["binary"];
                    continue;
                }
                if (!is_valid_utf8(bo.content) || !is_valid_utf8(ba.content) || !is_valid_utf8(bb.content)) {
                    ++out.stats.skipped["invalid utf-8"];
                    continue;
                }
                ++out.stats.candidate_files;
                auto merged = git_merge_file(ba.content, bo.content, bb.content, scratch, opt.git);

                if (opt.collect_scenarios) {
                    MergeScenario sc{meta, bo.content, ba.content, bb.content, merged.conflicts, merged.text,
                                     std::nullopt};
                    if (!bm.missing) sc.resolved = bm.content;
                    out.scenarios.push_back(std::move(sc));
                }
                if (merged.conflicts == 0) continue;
                merge_conflicted = true;
                if (bm.missing) {
                    ++out.stats.skipped["deleted in merge"];
                    continue;
                }
                if (looks_binary(bm.content) || !is_valid_utf8(bm.content)) {
                    ++out.stats.skipped["resolved file unreadable"];
                    continue;
                }
                if (has_conflict_markers(bm.content)) {
                    ++out.stats.skipped["committed with markers"];
                    continue;
                }
                ++out.stats.conflicted_files;
                mine_file(meta, merged.text, bm.content, split, octopus, opt, out);
            }
            out.stats.conflicting_merges += merge_conflicted;
        }
    } catch (const std::exception& e) {
        out.errors.push_back(path.string() + ": " + e.what());
        out.stats.repo_failures = 1;
    }
    std::error_code ec;
    std::filesystem::remove_all(scratch, ec);

    std::sort(out.records.begin(), out.records.end(), [](const DatasetRecord& x, const DatasetRecord& y) {
        return std::tie(x.meta.commit, x.meta.path, x.line_conflict_index, x.token_conflict_index) <
               std::tie(y.meta.commit, y.meta.path, y.line_conflict_index, y.token_conflict_index);
    });
    return out;
}

struct MineSummary {
    MineStats stats;
    std::vector<MergeScenario> scenarios;
    std::vector<std::string> errors;
};

/// Mines repositories with a worker pool. A single writer receives finished
/// repositories over a queue and emits records ordered by repository name,
/// then commit, path, i, j.
inline MineSummary mine_repositories(const std::vector<std::filesystem::path>& repos, std::ostream& jsonl,
                                     const MinerOptions& opt = {}) {
    // repository order is by name so the output does not depend on the list order
    std::vector<std::pair<std::string, std::filesystem::path>> order;
    for (const auto& p : repos) order.emplace_back(GitRepo(p, opt.git).repo_name(), p);
    std::stable_sort(order.begin(), order.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

    std::mutex mu;
    std::condition_variable cv;
    std::map<std::size_t, RepoMineResult> done;
    std::atomic<std::size_t> next{0};

    const std::size_t workers = std::max<std::size_t>(1, std::min(opt.workers, order.size()));
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t k; (k = next++) < order.size();) {
                auto r = mine_repository(order[k].second, opt);
                {
                    std::lock_guard lock(mu);
                    done.emplace(k, std::move(r));
                }
                cv.notify_one();
            }
        });

    MineSummary summary;
    for (std::size_t k = 0; k < order.size(); ++k) {
        RepoMineResult r;
        {
            std::unique_lock lock(mu);
            cv.wait(lock, [&] { return done.count(k) > 0; });
            r = std::move(done[k]);
            done.erase(k);
        }
        for (const auto& rec : r.records) jsonl << to_json(rec).dump() << '\n';
        summary.stats.merge_from(r.stats);
        for (auto& e : r.errors) {
            spdlog::error("{}", e);
            summary.errors.push_back(std::move(e));
        }
        if (opt.collect_scenarios)
            for (auto& s : r.scenarios) summary.scenarios.push_back(std::move(s));
    }
    for (auto& t : pool) t.join();
    jsonl.flush();
    return summary;
}

inline nlohmann::ordered_json to_json(const MergeScenario& s) {
    nlohmann::ordered_json j;
    j["meta"] = {{"repo", s.meta.repo}, {"commit", s.meta.commit}, {"path", s.meta.path}};
    j["base"] = s.base;
    j["left"] = s.left;
    j["right"] = s.right;
    j["git_conflicts"] = s.git_conflicts;
    if (s.resolved) j["resolved"] = *s.resolved;
    return j;
}

}  // namespace mergeweave
