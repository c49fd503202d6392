// mergeweave: mine, stats, resolve, eval, stub-scorer.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "mergeweave/mergeweave.hpp"

namespace mw = mergeweave;
namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 1;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

struct ClassifierFlags {
    std::string scorer_cmd;
    std::string scorer_tcp;
    bool fallback = false;
    double timeout_s = 10.0;

    void add(CLI::App& app, mw::Config& cfg) {
        app.add_option("--classifier", cfg.classifier,
                       "heuristic | oracle | abstain | fixed:<label> | cmd:<command> | tcp:<host>:<port>");
        app.add_option("--scorer-cmd", scorer_cmd, "external scorer command (overrides --classifier)");
        app.add_option("--scorer-tcp", scorer_tcp, "external scorer host:port (overrides --classifier)");
        app.add_flag("--fallback-heuristic", fallback, "use the heuristic when the external scorer fails");
        app.add_option("--timeout", timeout_s, "external scorer timeout in seconds")->check(CLI::PositiveNumber);
    }

    std::unique_ptr<mw::Classifier> make(const mw::Config& cfg) const {
        std::string spec = cfg.classifier;
        if (!scorer_cmd.empty()) spec = "cmd:" + scorer_cmd;
        if (!scorer_tcp.empty()) spec = "tcp:" + scorer_tcp;
        mw::ClassifierOptions opt;
        opt.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000));
        opt.fallback_to_heuristic = fallback;
        return mw::make_classifier(spec, opt);
    }
};

void add_decode_flags(CLI::App& app, mw::Config& cfg) {
    app.add_option("-K,--top-k", cfg.K, "labels tried per token conflict")->check(CLI::Range(1, 9));
    app.add_option("-M,--beam", cfg.M, "beam width")->check(CLI::PositiveNumber);
    app.add_option("--tau", cfg.tau, "abstain below this candidate probability")->check(CLI::Range(0.0, 1.0));
    app.add_option("--context-budget", cfg.context_budget, "context tokens around each token conflict");
}

// -- mine -------------------------------------------------------------------

int cmd_mine(const std::string& list_path, const std::string& out_path, std::string stats_path,
             const std::string& scenarios_path, const mw::Config& cfg, double test_fraction,
             std::size_t max_lines) {
    std::ifstream list(list_path);
    if (!list) throw std::runtime_error("cannot read repo list " + list_path);
    std::vector<fs::path> repos;
    for (std::string line; std::getline(list, line);) {
        auto t = std::string(mw::trim(line));
        if (t.empty() || t[0] == '#') continue;
        fs::path p(t);
        if (p.is_relative()) p = fs::path(list_path).parent_path() / p;
        repos.push_back(p);
    }
    mw::MinerOptions opt;
    opt.seed = cfg.seed;
    opt.workers = cfg.workers;
    opt.test_fraction = test_fraction;
    opt.max_conflict_lines = max_lines;
    opt.collect_scenarios = !scenarios_path.empty();

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    auto summary = mw::mine_repositories(repos, out, opt);
    if (stats_path.empty()) stats_path = out_path + ".stats.json";
    write_file(stats_path, mw::to_json(summary.stats).dump(2) + "\n");
    if (!scenarios_path.empty()) {
        std::ofstream sc(scenarios_path, std::ios::binary);
        for (const auto& s : summary.scenarios) sc << mw::to_json(s).dump() << '\n';
    }
    spdlog::info("mined {} records from {} repositories ({} failed)", summary.stats.records, repos.size(),
                 summary.stats.repo_failures);
    if (!repos.empty() && summary.stats.repo_failures == repos.size()) return 1;
    return 0;
}

// -- stats ------------------------------------------------------------------

int cmd_stats(const std::string& path, const std::string& format, bool prior) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    auto data = mw::read_dataset(in);
    auto stats = mw::dataset_stats(data.records, data.malformed);
    if (prior) {
        auto p = mw::label_prior(data.records);
        nlohmann::ordered_json j = p;
        std::cout << j.dump() << '\n';
        return 0;
    }
    if (format == "text") {
        std::cout << mw::format_histograms({{"token conflicts", &stats.token_labels},
                                            {"token, non-trivial", &stats.token_labels_nontrivial},
                                            {"line conflicts", &stats.line_labels}});
        std::printf("coverage %.1f%%, %zu records, %zu malformed\n\n", 100 * stats.token_labels.coverage(),
                    stats.records, stats.malformed);
    }
    std::cout << mw::to_json(stats).dump(2) << '\n';
    return 0;
}

// -- resolve ----------------------------------------------------------------

int cmd_resolve(const std::string& path, const std::string& out_path, const std::string& report_path,
                const std::string& reference_path, const std::string& base_path, const std::string& syntax_cmd, const mw::Config& cfg,
                const ClassifierFlags& cf) {
    const auto text = read_file(path);
    auto clf = cf.make(cfg);
    mw::ResolveOptions opt;
    opt.decode = {cfg.K, cfg.M, cfg.context_budget};
    opt.tau = cfg.tau;
    opt.language = cfg.language == "auto" ? mw::language_from_path(path) : cfg.language;
    if (!base_path.empty()) opt.base_text = read_file(base_path);
    if (!syntax_cmd.empty()) opt.checker = mw::SyntaxChecker(mw::split_command(syntax_cmd));
    if (!reference_path.empty()) {
        for (auto& ec : mw::extract_resolution_regions(text, read_file(reference_path)))
            opt.reference_regions.push_back(ec.extractable ? ec.conflict.resolution : std::nullopt);
    }
    auto result = mw::resolve_file(text, *clf, opt);
    if (!report_path.empty()) write_file(report_path, mw::to_json(result).dump(2) + "\n");
    if (out_path.empty())
        std::cout << result.file_text << std::flush;
    else if (result.status == mw::ResolutionStatus::Resolved)
        write_file(out_path, result.file_text);
    spdlog::info("{}: {}", path, mw::status_name(result.status));
    switch (result.status) {
        case mw::ResolutionStatus::Resolved: return 0;
        case mw::ResolutionStatus::PartiallyResolved: return 2;
        case mw::ResolutionStatus::Abstained: return 3;
    }
    return 1;
}

// -- eval -------------------------------------------------------------------

int cmd_eval(const std::string& path, const std::string& split, const std::string& format, bool token_level,
             bool representable_only, const std::string& reference_rows, const mw::Config& cfg,
             const ClassifierFlags& cf) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    auto data = mw::read_dataset(in);
    auto clf = cf.make(cfg);
    mw::EvalOptions opt;
    opt.decode = {cfg.K, cfg.M, cfg.context_budget};
    opt.tau = cfg.tau;
    opt.token_level = token_level;
    opt.representable_only = representable_only;
    opt.split = split == "all" ? "" : split;
    // external scorers pipeline per batch; keep them on one thread
    opt.workers = dynamic_cast<mw::HeuristicClassifier*>(clf.get()) ? cfg.workers : 1;
    auto report = mw::evaluate(data.records, *clf, opt);
    report.malformed = data.malformed;

    if (format == "json") {
        std::cout << mw::to_json(report).dump(2) << '\n';
        return 0;
    }
    std::vector<mw::TableRow> rows;
    if (!reference_rows.empty()) rows = mw::rows_from_json(nlohmann::json::parse(read_file(reference_rows)));
    rows.push_back(mw::table_row(clf->name() + " (all)", report.overall));
    for (const auto& [lang, m] : report.per_language) rows.push_back(mw::table_row(clf->name() + " " + lang, m));
    std::cout << mw::format_table(rows);
    std::printf("unit=%s total=%zu attempted=%zu exact=%zu malformed=%zu sentence-BLEU-4=%.1f\n",
                report.unit.c_str(), report.overall.counts.total, report.overall.counts.attempted,
                report.overall.counts.exact_match, report.malformed, 100 * report.overall.bleu4_sentence_mean);
    return 0;
}

// -- stub-scorer ------------------------------------------------------------

int cmd_stub_scorer(int port) {
    if (port < 0) {
        std::ios::sync_with_stdio(false);
        mw::run_stub_scorer(std::cin, std::cout);
        return 0;
    }
    auto [listener, bound] = mw::listen_tcp(port);
    std::cout << "listening " << bound << std::endl;
    mw::serve_stub_tcp(listener);
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    spdlog::set_default_logger(spdlog::stderr_color_st("mergeweave"));
    spdlog::set_pattern("%^%l%$: %v");
    spdlog::set_level(spdlog::level::warn);

    mw::Config cfg;
    try {
        cfg = mw::load_config_from_env();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    CLI::App app{"Token-level three-way merge: mining, statistics, resolution and evaluation"};
    app.require_subcommand(1);
    app.fallthrough();
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "log progress to stderr");

    // mine
    auto* mine = app.add_subcommand("mine", "mine labeled token conflicts from local git repositories");
    std::string repo_list, mine_out, stats_out, scenarios_out;
    double test_fraction = 0.2;
    std::size_t max_lines = 0;
    mine->add_option("repo_list", repo_list, "file with one local repository path per line")->required();
    mine->add_option("-o,--out", mine_out, "dataset JSONL")->required();
    mine->add_option("--stats", stats_out, "stats sidecar (default <out>.stats.json)");
    mine->add_option("--scenarios", scenarios_out, "also write every merge scenario with git's verdict");
    mine->add_option("--seed", cfg.seed, "split seed");
    mine->add_option("--test-fraction", test_fraction, "share of repositories in the test split")
        ->check(CLI::Range(0.0, 1.0));
    mine->add_option("--max-conflict-lines", max_lines, "skip larger conflicts (0 = no cap)");
    mine->add_option("-j,--workers", cfg.workers, "parallel repositories")->check(CLI::PositiveNumber);

    // stats
    auto* stats = app.add_subcommand("stats", "label histograms of a dataset");
    std::string stats_in, stats_format = "text";
    bool prior = false;
    stats->add_option("dataset", stats_in, "dataset JSONL")->required();
    stats->add_option("--format", stats_format, "text or json")->check(CLI::IsMember({"text", "json"}));
    stats->add_flag("--prior", prior, "print the smoothed train-split label prior");

    // resolve
    auto* resolve = app.add_subcommand("resolve", "resolve a file with conflict markers");
    std::string resolve_in, resolve_out, report_out, reference_in, base_in, syntax_cmd;
    ClassifierFlags resolve_cf;
    resolve->add_option("file", resolve_in, "file with diff3 or two-way markers")->required();
    resolve->add_option("-o,--out", resolve_out, "write here (only when fully resolved) instead of stdout");
    resolve->add_option("--report", report_out, "per-conflict JSON report");
    resolve->add_option("--reference", reference_in, "developer-resolved file (gives the oracle its labels)");
    resolve->add_option("--base", base_in, "merge base of the file (fills base sections of two-way markers)");
    resolve->add_option("--syntax-cmd", syntax_cmd, "external parser: text on stdin, language as last argument");
    resolve->add_option("--language", cfg.language, "language id, or auto from the extension");
    add_decode_flags(*resolve, cfg);
    resolve_cf.add(*resolve, cfg);

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a classifier on a dataset");
    std::string eval_in, eval_split = "test", eval_format = "text", reference_rows;
    bool token_level = false, representable_only = false;
    ClassifierFlags eval_cf;
    eval->add_option("dataset", eval_in, "dataset JSONL")->required();
    eval->add_option("--split", eval_split, "test, train or all")->check(CLI::IsMember({"test", "train", "all"}));
    eval->add_option("--format", eval_format, "text or json")->check(CLI::IsMember({"text", "json"}));
    eval->add_flag("--token-level", token_level, "score token conflicts instead of line conflicts");
    eval->add_flag("--representable-only", representable_only, "drop line conflicts no label sequence explains");
    eval->add_option("--reference-rows", reference_rows, "JSON array of extra table rows");
    eval->add_option("-j,--workers", cfg.workers, "parallel workers (heuristic only)")
        ->check(CLI::PositiveNumber);
    add_decode_flags(*eval, cfg);
    eval_cf.add(*eval, cfg);

    // stub-scorer
    auto* stub = app.add_subcommand("stub-scorer", "wire-protocol scorer returning a fixed distribution");
    int port = -1;
    stub->add_option("--port", port, "serve TCP on 127.0.0.1:<port> (0 = any) instead of stdio");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }
    if (verbose) spdlog::set_level(spdlog::level::info);

    try {
        cfg.validate();
        if (*mine) return cmd_mine(repo_list, mine_out, stats_out, scenarios_out, cfg, test_fraction, max_lines);
        if (*stats) return cmd_stats(stats_in, stats_format, prior);
        if (*resolve) return cmd_resolve(resolve_in, resolve_out, report_out, reference_in, base_in, syntax_cmd, cfg, resolve_cf);
        if (*eval)
            return cmd_eval(eval_in, eval_split, eval_format, token_level, representable_only, reference_rows, cfg,
                            eval_cf);
        if (*stub) return cmd_stub_scorer(port);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
