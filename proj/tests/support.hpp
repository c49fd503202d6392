#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mergeweave/mergeweave.hpp"

namespace mwtest {

namespace fs = std::filesystem;
namespace mw = mergeweave;

inline std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const fs::path& p, std::string_view text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

/// Non-layout token texts joined by single spaces.
inline std::string sig(const mw::TokenStream& s) {
    std::string out;
    for (const auto& t : s) {
        if (mw::is_layout(t)) continue;
        if (!out.empty()) out += ' ';
        out += t.text;
    }
    return out;
}

inline mw::TokenStream toks(std::string_view text) { return mw::tokenize(text); }

/// Removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "mw") {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline mw::ProcessResult run(const std::vector<std::string>& argv, std::string_view input = {}) {
    return mw::run_process(argv, input);
}

inline mw::ProcessResult git(const fs::path& repo, std::vector<std::string> args, std::string_view input = {}) {
    std::vector<std::string> argv = {"git", "-C", repo.string(), "-c", "user.name=t", "-c", "user.email=t@t",
                                     "-c", "commit.gpgsign=false"};
    argv.insert(argv.end(), args.begin(), args.end());
    auto r = mw::run_process(argv, input);
    if (!r.ok()) throw std::runtime_error("git " + args.front() + ": " + r.err);
    return r;
}

/// Builds a repository whose history holds one merge of `path`: base commit,
/// a topic branch with `right`, main with `left`, and a merge commit whose
/// tree has `resolved`.
inline void make_merge_repo(const fs::path& dir, const std::string& path, const std::string& base,
                            const std::string& left, const std::string& right, const std::string& resolved) {
    fs::create_directories(dir);
    git(dir, {"init", "-q", "-b", "main"});
    spit(dir / path, base);
    git(dir, {"add", path});
    git(dir, {"commit", "-q", "-m", "base"});
    git(dir, {"checkout", "-q", "-b", "topic"});
    spit(dir / path, right);
    git(dir, {"commit", "-q", "-am", "right"});
    git(dir, {"checkout", "-q", "main"});
    spit(dir / path, left);
    git(dir, {"commit", "-q", "-am", "left"});
    auto r = mw::run_process({"git", "-C", dir.string(), "-c", "user.name=t", "-c", "user.email=t@t", "merge", "-q",
                              "--no-ff", "--no-commit", "topic"});
    (void)r;  // fails when the merge conflicts
    spit(dir / path, resolved);
    git(dir, {"add", path});
    git(dir, {"commit", "-q", "--no-edit", "-m", "merge"});
}

/// Random token stream over a small vocabulary so that matches are common.
inline mw::TokenStream random_stream(std::mt19937_64& rng, std::size_t max_len) {
    static const std::vector<std::string> vocab = {"a", "b", "c", "x", "(", ")", ",", "1", "2", "=", ";", "{", "}"};
    std::uniform_int_distribution<std::size_t> len(0, max_len), pick(0, vocab.size() - 1), ws(0, 5);
    mw::TokenStream out;
    const auto n = len(rng);
    for (std::size_t k = 0; k < n; ++k) {
        out.push_back(mw::tokenize(vocab[pick(rng)]).front());
        const auto w = ws(rng);
        if (w == 0) out.push_back(mw::Token{"\n", mw::TokenKind::Newline});
        if (w == 1) out.push_back(mw::Token{" ", mw::TokenKind::Whitespace});
    }
    return out;
}

}  // namespace mwtest
