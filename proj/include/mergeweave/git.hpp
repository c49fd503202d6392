#pragma once

// Thin client over git plumbing commands run as child processes.

#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mergeweave/process.hpp"

namespace mergeweave {

class GitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MergeCommit {
    std::string commit;
    std::vector<std::string> parents;

    bool octopus() const { return parents.size() > 2; }
};

/// Result of reading one object with cat-file --batch.
struct BlobLookup {
    bool missing = false;
    std::string type;
    std::string content;
};

class GitRepo {
public:
    explicit GitRepo(std::filesystem::path dir, std::string git = "git")
        : dir_(std::move(dir)), git_(std::move(git)) {}

    const std::filesystem::path& dir() const { return dir_; }

    ProcessResult run(const std::vector<std::string>& args, std::string_view input = {}) const {
        std::vector<std::string> argv{git_, "-C", dir_.string()};
        argv.insert(argv.end(), args.begin(), args.end());
        return run_process(argv, input);
    }

    std::string run_checked(const std::vector<std::string>& args, std::string_view input = {}) const {
        auto r = run(args, input);
        if (!r.ok()) {
            std::string cmd = "git";
            for (const auto& a : args) cmd += " " + a;
            throw GitError(cmd + " failed: " + r.err);
        }
        return r.out;
    }

    bool valid() const {
        auto r = run({"rev-parse", "--git-dir"});
        return r.ok();
    }

    /// Commits with at least two parents reachable from any ref.
    std::vector<MergeCommit> merge_commits() const {
        std::vector<MergeCommit> out;
        std::istringstream in(run_checked({"rev-list", "--merges", "--parents", "--all"}));
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream fields(line);
            MergeCommit m;
            fields >> m.commit;
            for (std::string p; fields >> p;) m.parents.push_back(p);
            if (m.parents.size() >= 2) out.push_back(std::move(m));
        }
        return out;
    }

    std::optional<std::string> merge_base(const std::string& x, const std::string& y) const {
        auto r = run({"merge-base", x, y});
        if (!r.ok()) return std::nullopt;
        auto s = r.out;
        while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
        if (s.empty()) return std::nullopt;
        return s;
    }

    /// Paths whose content differs between two commits (renames off).
    std::vector<std::string> changed_paths(const std::string& from, const std::string& to) const {
        auto out = run_checked({"diff", "--name-only", "--no-renames", "-z", from, to});
        std::vector<std::string> paths;
        std::size_t start = 0;
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (out[i] != '\0') continue;
            if (i > start) paths.push_back(out.substr(start, i - start));
            start = i + 1;
        }
        return paths;
    }

    /// Reads objects named like "<commit>:<path>" in one cat-file process.
    std::vector<BlobLookup> read_objects(const std::vector<std::string>& specs) const {
        std::string input;
        for (const auto& s : specs) input += s + "\n";
        auto r = run({"cat-file", "--batch"}, input);
        if (!r.ok()) throw GitError("git cat-file --batch failed: " + r.err);
        std::vector<BlobLookup> out;
        std::size_t pos = 0;
        const auto& buf = r.out;
        for (std::size_t k = 0; k < specs.size(); ++k) {
            auto nl = buf.find('\n', pos);
            if (nl == std::string::npos) throw GitError("truncated cat-file output");
            std::string header = buf.substr(pos, nl - pos);
            pos = nl + 1;
            BlobLookup b;
            if (header.size() >= 8 && header.compare(header.size() - 8, 8, " missing") == 0) {
                b.missing = true;
                out.push_back(std::move(b));
                continue;
            }
            if (header.size() >= 10 && header.compare(header.size() - 10, 10, " ambiguous") == 0) {
                b.missing = true;
                out.push_back(std::move(b));
                continue;
            }
            std::istringstream h(header);
            std::string sha;
            std::size_t size = 0;
            h >> sha >> b.type >> size;
            if (!h || pos + size > buf.size()) throw GitError("bad cat-file header: " + header);
            b.content = buf.substr(pos, size);
            pos += size + 1;  // content is followed by a newline
            out.push_back(std::move(b));
        }
        return out;
    }

    std::string repo_name() const {
        auto p = std::filesystem::weakly_canonical(dir_);
        auto name = p.filename().string();
        if (name.empty()) name = p.parent_path().filename().string();
        if (name.size() > 4 && name.compare(name.size() - 4, 4, ".git") == 0) name.resize(name.size() - 4);
        return name;
    }

private:
    std::filesystem::path dir_;
    std::string git_;
};

/// Output of `git merge-file -p --diff3`.
struct MergeFileResult {
    std::string text;
    int conflicts = 0;  // number reported by git (0 = clean)
};

/// Runs git's own three-way file merge on in-memory texts via scratch files.
inline MergeFileResult git_merge_file(const std::string& left, const std::string& base, const std::string& right,
                                      const std::filesystem::path& scratch, const std::string& git = "git") {
    std::filesystem::create_directories(scratch);
    const auto pa = scratch / "ours", po = scratch / "base", pb = scratch / "theirs";
    auto write = [](const std::filesystem::path& p, const std::string& s) {
        std::FILE* f = std::fopen(p.c_str(), "wb");
        if (!f) throw GitError("cannot write " + p.string());
        std::fwrite(s.data(), 1, s.size(), f);
        std::fclose(f);
    };
    write(pa, left);
    write(po, base);
    write(pb, right);
    auto r = run_process({git, "merge-file", "-p", "--diff3", "-L", "ours", "-L", "base", "-L", "theirs",
                          pa.string(), po.string(), pb.string()});
    if (r.exit_code < 0 || r.exit_code > 127) throw GitError("git merge-file failed: " + r.err);
    return {r.out, r.exit_code};
}

}  // namespace mergeweave
