// Writes local git repositories with merge histories for mining.
//
//   mergeweave-synth --out DIR [--repos N] [--merges N] [--seed S]
//
// Each repository holds generated programs in one language. Every merge has
// a left commit on main and a right commit on a topic branch, both editing
// the same base; lines edited on both sides get a developer resolution (keep
// ours, keep theirs, combine both edits, or rewrite). DIR/repos.txt lists the
// repositories.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <regex>
#include <set>

#include <CLI11.hpp>

#include "mergeweave/process.hpp"

namespace fs = std::filesystem;

namespace {

using Rng = std::mt19937_64;

std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
bool chance(Rng& rng, double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }
template <class T>
const T& pick_of(Rng& rng, const std::vector<T>& v) {
    return v[pick(rng, v.size())];
}

const std::vector<std::string> kNouns = {"count", "total", "index", "value", "limit", "offset", "width", "height",
                                         "score", "delta", "size",  "weight", "price", "rate",   "depth", "level",
                                         "item",  "node",  "buffer", "result", "key",  "name",   "path",  "items"};
const std::vector<std::string> kVerbs = {"compute", "load", "parse", "render", "update", "merge", "resolve", "scale",
                                         "encode",  "check", "apply", "format", "split",  "build", "clamp",   "reduce"};
const std::vector<std::string> kWords = {"retry", "cache miss", "slow path", "invalid input", "done", "fallback",
                                         "naïve estimate", "größe", "überlauf", "日本語", "ready", "skipped"};

struct Lang {
    std::string name, ext;
    std::vector<std::string> decl_kw;  // first is the usual one
    std::string term;                  // statement terminator
    bool python = false;
    bool allman = false;  // braces on their own line
    bool crlf = false;
    std::string comment;
    std::string log_fn;
};

const std::vector<Lang>& languages() {
    static const std::vector<Lang> langs = {
        {"javascript", "js", {"var", "let", "const"}, "", false, false, false, "//", "console.log"},
        {"typescript", "ts", {"let", "const"}, ";", false, false, false, "//", "logger.debug"},
        {"java", "java", {"int", "long", "final int"}, ";", false, false, false, "//", "LOG.info"},
        {"csharp", "cs", {"var", "int", "long"}, ";", false, true, true, "//", "Logger.Info"},
        {"python", "py", {""}, "", true, false, false, "#", "log.info"},
        {"cpp", "cpp", {"auto", "int", "long"}, ";", false, false, false, "//", "log_info"},
    };
    return langs;
}

// ---------------------------------------------------------------------------
// Programs

struct Line {
    std::size_t id;
    std::string indent;
    std::string text;
    bool mutable_stmt = false;
};

struct Program {
    std::vector<Line> lines;
};

class Generator {
public:
    Generator(const Lang& lang, Rng& rng, std::size_t& next_id) : lang_(lang), rng_(rng), next_id_(next_id) {}

    std::string ident() { return pick_of(rng_, kNouns) + (chance(rng_, 0.3) ? std::to_string(pick(rng_, 9) + 1) : ""); }
    std::string number() { return std::to_string(pick(rng_, 100)); }
    std::string call_name() {
        auto v = pick_of(rng_, kVerbs);
        if (lang_.name == "csharp") v[0] = static_cast<char>(std::toupper(v[0]));
        return v;
    }

    std::string expr(int depth = 0) {
        switch (depth > 1 ? pick(rng_, 2) : pick(rng_, 5)) {
            case 0: return ident();
            case 1: return number();
            case 2: return call_name() + "(" + expr(depth + 1) + ", " + expr(depth + 1) + ")";
            case 3: return ident() + " + " + ident() + " * " + number();
            default: return "max(" + ident() + ", " + number() + ")";
        }
    }

    std::string statement() {
        const auto& t = lang_.term;
        switch (pick(rng_, 6)) {
            case 0:
            case 1: {
                const auto& kw = lang_.decl_kw.front();
                std::string type = lang_.name == "typescript" ? ": number" : "";
                return (kw.empty() ? "" : kw + " ") + ident() + type + " = " + expr() + t;
            }
            case 2: return ident() + " = " + expr() + t;
            case 3: return lang_.log_fn + "(" + ident() + ", \"" + pick_of(rng_, kWords) + "\")" + t;
            case 4: return ident() + (lang_.python ? " += " : " += ") + number() + t;
            default: return call_name() + "(" + ident() + ", " + expr(1) + ")" + t;
        }
    }

    Line stmt_line(const std::string& indent) { return {next_id_++, indent, statement(), true}; }
    Line fixed(const std::string& indent, std::string text) { return {next_id_++, indent, std::move(text), false}; }

    void block(Program& p, const std::string& indent, std::size_t n, bool allow_if) {
        for (std::size_t k = 0; k < n; ++k) {
            if (allow_if && chance(rng_, 0.2)) {
                const std::string cond = ident() + (chance(rng_, 0.5) ? " > " : " < ") + number();
                const std::string inner = indent + "    ";
                if (lang_.python) {
                    p.lines.push_back(fixed(indent, "if " + cond + ":"));
                } else if (lang_.allman) {
                    p.lines.push_back(fixed(indent, "if (" + cond + ")"));
                    p.lines.push_back(fixed(indent, "{"));
                } else {
                    p.lines.push_back(fixed(indent, "if (" + cond + ") {"));
                }
                block(p, inner, 1 + pick(rng_, 2), false);
                if (!lang_.python) p.lines.push_back(fixed(indent, "}"));
                continue;
            }
            if (chance(rng_, 0.08)) {
                p.lines.push_back(fixed(indent, lang_.comment + " " + pick_of(rng_, kWords)));
                continue;
            }
            p.lines.push_back(stmt_line(indent));
        }
        const auto ret = "return " + expr() + lang_.term;
        p.lines.push_back({next_id_++, indent, ret, true});
    }

    void function(Program& p, const std::string& indent) {
        const auto name = call_name() + pick_of(rng_, kNouns).substr(0, 4) + std::to_string(pick(rng_, 90) + 10);
        const auto a = ident(), b = ident() + "_";
        const std::string body = indent + "    ";
        if (lang_.name == "javascript") {
            p.lines.push_back(fixed(indent, "function " + name + "(" + a + ", " + b + ") {"));
        } else if (lang_.name == "typescript") {
            p.lines.push_back(fixed(indent, "export function " + name + "(" + a + ": number, " + b + ": number): number {"));
        } else if (lang_.name == "java") {
            p.lines.push_back(fixed(indent, "public static int " + name + "(int " + a + ", int " + b + ") {"));
        } else if (lang_.name == "csharp") {
            p.lines.push_back(fixed(indent, "public static int " + name + "(int " + a + ", int " + b + ")"));
            p.lines.push_back(fixed(indent, "{"));
        } else if (lang_.name == "python") {
            p.lines.push_back(fixed(indent, "def " + name + "(" + a + ", " + b + "):"));
        } else {
            p.lines.push_back(fixed(indent, "int " + name + "(int " + a + ", int " + b + ") {"));
        }
        block(p, body, 3 + pick(rng_, 6), true);
        if (!lang_.python) p.lines.push_back(fixed(indent, "}"));
        p.lines.push_back(fixed("", ""));
    }

    Program program(const std::string& module) {
        Program p;
        const std::size_t nfun = 4 + pick(rng_, 5);
        std::string inner;
        if (lang_.name == "javascript") {
            p.lines.push_back(fixed("", "'use strict'"));
            p.lines.push_back(fixed("", ""));
        } else if (lang_.name == "typescript") {
            p.lines.push_back(fixed("", "import { logger } from './log';"));
            p.lines.push_back(fixed("", ""));
        } else if (lang_.name == "java") {
            p.lines.push_back(fixed("", "package org.example." + module + ";"));
            p.lines.push_back(fixed("", ""));
            p.lines.push_back(fixed("", "public class " + module + " {"));
            inner = "    ";
        } else if (lang_.name == "csharp") {
            p.lines.push_back(fixed("", "using System;"));
            p.lines.push_back(fixed("", ""));
            p.lines.push_back(fixed("", "namespace Example"));
            p.lines.push_back(fixed("", "{"));
            p.lines.push_back(fixed("    ", "public static class " + module));
            p.lines.push_back(fixed("    ", "{"));
            inner = "        ";
        } else if (lang_.name == "python") {
            p.lines.push_back(fixed("", "import logging"));
            p.lines.push_back(fixed("", ""));
            p.lines.push_back(fixed("", "log = logging.getLogger(__name__)"));
            p.lines.push_back(fixed("", ""));
        } else {
            p.lines.push_back(fixed("", "#include <algorithm>"));
            p.lines.push_back(fixed("", ""));
            p.lines.push_back(fixed("", "namespace " + module + " {"));
            p.lines.push_back(fixed("", ""));
        }
        for (std::size_t k = 0; k < nfun; ++k) function(p, inner);
        if (lang_.name == "java") p.lines.push_back(fixed("", "}"));
        if (lang_.name == "csharp") {
            p.lines.push_back(fixed("    ", "}"));
            p.lines.push_back(fixed("", "}"));
        }
        if (lang_.name == "cpp") p.lines.push_back(fixed("", "}  // namespace " + module));
        return p;
    }

private:
    const Lang& lang_;
    Rng& rng_;
    std::size_t& next_id_;
};

std::string render(const Program& p, const Lang& lang) {
    std::string out;
    const char* eol = lang.crlf ? "\r\n" : "\n";
    for (const auto& l : p.lines) {
        if (!l.text.empty()) out += l.indent + l.text;
        out += eol;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Edits

enum class TokenOpKind { Number, Rename, AddArg, Keyword, Operator, String };

struct TokenOp {
    TokenOpKind kind;
    std::size_t which;    // occurrence index, taken modulo the count
    std::string payload;  // replacement text
};

// Applies one op; returns the text unchanged when the op has no target.
std::string apply_op(const std::string& text, const TokenOp& op, const Lang& lang) {
    static const std::regex number(R"(\b\d+\b)");
    static const std::regex ident(R"(\b[A-Za-z_][A-Za-z_0-9]*\b)");
    static const std::regex oper(R"( (\+|-|\*|<|>|\+=) )");
    static const std::regex str(R"("[^"]*")");
    static const std::set<std::string> reserved = {"var",    "let",   "const", "int",  "long",   "auto", "final",
                                                   "return", "if",    "max",   "number", "export", "function"};
    // code positions: outside string literals and comments
    std::vector<bool> code(text.size() + 1, true);
    for (std::size_t i = 0, open = std::string::npos; i < text.size(); ++i) {
        if (text[i] == '"') {
            if (open == std::string::npos) {
                open = i;
            } else {
                std::fill(code.begin() + static_cast<std::ptrdiff_t>(open), code.begin() + static_cast<std::ptrdiff_t>(i) + 1, false);
                open = std::string::npos;
            }
        } else if (open == std::string::npos && text.compare(i, lang.comment.size(), lang.comment) == 0) {
            std::fill(code.begin() + static_cast<std::ptrdiff_t>(i), code.end(), false);
            break;
        }
    }
    auto nth = [&](const std::regex& re, bool skip_reserved) -> std::optional<std::pair<std::size_t, std::size_t>> {
        std::vector<std::pair<std::size_t, std::size_t>> spans;
        for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
            if (skip_reserved && reserved.count(it->str())) continue;
            if (&re != &str && !code[static_cast<std::size_t>(it->position())]) continue;
            spans.emplace_back(static_cast<std::size_t>(it->position()), static_cast<std::size_t>(it->length()));
        }
        if (spans.empty()) return std::nullopt;
        return spans[op.which % spans.size()];
    };
    auto splice = [&](std::pair<std::size_t, std::size_t> span, const std::string& with) {
        return text.substr(0, span.first) + with + text.substr(span.first + span.second);
    };
    switch (op.kind) {
        case TokenOpKind::Number:
            if (auto s = nth(number, false)) return splice(*s, op.payload);
            break;
        case TokenOpKind::Rename:
            if (auto s = nth(ident, true)) return splice(*s, op.payload);
            break;
        case TokenOpKind::AddArg: {
            std::vector<std::size_t> closes;
            for (std::size_t i = 1; i < text.size(); ++i)
                if (text[i] == ')' && text[i - 1] != '(') closes.push_back(i);
            if (closes.empty()) break;
            const auto at = closes[op.which % closes.size()];
            return text.substr(0, at) + ", " + op.payload + text.substr(at);
        }
        case TokenOpKind::Keyword:
            for (const auto& kw : lang.decl_kw)
                if (!kw.empty() && text.rfind(kw + " ", 0) == 0 && kw != op.payload)
                    return op.payload + text.substr(kw.size());
            break;
        case TokenOpKind::Operator:
            if (auto s = nth(oper, false)) return splice(*s, " " + op.payload + " ");
            break;
        case TokenOpKind::String:
            if (auto s = nth(str, false)) return splice(*s, "\"" + op.payload + "\"");
            break;
    }
    return text;
}

struct LineEdit {
    std::vector<TokenOp> ops;
    std::optional<std::string> replaced;
    bool deleted = false;
    std::vector<Line> inserted_after;

    bool touches_line() const { return !ops.empty() || replaced || deleted; }
    bool any() const { return touches_line() || !inserted_after.empty(); }
};

using SideEdits = std::map<std::size_t, LineEdit>;  // by line id

std::string edited_text(const Line& l, const LineEdit& e, const Lang& lang) {
    std::string t = e.replaced ? *e.replaced : l.text;
    for (const auto& op : e.ops) t = apply_op(t, op, lang);
    return t;
}

void emit(std::vector<Line>& out, const Line& l, const LineEdit* e, const Lang& lang) {
    if (!e) {
        out.push_back(l);
        return;
    }
    if (!e->deleted) {
        Line copy = l;
        copy.text = edited_text(l, *e, lang);
        out.push_back(copy);
    }
    for (const auto& ins : e->inserted_after) out.push_back(ins);
}

Program apply_side(const Program& base, const SideEdits& edits, const Lang& lang) {
    Program out;
    for (const auto& l : base.lines) {
        auto it = edits.find(l.id);
        emit(out.lines, l, it == edits.end() ? nullptr : &it->second, lang);
    }
    return out;
}

class Editor {
public:
    Editor(const Lang& lang, Rng& rng, Generator& gen) : lang_(lang), rng_(rng), gen_(gen) {}

    TokenOp token_op(const std::string& text) {
        std::vector<TokenOpKind> kinds = {TokenOpKind::Number, TokenOpKind::Rename, TokenOpKind::AddArg,
                                          TokenOpKind::Operator};
        for (const auto& kw : lang_.decl_kw)
            if (!kw.empty() && text.rfind(kw + " ", 0) == 0) kinds.push_back(TokenOpKind::Keyword);
        if (text.find('"') != std::string::npos) kinds.push_back(TokenOpKind::String);
        TokenOp op{pick_of(rng_, kinds), pick(rng_, 4), {}};
        switch (op.kind) {
            case TokenOpKind::Number: op.payload = gen_.number(); break;
            case TokenOpKind::Rename: op.payload = gen_.ident(); break;
            case TokenOpKind::AddArg: op.payload = chance(rng_, 0.5) ? gen_.ident() : gen_.number(); break;
            case TokenOpKind::Keyword: op.payload = pick_of(rng_, lang_.decl_kw); break;
            case TokenOpKind::Operator: op.payload = pick_of(rng_, std::vector<std::string>{"+", "-", "*", ">=", "<="}); break;
            case TokenOpKind::String: op.payload = pick_of(rng_, kWords); break;
        }
        return op;
    }

    // One random edit of line `l` into `e`.
    void edit(const Line& l, LineEdit& e) {
        const double u = std::uniform_real_distribution<double>(0, 1)(rng_);
        if (!l.mutable_stmt || u < 0.2) {
            const std::size_t n = 1 + pick(rng_, 2);
            for (std::size_t k = 0; k < n; ++k) e.inserted_after.push_back(gen_.stmt_line(insert_indent(l)));
        } else if (u < 0.75) {
            e.ops.push_back(token_op(l.text));
            if (chance(rng_, 0.25)) e.ops.push_back(token_op(l.text));
        } else if (u < 0.9) {
            e.replaced = gen_.statement();
        } else {
            e.deleted = true;
        }
    }

    std::string insert_indent(const Line& l) {
        const auto& t = l.text;
        const bool opens = !t.empty() && (t.back() == '{' || t.back() == ':');
        if (t == "{") return l.indent + "    ";
        return opens ? l.indent + "    " : l.indent;
    }

private:
    const Lang& lang_;
    Rng& rng_;
    Generator& gen_;
};

// The developer's merge of one line both sides touched.
void resolve_line(const Line& l, const LineEdit& ea, const LineEdit& eb, const Lang& lang, Rng& rng, Generator& gen,
                  std::vector<Line>& out) {
    const double u = std::uniform_real_distribution<double>(0, 1)(rng);
    if (u < 0.34) return emit(out, l, &ea, lang);
    if (u < 0.56) return emit(out, l, &eb, lang);
    if (u < 0.9) {
        LineEdit c;
        if (ea.deleted || eb.deleted) {
            const LineEdit& other = ea.deleted ? eb : ea;
            c.deleted = (ea.deleted && eb.deleted) || chance(rng, 0.5);
            if (!c.deleted) {
                c.ops = other.ops;
                c.replaced = other.replaced;
            }
        } else {
            c.replaced = ea.replaced ? ea.replaced : eb.replaced;
            c.ops = ea.ops;
            if (!ea.replaced) c.ops.insert(c.ops.end(), eb.ops.begin(), eb.ops.end());
            else c.ops = eb.ops;
        }
        const bool a_first = chance(rng, 0.7);
        const auto& first = a_first ? ea.inserted_after : eb.inserted_after;
        const auto& second = a_first ? eb.inserted_after : ea.inserted_after;
        c.inserted_after = first;
        c.inserted_after.insert(c.inserted_after.end(), second.begin(), second.end());
        return emit(out, l, &c, lang);
    }
    Line fresh = l;
    fresh.text = l.mutable_stmt ? gen.statement() : l.text;
    out.push_back(fresh);
    if (!ea.inserted_after.empty() || !eb.inserted_after.empty()) out.push_back(gen.stmt_line(l.indent));
}

Program resolve(const Program& base, const SideEdits& a, const SideEdits& b, const Lang& lang, Rng& rng,
                Generator& gen) {
    Program out;
    for (const auto& l : base.lines) {
        auto ia = a.find(l.id);
        auto ib = b.find(l.id);
        const LineEdit* ea = ia == a.end() ? nullptr : &ia->second;
        const LineEdit* eb = ib == b.end() ? nullptr : &ib->second;
        if (ea && eb)
            resolve_line(l, *ea, *eb, lang, rng, gen, out.lines);
        else
            emit(out.lines, l, ea ? ea : eb, lang);
    }
    return out;
}

// ---------------------------------------------------------------------------
// History

struct FastImport {
    std::string stream;
    std::size_t mark = 0;
    long long time = 1500000000;

    std::size_t blob(const std::string& content) {
        ++mark;
        stream += "blob\nmark :" + std::to_string(mark) + "\ndata " + std::to_string(content.size()) + "\n" + content +
                  "\n";
        return mark;
    }

    std::size_t commit(const std::string& branch, const std::string& message, std::optional<std::size_t> from,
                       std::optional<std::size_t> merge, const std::map<std::string, std::size_t>& files) {
        ++mark;
        time += 3600;
        const auto who = std::string(merge ? "Dana Merger <dana@example.org> " : "Sam Dev <sam@example.org> ");
        stream += "commit refs/heads/" + branch + "\nmark :" + std::to_string(mark) + "\n";
        stream += "author " + who + std::to_string(time) + " +0000\n";
        stream += "committer " + who + std::to_string(time) + " +0000\n";
        stream += "data " + std::to_string(message.size()) + "\n" + message + "\n";
        if (from) stream += "from :" + std::to_string(*from) + "\n";
        if (merge) stream += "merge :" + std::to_string(*merge) + "\n";
        stream += "deleteall\n";
        for (const auto& [path, blob_mark] : files) stream += "M 100644 :" + std::to_string(blob_mark) + " " + path + "\n";
        stream += "\n";
        return mark;
    }
};

struct RepoFile {
    std::string path;
    Program program;
};

void build_repo(const fs::path& dir, const Lang& lang, std::size_t merges, std::uint64_t seed, const std::string& git) {
    Rng rng(seed);
    std::size_t next_id = 0;
    Generator gen(lang, rng, next_id);
    Editor editor(lang, rng, gen);

    std::vector<RepoFile> files;
    const std::size_t nfiles = 3 + pick(rng, 4);
    for (std::size_t f = 0; f < nfiles; ++f) {
        std::string module = gen.call_name() + std::to_string(f);
        module[0] = static_cast<char>(std::toupper(module[0]));
        files.push_back({"src/" + module + "." + lang.ext, gen.program(module)});
    }

    FastImport fi;
    auto snapshot = [&](const std::vector<Program>& progs) {
        std::map<std::string, std::size_t> m;
        for (std::size_t f = 0; f < files.size(); ++f) m[files[f].path] = fi.blob(render(progs[f], lang));
        return m;
    };
    std::vector<Program> current;
    for (const auto& f : files) current.push_back(f.program);
    std::size_t head = fi.commit("main", "initial import", std::nullopt, std::nullopt, snapshot(current));

    for (std::size_t m = 0; m < merges; ++m) {
        std::vector<SideEdits> ea(files.size()), eb(files.size());
        const bool clean_merge = chance(rng, 0.25);
        const std::size_t touched = 1 + pick(rng, std::min<std::size_t>(3, files.size()));
        std::set<std::size_t> chosen;
        while (chosen.size() < touched) chosen.insert(pick(rng, files.size()));
        for (auto f : chosen) {
            const auto& lines = current[f].lines;
            std::vector<std::size_t> stmts;
            for (std::size_t i = 0; i < lines.size(); ++i)
                if (lines[i].mutable_stmt) stmts.push_back(i);
            if (stmts.size() < 4) continue;
            if (clean_merge) {
                // edits far apart: left in the first half, right in the second
                const auto half = stmts.size() / 2;
                editor.edit(lines[stmts[pick(rng, half - 1)]], ea[f][lines[stmts[pick(rng, half - 1)]].id]);
                const auto j = stmts[half + 1 + pick(rng, stmts.size() - half - 1)];
                editor.edit(lines[j], eb[f][lines[j].id]);
                continue;
            }
            const std::size_t hot = 1 + (chance(rng, 0.3) ? 1 : 0);
            for (std::size_t h = 0; h < hot; ++h) {
                const auto i = stmts[pick(rng, stmts.size())];
                editor.edit(lines[i], ea[f][lines[i].id]);
                editor.edit(lines[i], eb[f][lines[i].id]);
                if (chance(rng, 0.3) && i + 1 < lines.size()) editor.edit(lines[i + 1], ea[f][lines[i + 1].id]);
                if (chance(rng, 0.2) && i > 0) editor.edit(lines[i - 1], eb[f][lines[i - 1].id]);
            }
            if (chance(rng, 0.5)) {
                const auto j = stmts[pick(rng, stmts.size())];
                editor.edit(lines[j], (chance(rng, 0.5) ? ea : eb)[f][lines[j].id]);
            }
        }
        std::vector<Program> left, right, merged;
        for (std::size_t f = 0; f < files.size(); ++f) {
            left.push_back(apply_side(current[f], ea[f], lang));
            right.push_back(apply_side(current[f], eb[f], lang));
            merged.push_back(resolve(current[f], ea[f], eb[f], lang, rng, gen));
        }
        const auto topic = "topic-" + std::to_string(m);
        const auto b = fi.commit(topic, "work on " + topic, head, std::nullopt, snapshot(right));
        const auto a = fi.commit("main", "mainline change " + std::to_string(m), head, std::nullopt, snapshot(left));
        head = fi.commit("main", "Merge branch '" + topic + "'", a, b, snapshot(merged));
        current = std::move(merged);
    }

    fs::create_directories(dir);
    auto init = mergeweave::run_process({git, "init", "-q", "-b", "main", dir.string()});
    if (!init.ok()) throw std::runtime_error("git init failed: " + init.err);
    auto imp = mergeweave::run_process({git, "-C", dir.string(), "fast-import", "--quiet"}, fi.stream);
    if (!imp.ok()) throw std::runtime_error("git fast-import failed: " + imp.err);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate git repositories with merge histories"};
    std::string out;
    std::size_t repos = 24, merges = 14;
    std::uint64_t seed = 7;
    std::string git = "git";
    app.add_option("-o,--out", out, "output directory")->required();
    app.add_option("--repos", repos, "number of repositories");
    app.add_option("--merges", merges, "merge commits per repository");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--git", git, "git executable");
    CLI11_PARSE(app, argc, argv);

    try {
        const fs::path root(out);
        fs::remove_all(root / "repos");
        fs::create_directories(root / "repos");
        std::ofstream list(root / "repos.txt");
        const auto& langs = languages();
        for (std::size_t r = 0; r < repos; ++r) {
            const auto& lang = langs[r % langs.size()];
            const auto name = lang.ext + "-project-" + std::to_string(r);
            build_repo(root / "repos" / name, lang, merges, seed * 1000003ULL + r, git);
            list << "repos/" << name << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
