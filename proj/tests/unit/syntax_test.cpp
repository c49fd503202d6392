#include <gtest/gtest.h>

#include "support.hpp"

using namespace mergeweave;

TEST(Syntax, LanguageFromPath) {
    EXPECT_EQ(language_from_path("src/a.js"), "javascript");
    EXPECT_EQ(language_from_path("x.tsx"), "typescript");
    EXPECT_EQ(language_from_path("A.java"), "java");
    EXPECT_EQ(language_from_path("P.cs"), "csharp");
    EXPECT_EQ(language_from_path("m.py"), "python");
    EXPECT_EQ(language_from_path("lib/v.hpp"), "cpp");
    EXPECT_EQ(language_from_path("dir.d/Makefile"), "unknown");
    EXPECT_EQ(language_from_path("README"), "unknown");
}

TEST(Syntax, BalancedBrackets) {
    EXPECT_TRUE(check_syntax("int f() { return g(a[1]); }\n", "cpp"));
    EXPECT_FALSE(check_syntax("int f() { return g(a[1]; }\n", "cpp"));
    EXPECT_FALSE(check_syntax("f())", "cpp"));
    auto scan = scan_brackets("{ ( ]", "cpp");
    EXPECT_EQ(scan.open, "{");
    EXPECT_EQ(scan.stray, 1u);
}

TEST(Syntax, CommentsAndStringsAreSkipped) {
    EXPECT_TRUE(check_syntax("f(\")\"); // (\n/* { */ g('(');\n", "javascript"));
    EXPECT_TRUE(check_syntax("x = `multi\n line (`\n", "javascript"));
    EXPECT_TRUE(check_syntax("def f():  # (\n    return \"\"\"(\n\"\"\"\n", "python"));
    EXPECT_FALSE(check_syntax("s = \"open\n", "java"));
    EXPECT_FALSE(check_syntax("/* never closed", "cpp"));
    EXPECT_FALSE(check_syntax("x = '''never", "python"));
}

TEST(Syntax, LanguageRulesDiffer) {
    // '#' starts a comment only in hash-comment languages
    EXPECT_TRUE(check_syntax("x = 1 # (\n", "python"));
    EXPECT_FALSE(check_syntax("x = 1 # (\n", "java"));
    // rust lifetimes are not quotes
    EXPECT_TRUE(check_syntax("fn f<'a>(x: &'a str) {}\n", "rust"));
}

TEST(Syntax, ExternalCheckerDecidesByExitStatus) {
    SyntaxChecker yes({"/bin/sh", "-c", "cat >/dev/null; exit 0", "sh"});
    SyntaxChecker no({"/bin/sh", "-c", "cat >/dev/null; exit 1", "sh"});
    EXPECT_TRUE(yes.external());
    EXPECT_TRUE(yes.check("((("));
    EXPECT_FALSE(no.check("()"));
    // the checker sees the text on stdin and the language as its last argument
    SyntaxChecker grep_lang({"/bin/sh", "-c", "grep -q hello && [ \"$1\" = python ]", "sh"});
    EXPECT_TRUE(grep_lang.check("say hello\n", "python"));
    EXPECT_FALSE(grep_lang.check("say hello\n", "java"));
}

TEST(Syntax, MissingExternalCheckerFallsBack) {
    SyntaxChecker missing({"/nonexistent/parser"});
    EXPECT_TRUE(missing.check("f()"));
    EXPECT_FALSE(missing.check("f("));
}
