#include "repairkit/code_analysis.hpp"
#include "repairkit/diff.hpp"
#include "repairkit/java_lexer.hpp"
#include "repairkit/text.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace repairkit;
using analysis::TokenKind;

TEST(Text, SplitAndJoinLines) {
  EXPECT_EQ(split_lines("a\nb\n"), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(split_lines("a\r\nb"), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(split_lines("a\n\nb"), (std::vector<std::string>{"a", "", "b"}));
  EXPECT_TRUE(split_lines("").empty());
  EXPECT_EQ(join_lines({"a", "b"}), "a\nb");
}

TEST(Text, TrimAndIndentation) {
  EXPECT_EQ(trim("  x y \t"), "x y");
  EXPECT_EQ(rtrim("  x  "), "  x");
  EXPECT_EQ(indentation("\t  return;"), "\t  ");
  EXPECT_TRUE(is_blank(" \t"));
  EXPECT_TRUE(starts_with_icase("Closed", "clo"));
  EXPECT_EQ(to_lower("AbC"), "abc");
}

TEST(Text, HashesMatchPublishedVectors) {
  // FNV-1a test vectors and the SHA-256 of "abc".
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a32("a"), 0xe40c292cU);
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Text, AtomicWriteRoundTrips) {
  auto path = std::filesystem::temp_directory_path() / "repairkit-text-test.txt";
  write_file_atomic(path, "one\ntwo\n");
  EXPECT_EQ(read_file(path), "one\ntwo\n");
  std::filesystem::remove(path);
}

TEST(Lexer, ClassifiesTokens) {
  auto toks = analysis::lex_java("if (x != null) return \"a b\"; // c\n");
  ASSERT_EQ(toks.size(), 9u);
  EXPECT_EQ(toks[0].kind, TokenKind::Keyword);
  EXPECT_EQ(toks[2].kind, TokenKind::Identifier);
  EXPECT_EQ(toks[3].text, "!=");
  EXPECT_EQ(toks[4].kind, TokenKind::Literal);
  EXPECT_EQ(toks[7].text, "\"a b\"");
  EXPECT_EQ(toks[7].kind, TokenKind::Literal);
}

TEST(Lexer, SentinelIsOneToken) {
  auto toks = analysis::lex_java("int a;\n<extra_id_0>\nreturn a;");
  auto it = std::find_if(toks.begin(), toks.end(), [](const auto &t) { return t.kind == TokenKind::Sentinel; });
  ASSERT_NE(it, toks.end());
  EXPECT_EQ(it->text, analysis::kMaskSentinel);
  EXPECT_EQ(it->line, 2);
}

TEST(Lexer, CommentsAndUnterminatedInput) {
  std::string src = "a /* x */ b // y\n\"open";
  auto comments = analysis::find_comments(src);
  ASSERT_EQ(comments.size(), 2u);
  EXPECT_EQ(src.substr(comments[0].begin, comments[0].end - comments[0].begin), "/* x */");
  auto texts = analysis::token_texts(src);
  EXPECT_EQ(texts, (std::vector<std::string>{"a", "b", "\"open"}));
}

TEST(Lexer, KeywordsExcludeLiterals) {
  EXPECT_TRUE(analysis::is_java_keyword("while"));
  EXPECT_FALSE(analysis::is_java_keyword("null"));
  EXPECT_FALSE(analysis::is_java_keyword("true"));
}

TEST(Analysis, StripCommentsAndBlanks) {
  auto lines = analysis::strip_comments_blanks("int a; // note\n\n/* gone */\n  int b;\n");
  EXPECT_EQ(lines, (std::vector<std::string>{"int a;", "  int b;"}));
}

TEST(Analysis, ExtractsMethodsInOrder) {
  analysis::SourceFile f{"A.java",
                         "class A {\n  A() {\n    x = 1;\n  }\n\n  // doc\n  int f(int a) {\n"
                         "    // inner\n    return a;\n  }\n  abstract void g();\n}\n"};
  auto ms = analysis::extract_methods(f);
  ASSERT_EQ(ms.size(), 3u);
  EXPECT_EQ(ms[0].name, "A");
  EXPECT_EQ(ms[1].name, "f");
  EXPECT_EQ(ms[1].header_lines, (std::vector<std::string>{"  int f(int a) {"}));
  EXPECT_EQ(ms[1].body_lines, (std::vector<std::string>{"    return a;"}));
  EXPECT_EQ(ms[1].footer, "  }");
  EXPECT_EQ(ms[1].original_span, (analysis::LineSpan{7, 10}));
  EXPECT_EQ(ms[1].method_id(), "A.java#f:7");
  EXPECT_TRUE(ms[2].body_lines.empty());
  EXPECT_TRUE(ms[2].footer.empty());
}

TEST(Analysis, SyntaxErrorThrows) {
  analysis::SourceFile f{"B.java", "class B { void f( { }"};
  EXPECT_THROW(analysis::extract_methods(f), analysis::ParseError);
}

TEST(Analysis, IdentifierCollection) {
  auto ids = analysis::collect_identifiers("String s = conf.getString(\"key.name\"); // other\ns.trim();");
  EXPECT_EQ(ids.at("s"), 2);
  EXPECT_EQ(ids.count("getString"), 1u);
  EXPECT_EQ(ids.count("other"), 0u);
  EXPECT_EQ(ids.count("key"), 0u);
  EXPECT_EQ(analysis::identifiers_in_order("b = a + b;"), (std::vector<std::string>{"b", "a"}));
}

TEST(Analysis, FindVerbatimComparesTrimmedLines) {
  std::string fn = "void f() {\n    a();\n    b();\n    a();\n}";
  EXPECT_EQ(analysis::find_verbatim("\n  b();\na();\n\n", fn), (analysis::LineSpan{3, 4}));
  EXPECT_EQ(analysis::find_verbatim("a();", fn), (analysis::LineSpan{2, 2}));
  EXPECT_FALSE(analysis::find_verbatim("c();", fn).has_value());
}

TEST(Diff, ParsesAndCounts) {
  std::string d = "--- a/x/A.java\n+++ b/x/A.java\n@@ -1,3 +1,3 @@\n a\n-b\n+B\n c\n";
  auto files = diff::parse_unified_diff(d);
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(files[0].path(), "x/A.java");
  ASSERT_EQ(files[0].hunks.size(), 1u);
  EXPECT_EQ(files[0].hunks[0].lines.size(), 4u);
  EXPECT_EQ(diff::count_changed_lines(d), 2);
  EXPECT_EQ(diff::apply(files[0], "a\nb\nc\n"), "a\nB\nc\n");
}

TEST(Diff, ChangeSitesForInsertions) {
  std::string d = "--- a/A\n+++ b/A\n@@ -2,1 +2,2 @@\n b\n+new\n";
  auto f = diff::parse_unified_diff(d).at(0);
  auto sites = diff::change_sites(f);
  ASSERT_EQ(sites.size(), 1u);
  EXPECT_EQ(sites[0].old_line, 2);
  EXPECT_TRUE(sites[0].insertion);
}

TEST(Diff, MismatchedContextThrows) {
  auto f = diff::parse_unified_diff("--- a/A\n+++ b/A\n@@ -1,1 +1,1 @@\n-x\n+y\n").at(0);
  EXPECT_THROW(diff::apply(f, "z\n"), diff::DiffParseError);
  EXPECT_THROW(diff::parse_unified_diff("--- a/A\n+++ b/A\n@@ -1,2 +1,1 @@\n-x\n"), diff::DiffParseError);
}
