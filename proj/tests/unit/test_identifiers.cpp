#include "repairkit/identifiers.hpp"
#include "repairkit/text.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace repairkit;
using namespace repairkit::ident;

TEST(Subtokens, SplitsCamelSnakeAndDollar) {
  EXPECT_EQ(subtokens("parseHTTPHeader2"), (std::vector<std::string>{"parse", "http", "header2"}));
  EXPECT_EQ(subtokens("MAX_RETRY_count"), (std::vector<std::string>{"max", "retry", "count"}));
  EXPECT_EQ(subtokens("a$b"), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(subtokens("getString"), (std::vector<std::string>{"get", "string"}));
}

TEST(Vectorize, HashedTrigramCounts) {
  // Independent rebuild: trigrams of "#get#" and "#string#".
  std::array<double, kDims> expected{};
  for (std::string marked : {"#get#", "#string#"}) {
    for (std::size_t i = 0; i + 3 <= marked.size(); ++i) {
      expected[fnv1a32(marked.substr(i, 3)) % kDims] += 1;
    }
  }
  auto v = vectorize_identifier("getString");
  EXPECT_EQ(v.source_name, "getString");
  EXPECT_EQ(v.dims, expected);
}

TEST(Cosine, Basics) {
  auto a = vectorize_identifier("getString");
  EXPECT_NEAR(cosine(a, a), 1.0, 1e-12);
  IdentifierVector zero;
  EXPECT_EQ(cosine(a, zero), 0.0);
  auto b = vectorize_identifier("get");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < kDims; ++i) {
    dot += a.dims[i] * b.dims[i];
    na += a.dims[i] * a.dims[i];
    nb += b.dims[i] * b.dims[i];
  }
  EXPECT_NEAR(cosine(a, b), dot / std::sqrt(na * nb), 1e-12);
  EXPECT_GT(cosine(a, b), 0.0);
}

TEST(Suspects, AbsentFromBothTables) {
  analysis::IdentifierTable file;
  file.add("String target = conf.getString(TARGET);");
  analysis::IdentifierTable project{analysis::TableScope::Project, {}};
  project.add("class Configuration { String getOrDefault; }");
  auto s = detect_suspects("String t = conf.get(TARGET); t = getOrDefault; y = t;", file, project);
  EXPECT_EQ(s, (std::vector<std::string>{"t", "get", "y"}));
}

TEST(Chunks, WindowsOfPatchLength) {
  std::vector<std::string> lines = {"a", "b", "c", "d", "e"};
  auto c = chunk_file(lines, 2);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].lines, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(c[2].first_line, 4u);
  EXPECT_EQ(c[2].lines, (std::vector<std::string>{"e"}));
  EXPECT_EQ(c[1].text(), "c\nd");
  EXPECT_EQ(chunk_file(lines, 9).size(), 1u);
}

TEST(RankSnippets, BestFirstAtMostThree) {
  std::vector<Snippet> snippets = {{0, {"int a = 1;"}}, {1, {"return conf.getString(KEY);"}},
                                   {2, {"x();"}},        {3, {"return conf.getString(OTHER);"}},
                                   {4, {"}"}}};
  auto r = rank_snippets(snippets, "return conf.get(KEY);");
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].index, 1u);
  EXPECT_EQ(r[1].index, 3u);
  EXPECT_GE(r[0].score, r[1].score);
  EXPECT_GE(r[1].score, r[2].score);
}

TEST(Recommend, NeverProposesUnrelatedNames) {
  analysis::SourceFile f{"A.java", "class A {\n  int zz;\n  int qq;\n}\n"};
  auto s = recommend("getValue", f, "return getValue();");
  EXPECT_EQ(s.suspect, "getValue");
  for (const auto &c : s.candidates) EXPECT_GT(c.similarity, 0.0) << c.identifier;
}

TEST(Suggestions, MergedAndRendered) {
  analysis::SourceFile f{"C.java",
                         "class C {\n  String getString(String k) { return k; }\n"
                         "  String read() {\n    return getString(\"a\");\n  }\n}\n"};
  analysis::IdentifierTable project{analysis::TableScope::Project, {}};
  auto s = suggest_for_patches({"return get(\"a\");", "String v = get(\"b\");"}, f, project);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].suspect, "get");
  ASSERT_FALSE(s[0].candidates.empty());
  EXPECT_EQ(s[0].candidates[0].identifier, "getString");
  std::string text = render_suggestions(s);
  EXPECT_EQ(text.rfind("get may be wrong here; candidates from this file: getString", 0), 0u) << text;
  EXPECT_EQ(render_suggestions({}), "");
}
