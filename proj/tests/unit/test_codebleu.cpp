#include "repairkit/codebleu.hpp"
#include "repairkit/java_lexer.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace repairkit::codebleu;

namespace {
constexpr double kTol = 1e-12;

std::vector<std::string> toks(std::initializer_list<const char *> l) { return {l.begin(), l.end()}; }
} // namespace

TEST(Bleu, BrevityPenaltyOnly) {
  // All precisions are 1; c = 4, r = 5.
  EXPECT_NEAR(ngram_bleu(toks({"a", "b", "c", "d"}), toks({"a", "b", "c", "d", "e"})), std::exp(-0.25), kTol);
}

TEST(Bleu, EmptySides) {
  EXPECT_EQ(ngram_bleu(std::vector<std::string>{}, std::vector<std::string>{}), 1.0);
  EXPECT_EQ(ngram_bleu(std::vector<std::string>{}, toks({"a"})), 0.0);
  EXPECT_EQ(ngram_bleu(toks({"x"}), toks({"a"})), 0.0);
}

TEST(Bleu, ClippingCountsReferenceOccurrencesOnce) {
  // Unigram p1 = 1/3 (one "a" is clipped in), higher orders smoothed:
  // p2 = 1/3, p3 = 1/2, p4 = 1/1; c = 3 > r = 1 so no penalty.
  double expected = std::pow((1.0 / 3) * (1.0 / 3) * (1.0 / 2) * 1.0, 0.25);
  EXPECT_NEAR(ngram_bleu(toks({"a", "a", "a"}), toks({"a"})), expected, kTol);
}

TEST(Bleu, KeywordWeighting) {
  // "if" weighs 5: p1 = 5/6, p2 = (0+1)/(5+1), p3 = p4 = 1 after smoothing.
  double w = weighted_ngram_bleu(toks({"if", "x"}), toks({"if", "y"}), {"if"});
  EXPECT_NEAR(w, std::pow(5.0 / 36.0, 0.25), kTol);
  double plain = ngram_bleu(toks({"if", "x"}), toks({"if", "y"}));
  EXPECT_NEAR(plain, std::pow(0.5 * 1.0 / 2.0, 0.25), kTol);
}

TEST(Weights, Validation) {
  EXPECT_NO_THROW((Weights{0.25, 0.25, 0.25, 0.25}.validate()));
  EXPECT_THROW((Weights{0.5, 0.5, 0.5, 0}.validate()), std::invalid_argument);
  EXPECT_THROW((Weights{1.5, -0.5, 0, 0}.validate()), std::invalid_argument);
  EXPECT_THROW(codebleu("a", "a", Weights{1, 1, 0, 0}), std::invalid_argument);
}

TEST(Ast, SubtreesIgnoreIdentifierNames) {
  auto a = subtree_multiset("int x = a + 1;");
  auto b = subtree_multiset("int y = b + 1;");
  ASSERT_TRUE(a && b);
  EXPECT_EQ(*a, *b);
  EXPECT_EQ(ast_match("int y = b + 1;", "int x = a + 1;").value, 1.0);
}

TEST(Ast, WrapsMethodsAndMembers) {
  EXPECT_TRUE(subtree_multiset("void f() { g(); }").has_value());
  EXPECT_TRUE(subtree_multiset("private int count = 0;").has_value());
  EXPECT_TRUE(subtree_multiset("return a;").has_value());
}

TEST(Ast, UnparseableFallsBackToNgram) {
  auto r = ast_match("x = = ;", "x = 1 ;");
  EXPECT_TRUE(r.fallback);
  EXPECT_NEAR(r.value, ngram_bleu(std::string_view("x = = ;"), std::string_view("x = 1 ;")), kTol);
}

TEST(Dataflow, EdgesForChainedAssignments) {
  auto edges = dataflow_edges("int a = 1; int b = a; a = b + a;");
  ASSERT_TRUE(edges);
  // a = var_0, b = var_1. "int b = a" uses a, then defines b from it;
  // "a = b + a" uses both, then defines a from both.
  std::vector<DataflowEdge> want = {{"var_0", "comesFrom", "var_0"},
                                    {"var_1", "computedFrom", "var_0"},
                                    {"var_1", "comesFrom", "var_1"},
                                    {"var_0", "comesFrom", "var_0"},
                                    {"var_0", "computedFrom", "var_1"},
                                    {"var_0", "computedFrom", "var_0"}};
  EXPECT_EQ(*edges, want);
}

TEST(Dataflow, EmptyEdgeSets) {
  EXPECT_EQ(dataflow_match("return a;", "return b;").value, 1.0);
  EXPECT_EQ(dataflow_match("x = a;", "return a;").value, 0.0);
  EXPECT_EQ(dataflow_match("return a;", "x = a;").value, 0.0);
}

TEST(CodeBleu, IdentityAndBounds) {
  std::string code = "for (int i = 0; i < n; i++) { sum += v[i]; }";
  auto s = codebleu(code, code);
  EXPECT_NEAR(s.total, 1.0, kTol);
  auto t = codebleu("return 0;", code);
  EXPECT_GE(t.total, 0.0);
  EXPECT_LT(t.total, 1.0);
  EXPECT_NEAR(t.total, 0.25 * (t.ngram + t.weighted_ngram + t.ast_match + t.dataflow_match), kTol);
}
