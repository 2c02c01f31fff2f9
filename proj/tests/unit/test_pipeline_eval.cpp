#include "repairkit/cli.hpp"
#include "repairkit/codebleu.hpp"
#include "repairkit/corpus.hpp"
#include "repairkit/evaluation.hpp"
#include "repairkit/pipeline.hpp"
#include "repairkit/text.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>

#include <unistd.h>

using namespace repairkit;
using namespace repairkit::pipeline;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kMini = fs::path(REPAIRKIT_FIXTURE_DIR) / "mini";

const std::string kFunction = "    int f(int a) {\n        int b = a;\n        b++;\n"
                              "        return b;\n    }";

std::vector<ingest::BenchmarkEntry> mini_entries() {
  return ingest::load_benchmark(kMini / "benchmark.jsonl").entries;
}

struct ReplayFixture : ::testing::Test {
  ReplayFixture()
      : gw([] {
          gateway::GatewayConfig c;
          c.cache_dir = kMini / "cache";
          return c;
        }()),
        repo(kMini / "repo"), retrieval(corpus::load_corpus(kMini / "corpus.jsonl")),
        pipe({&gw, &lib, &retrieval, &repo}) {}

  gateway::Gateway gw;
  prompts::Library lib;
  DirectorySource repo;
  refpatch::RetrievalProvider retrieval;
  Pipeline pipe;
};

std::vector<std::string> stages(const RepairOutcome &o) {
  std::vector<std::string> s;
  for (const auto &t : o.transcript) s.push_back(t.stage);
  return s;
}

} // namespace

TEST(Config, VariantNames) {
  EXPECT_EQ((PipelineConfig{}.variant()), "full");
  EXPECT_EQ((PipelineConfig{false, true, true}.variant()), "-DR");
  EXPECT_EQ((PipelineConfig{true, false, false}.variant()), "-PF-ID");
}

TEST(DraftPrompt, SectionsFollowConfig) {
  prompts::Library lib;
  auto task = make_task(mini_entries()[0], {});
  task.dr = {"MINI-1", {{"Add a null check", 1}}, {}};
  auto req = assemble_draft_prompt(task, lib);
  ASSERT_EQ(req.messages.size(), 1u);
  EXPECT_EQ(req.request_tag, "draft");
  const auto &text = req.messages[0].content;
  EXPECT_NE(text.find(kSummaryHeader), std::string::npos);
  EXPECT_NE(text.find(task.buggy_function), std::string::npos);
  EXPECT_NE(text.find(kDrHeader), std::string::npos);
  EXPECT_LT(text.find(kSummaryHeader), text.find(kDrHeader));

  task.config.use_dr = false;
  EXPECT_EQ(assemble_draft_prompt(task, lib).messages[0].content.find(kDrHeader), std::string::npos);
  task.config.use_dr = true;
  task.dr = {};
  EXPECT_EQ(assemble_draft_prompt(task, lib).messages[0].content.find(kDrHeader), std::string::npos);
}

TEST(ParseDraft, PairsFencesAndDrops) {
  std::string answer =
      "Sure.\n<buggy_snippet>\n```java\n        b++;\n```\n</buggy_snippet>\n<patch>\n```\n"
      "        b += 2;\n```\n</patch>\n"
      "<buggy_snippet>\nnot in function\n</buggy_snippet><patch>x</patch>\n"
      "<buggy_snippet>\n        return b;\n</buggy_snippet><patch>\n\n</patch>";
  auto pairs = parse_draft_output(answer, kFunction);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].buggy_snippet, "        b++;");
  EXPECT_EQ(pairs[0].patch, "        b += 2;");
  EXPECT_EQ(pairs[0].span, (analysis::LineSpan{3, 3}));

  EXPECT_THROW(parse_draft_output("no markers at all", kFunction), ParseError);
  EXPECT_THROW(parse_draft_output("<buggy_snippet>\n        b++;\n        return b;\n</buggy_snippet>"
                                  "<patch>a</patch><buggy_snippet>        return b;</buggy_snippet>"
                                  "<patch>b</patch>",
                                  kFunction),
               OverlapError);
}

TEST(ApplyPatch, BottomUpWithIndentation) {
  std::vector<SnippetPatchPair> pairs = {{"int b = a;", "int b = a * 2;", {2, 2}},
                                         {"return b;", "if (b < 0) {\n    return 0;\n}\nreturn b;", {4, 4}}};
  std::string out = apply_patch(kFunction, pairs);
  EXPECT_EQ(out, "    int f(int a) {\n        int b = a * 2;\n        b++;\n        if (b < 0) {\n"
                 "    return 0;\n        }\n        return b;\n    }");
  EXPECT_EQ(apply_patch(kFunction, {{"b++;", "        b--;", {3, 3}}}),
            "    int f(int a) {\n        int b = a;\n        b--;\n        return b;\n    }");
  EXPECT_THROW(apply_patch(kFunction, {{"", "x", {1, 2}}, {"", "y", {2, 3}}}), OverlapError);
  EXPECT_THROW(apply_patch(kFunction, {{"", "x", {6, 6}}}), std::invalid_argument);
}

TEST(FinalPrompt, KeepsDraftTurnsAndHonoursAblations) {
  prompts::Library lib;
  auto task = make_task(mini_entries()[0], {});
  auto draft = assemble_draft_prompt(task, lib);
  std::vector<std::optional<refpatch::ReferencePatch>> refs = {
      refpatch::ReferencePatch{"return x;", refpatch::ProviderId::Retrieval, 1.0}};
  std::vector<ident::IdentifierSuggestion> sugg = {{"get", {{"getString", 0.8, ident::CandidateSource::File}}}};

  auto req = assemble_final_prompt(task, draft, "draft answer", refs, sugg, lib);
  ASSERT_EQ(req.messages.size(), 3u);
  EXPECT_EQ(req.messages[0].content, draft.messages[0].content);
  EXPECT_EQ(req.messages[1].role, gateway::Role::Assistant);
  EXPECT_EQ(req.messages[1].content, "draft answer");
  EXPECT_EQ(req.request_tag, "final");
  const auto &last = req.messages[2].content;
  EXPECT_EQ(last.rfind(lib.get("final_role"), 0), 0u);
  EXPECT_NE(last.find("[Reference Patch 1]"), std::string::npos);
  EXPECT_NE(last.find(kIdentifierHeader), std::string::npos);

  task.config.use_reference = false;
  task.config.use_identifiers = false;
  auto ablated = assemble_final_prompt(task, draft, "draft answer", refs, sugg, lib).messages[2].content;
  EXPECT_EQ(ablated.find(kReferenceHeader), std::string::npos);
  EXPECT_EQ(ablated.find(kIdentifierHeader), std::string::npos);
}

TEST_F(ReplayFixture, FullRunRepairsNullCheck) {
  auto entries = mini_entries();
  auto o = pipe.run(make_task(entries[0], {}));
  EXPECT_FALSE(o.error.has_value());
  EXPECT_EQ(stages(o), (std::vector<std::string>{"dr", "draft", "final"}));
  EXPECT_EQ(o.dr.solutions.size(), 1u);
  ASSERT_EQ(o.references.size(), o.draft_pairs.size());
  ASSERT_FALSE(o.suggestions.empty());
  EXPECT_EQ(o.suggestions[0].suspect, "get");
  EXPECT_TRUE(eval::full_match(o.repaired_function, entries[0].gold.function_after));
  EXPECT_EQ(o.repaired_function, apply_patch(entries[0].gold.function_before, o.final_pairs));
  EXPECT_EQ(gw.network_calls(), 0u);
}

TEST_F(ReplayFixture, ReformatAndFallbackPaths) {
  auto entries = mini_entries();
  auto m3 = pipe.run(make_task(entries[2], {}));
  EXPECT_EQ(stages(m3), (std::vector<std::string>{"dr", "draft", "draft-reformat", "final"}));
  auto m4 = pipe.run(make_task(entries[3], {}));
  EXPECT_EQ(stages(m4), (std::vector<std::string>{"dr", "dr-reformat", "draft", "final", "final-reformat"}));
  EXPECT_TRUE(m4.fallback_used);
  EXPECT_EQ(m4.final_pairs, m4.draft_pairs);
  auto m6 = pipe.run(make_task(entries[5], {}));
  EXPECT_EQ(stages(m6), (std::vector<std::string>{"draft", "final"}));
}

TEST_F(ReplayFixture, MissingCacheEntryIsATaskError) {
  auto entry = mini_entries()[1];
  entry.issue.summary += " (edited)";
  auto o = pipe.run(make_task(entry, {}));
  ASSERT_TRUE(o.error.has_value());
  EXPECT_EQ(o.repaired_function, entry.gold.function_before);
}

TEST_F(ReplayFixture, OutcomeJsonRoundTrip) {
  auto o = pipe.run(make_task(mini_entries()[4], {}));
  EXPECT_EQ(o.final_pairs.size(), 2u);
  auto back = outcome_from_json(to_json(o));
  EXPECT_EQ(to_json(back), to_json(o));
  EXPECT_EQ(back.final_pairs, o.final_pairs);
}

TEST(Eval, NormalizationAndFullMatch) {
  EXPECT_EQ(eval::normalized_lines("  a \n\n\tb\n"), (std::vector<std::string>{"a", "b"}));
  EXPECT_TRUE(eval::full_match("int f() {\n  return 1;\n}", "int f() {\n\n        return 1;\n}\n"));
  EXPECT_FALSE(eval::full_match("return 1;", "return  1;"));
}

TEST(Eval, SummaryArithmetic) {
  EXPECT_THROW(eval::summarize({}, {}), eval::EmptyRun);
  std::vector<eval::EvalOutcome> o(4);
  o[0].full_match = true;
  o[0].codebleu.total = 1.0;
  o[1].codebleu.total = 0.5;
  o[2].errored = true;
  o[3].fallback_used = true;
  auto s = eval::summarize(o, {}, "-ID");
  EXPECT_EQ(s.variant, "-ID");
  EXPECT_EQ(s.n_full_match, 1u);
  EXPECT_DOUBLE_EQ(s.full_match_ratio, 0.25);
  EXPECT_DOUBLE_EQ(s.mean_codebleu, 0.375);
  EXPECT_EQ(s.n_errored, 1u);
  EXPECT_EQ(s.n_fallback, 1u);
}

TEST(Eval, FormattingAndDrops) {
  EXPECT_EQ(eval::format_percent(0.5), "50.00%");
  EXPECT_EQ(eval::format_count(23, 714), "23(3.22%)");
  EXPECT_DOUBLE_EQ(eval::drop_ratio(10, 5), 0.5);
  EXPECT_DOUBLE_EQ(eval::drop_ratio(10, 12), -0.2);
  EXPECT_THROW(eval::drop_ratio(0, 1), eval::DivisionByZero);
}

TEST(Eval, ReportListsVariantsAndDrops) {
  eval::RunSummary full{"full", 10, 5, 0.5, 0.8, 0, 0, {}};
  eval::RunSummary dr{"-DR", 10, 4, 0.4, 0.6, 0, 0, {}};
  auto text = eval::render_report({full, dr});
  EXPECT_NE(text.find("5(50.00%)"), std::string::npos) << text;
  EXPECT_NE(text.find("4(40.00%)"), std::string::npos);
  EXPECT_NE(text.find("20.00%"), std::string::npos);
  EXPECT_NE(text.find("25.00%"), std::string::npos);
  EXPECT_EQ(eval::render_report({dr}).find("Ablation"), std::string::npos);
}

TEST(Eval, ErroredOutcomeIsScoredOnItsText) {
  auto e = mini_entries()[0];
  RepairOutcome o;
  o.task_id = e.issue.key;
  o.repaired_function = e.gold.function_before;
  o.error = "boom";
  auto r = eval::evaluate_outcome(o, e.gold);
  EXPECT_TRUE(r.errored);
  EXPECT_FALSE(r.full_match);
  EXPECT_DOUBLE_EQ(r.codebleu.total,
                   codebleu::codebleu(e.gold.function_before, e.gold.function_after).total);
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("repairkit-cli-" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  fs::path dir;
};

TEST_F(CliTest, IngestReproducesFixture) {
  int rc = cli::run({"ingest", "--issues", (kMini / "issues.json").string(), "--prs",
                     (kMini / "prs.json").string(), "--repo", (kMini / "repo").string(), "--out",
                     (dir / "b.jsonl").string()});
  EXPECT_EQ(rc, cli::kOk);
  EXPECT_EQ(read_file(dir / "b.jsonl"), read_file(kMini / "benchmark.jsonl"));
  EXPECT_EQ(json::parse(read_file(dir / "b.jsonl.rejections.json")),
            json::parse(read_file(kMini / "rejections.json")));
}

TEST_F(CliTest, BadInputsExitWithTwo) {
  EXPECT_EQ(cli::run(std::vector<std::string>{}), cli::kInputError);
  EXPECT_EQ(cli::run({"repair", "--benchmark", "/nonexistent", "--out", "x", "--cache-dir", "c"}),
            cli::kInputError);
  write_file_atomic(dir / "broken.json", "{");
  EXPECT_EQ(cli::run({"ingest", "--issues", (dir / "broken.json").string(), "--prs",
                      (kMini / "prs.json").string(), "--repo", (kMini / "repo").string(), "--out",
                      (dir / "b.jsonl").string()}),
            cli::kInputError);
  unsetenv("REPAIRKIT_CLI_UNSET_KEY");
  EXPECT_EQ(cli::run({"repair", "--benchmark", (kMini / "benchmark.jsonl").string(), "--out",
                      (dir / "o.jsonl").string(), "--cache-dir", (dir / "c").string(), "--provider",
                      "http", "--endpoint", "http://127.0.0.1:9/v1", "--api-key-env",
                      "REPAIRKIT_CLI_UNSET_KEY"}),
            cli::kInputError);
}

TEST_F(CliTest, EmptyBenchmarkExitsWithOne) {
  write_file_atomic(dir / "empty.jsonl", "");
  EXPECT_EQ(cli::run({"repair", "--benchmark", (dir / "empty.jsonl").string(), "--out",
                      (dir / "o.jsonl").string(), "--cache-dir", (kMini / "cache").string()}),
            cli::kEmpty);
}

TEST_F(CliTest, ConfigFileSuppliesOptions) {
  write_file_atomic(dir / "repair.ini",
                    "[repair]\nbenchmark=" + (kMini / "benchmark.jsonl").string() +
                        "\ncache-dir=" + (kMini / "cache").string() + "\nrepo=" + (kMini / "repo").string() +
                        "\ncorpus=" + (kMini / "corpus.jsonl").string() + "\nprovider=replay\nlimit=2\n");
  EXPECT_EQ(cli::run({"--config", (dir / "repair.ini").string(), "repair", "--out",
                      (dir / "o.jsonl").string()}),
            cli::kOk);
  auto outcomes = pipeline::load_outcomes(dir / "o.jsonl");
  ASSERT_EQ(outcomes.size(), 2u);
  for (const auto &o : outcomes) EXPECT_FALSE(o.error.has_value()) << o.task_id;
}

TEST_F(CliTest, EvalWritesReport) {
  int rc = cli::run({"eval", "--benchmark", (kMini / "benchmark.jsonl").string(), "--outcomes",
                     (kMini / "golden" / "full.jsonl").string(), "--outcomes",
                     (kMini / "golden" / "minus-dr.jsonl").string(), "--out", dir.string()});
  EXPECT_EQ(rc, cli::kOk);
  auto summary = json::parse(read_file(dir / "summary.json"));
  ASSERT_TRUE(summary.is_array());
  EXPECT_EQ(summary[0]["variant"], "full");
  EXPECT_EQ(summary[0]["n_full_match"], 5);
  EXPECT_EQ(summary[1]["n_full_match"], 4);
  EXPECT_EQ(split_lines(read_file(dir / "records.jsonl")).size(), 12u);
  EXPECT_NE(read_file(dir / "report.txt").find("Ablation"), std::string::npos);
}

TEST_F(CliTest, ScorePrintsComponents) {
  write_file_atomic(dir / "a.java", "return a + 1;");
  testing::internal::CaptureStdout();
  int rc = cli::run({"score", "--candidate", (dir / "a.java").string(), "--reference", (dir / "a.java").string()});
  auto out = json::parse(testing::internal::GetCapturedStdout());
  EXPECT_EQ(rc, cli::kOk);
  EXPECT_DOUBLE_EQ(out["total"].get<double>(), 1.0);
}
