#include "repairkit/benchmark.hpp"
#include "repairkit/text.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace repairkit;
using namespace repairkit::ingest;
namespace fs = std::filesystem;

namespace {
const fs::path kMini = fs::path(REPAIRKIT_FIXTURE_DIR) / "mini";

std::string reason_of(const FilterResult &r) {
  return std::holds_alternative<Accept>(r) ? "accept" : std::get<Rejection>(r).reason;
}

const std::string kSmallDiff = "@@ -1,2 +1,2 @@\n a\n-b\n+c\n";
} // namespace

TEST(Status, MapsTrackerNames) {
  EXPECT_EQ(status_from_string("Closed"), IssueStatus::Closed);
  EXPECT_EQ(status_from_string("resolved"), IssueStatus::Closed);
  EXPECT_EQ(status_from_string("In Progress"), IssueStatus::Open);
  EXPECT_EQ(status_from_string("Reopened"), IssueStatus::Open);
  EXPECT_EQ(status_from_string("Won't Do"), IssueStatus::Other);
}

TEST(Redaction, ReplacesClosedBlocks) {
  EXPECT_EQ(redact_code_blocks("see {code:java}int x;{code} here"), "see [code] here");
  EXPECT_EQ(redact_code_blocks("a\n```\nx\n```\nb"), "a\n[code]\nb");
  EXPECT_EQ(redact_code_blocks("{noformat}trace{noformat}~~~\ny\n~~~"), "[code][code]");
  EXPECT_EQ(redact_code_blocks("unclosed {code} block"), "unclosed {code} block");
  EXPECT_TRUE(contains_code_block("x {code}y{code}"));
  EXPECT_FALSE(contains_code_block("only {code} once"));
}

TEST(Paths, SourceAndTestClassification) {
  EXPECT_TRUE(is_source_path("a/B.java"));
  EXPECT_FALSE(is_source_path("pom.xml"));
  EXPECT_TRUE(is_test_path("src/test/java/A.java"));
  EXPECT_TRUE(is_test_path("module/Tests/A.java"));
  EXPECT_TRUE(is_test_path("src/main/java/FooTest.java"));
  EXPECT_TRUE(is_test_path("src/main/java/FooTests.java"));
  EXPECT_FALSE(is_test_path("src/main/java/Testing.java"));
  EXPECT_FALSE(is_test_path("src/main/java/latest/A.java"));
}

TEST(Filters, RuleOrder) {
  std::vector<std::string> one = {"src/A.java"};
  EXPECT_EQ(reason_of(filter_candidate(one, kSmallDiff, IssueStatus::Open, false)), "issue_not_closed");
  EXPECT_EQ(reason_of(filter_candidate(one, kSmallDiff, IssueStatus::Closed, false)), "pr_not_merged");
  EXPECT_EQ(reason_of(filter_candidate({"src/A.java", "B.md"}, kSmallDiff, IssueStatus::Closed, true)),
            "multi_file");
  EXPECT_EQ(reason_of(filter_candidate({"README.md"}, kSmallDiff, IssueStatus::Closed, true)), "non_source_file");
  EXPECT_EQ(reason_of(filter_candidate({"src/ATest.java"}, kSmallDiff, IssueStatus::Closed, true)), "test_file");
  EXPECT_EQ(reason_of(filter_candidate(one, "@@ -1,5 +1,1 @@\n-a\n", IssueStatus::Closed, true)),
            "unparseable_diff");
  EXPECT_EQ(reason_of(filter_candidate(one, "@@ -1,1 +1,1 @@\n a\n", IssueStatus::Closed, true)),
            "no_changed_lines");
  EXPECT_EQ(reason_of(filter_candidate(one, kSmallDiff, IssueStatus::Closed, true)), "accept");
}

TEST(Linking, IssueKeys) {
  EXPECT_EQ(mentioned_issue_keys("Fixes FLINK-12, see FLINK-12 and SOLR-7."),
            (std::vector<std::string>{"FLINK-12", "SOLR-7"}));
  EXPECT_TRUE(mentioned_issue_keys("x-FLINK-1 lowercase-2 FLINK-").empty());
  EXPECT_EQ(mentioned_issue_keys("FLINK-123"), (std::vector<std::string>{"FLINK-123"}));
}

TEST(Linking, UniqueMergedPr) {
  PullRequest a{"1", "Fixes P-1", "", true, "s", {}};
  PullRequest b{"2", "Follow-up", "P-1 again", true, "s", {}};
  PullRequest c{"3", "P-2", "", false, "s", {}};
  PullRequest d{"4", "P-3", "", true, "s", {}};
  auto index = build_pr_index({a, b, c, d});
  IssueRecord i1{"P-1", "s", "", IssueStatus::Closed, {}};
  IssueRecord i2{"P-2", "s", "", IssueStatus::Closed, {}};
  IssueRecord i3{"P-3", "s", "", IssueStatus::Closed, {}};
  EXPECT_FALSE(link_issue_to_pr(i1, index).has_value());
  EXPECT_FALSE(link_issue_to_pr(i2, index).has_value());
  EXPECT_EQ(link_issue_to_pr(i3, index), "4");
}

TEST(Exports, MalformedInputThrows) {
  EXPECT_THROW(parse_tracker_export("{"), FormatError);
  EXPECT_THROW(parse_tracker_export("{\"issues\": 3}"), FormatError);
  EXPECT_THROW(parse_pr_export("{}"), FormatError);
}

TEST(Exports, ParsesTrackerFields) {
  auto issues = parse_tracker_export(read_file(kMini / "issues.json"));
  ASSERT_EQ(issues.size(), 14u);
  EXPECT_EQ(issues[0].key, "MINI-1");
  EXPECT_EQ(issues[0].status, IssueStatus::Closed);
  ASSERT_EQ(issues[0].comments.size(), 3u);
  EXPECT_EQ(issues[0].comments[1].author, "bob");
  EXPECT_EQ(issues[0].comments[2].index, 2);
}

TEST(Ingest, MiniProjectEndToEnd) {
  auto issues = parse_tracker_export(read_file(kMini / "issues.json"));
  auto prs = parse_pr_export(read_file(kMini / "prs.json"));
  DirectorySource repo(kMini / "repo");
  auto report = ingest::ingest(issues, prs, repo);

  std::vector<std::string> keys;
  for (const auto &e : report.entries) keys.push_back(e.issue.key);
  EXPECT_EQ(keys, (std::vector<std::string>{"MINI-1", "MINI-2", "MINI-3", "MINI-4", "MINI-5", "MINI-6"}));
  std::map<std::string, int> expected = {{"ambiguous_or_unmerged_pr", 2}, {"issue_not_closed", 1},
                                         {"multi_file", 1},               {"no_linked_pr", 1},
                                         {"outside_single_method", 1},    {"test_file", 1},
                                         {"too_many_lines", 1}};
  EXPECT_EQ(report.rejections, expected);

  for (const auto &e : report.entries) {
    EXPECT_FALSE(check_entry(e).has_value()) << e.issue.key;
  }
  const auto &m1 = report.entries[0];
  EXPECT_EQ(m1.gold.changed_line_count, 3);
  EXPECT_EQ(m1.gold.function_before.rfind("    public String targetName() {", 0), 0u);
  EXPECT_NE(m1.gold.function_after.find("return DEFAULT_TARGET;"), std::string::npos);
  EXPECT_NE(m1.issue.comments[0].body.find("[code]"), std::string::npos);
  EXPECT_EQ(m1.issue.comments[0].body.find("NullPointerException"), std::string::npos);
  EXPECT_EQ(report.entries[4].gold.changed_line_count, 4);

  // The committed fixture is exactly what ingest produces.
  auto loaded = load_benchmark(kMini / "benchmark.jsonl");
  ASSERT_EQ(loaded.entries.size(), report.entries.size());
  for (std::size_t i = 0; i < loaded.entries.size(); ++i) {
    EXPECT_EQ(to_json(loaded.entries[i]), to_json(report.entries[i]));
  }
}

TEST(BenchmarkFile, RoundTripAndSkips) {
  auto loaded = load_benchmark(kMini / "benchmark.jsonl");
  auto dir = fs::temp_directory_path() / "repairkit-bench-test";
  fs::create_directories(dir);
  write_benchmark(dir / "b.jsonl", loaded.entries);
  EXPECT_EQ(read_file(dir / "b.jsonl"), read_file(kMini / "benchmark.jsonl"));

  auto bad = to_json(loaded.entries[0]);
  bad["gold"]["changed_line_count"] = 40;
  write_file_atomic(dir / "skip.jsonl", to_json(loaded.entries[1]).dump() + "\n" + bad.dump() + "\n");
  auto partial = load_benchmark(dir / "skip.jsonl");
  EXPECT_EQ(partial.entries.size(), 1u);
  EXPECT_EQ(partial.warnings.size(), 1u);

  write_file_atomic(dir / "broken.jsonl", to_json(loaded.entries[1]).dump() + "\n{not json\n");
  try {
    load_benchmark(dir / "broken.jsonl");
    FAIL() << "expected FormatError";
  } catch (const FormatError &e) {
    EXPECT_EQ(e.line, 2);
  }
  fs::remove_all(dir);
}

TEST(Buckets, EdgesAndRange) {
  EXPECT_EQ(bucket_index(1), 0u);
  EXPECT_EQ(bucket_index(5), 1u);
  EXPECT_EQ(bucket_index(19), 3u);
  EXPECT_EQ(bucket_index(22), 4u);
  EXPECT_FALSE(bucket_index(0).has_value());
  EXPECT_FALSE(bucket_index(23).has_value());
  auto h = bucket_histogram({1, 4, 5, 20, 22});
  EXPECT_EQ(h[0], (std::pair<std::string, int>{"[1,5)", 2}));
  EXPECT_EQ(h[4], (std::pair<std::string, int>{"[20,22]", 2}));
}
