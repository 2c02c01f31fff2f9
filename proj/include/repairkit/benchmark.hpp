#pragma once

#include "repairkit/repo_source.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace repairkit::ingest {

/// Patches larger than this many added+removed lines are out of scope.
inline constexpr int kMaxChangedLines = 22;

enum class IssueStatus { Open, Closed, Other };

std::string_view to_string(IssueStatus s);
IssueStatus status_from_string(std::string_view s);

struct Comment {
  int index = 0; // 0-based, order of appearance
  std::string author;
  std::string timestamp; // ISO-8601 as exported by the tracker
  std::string body;
};

struct IssueRecord {
  std::string key;
  std::string summary;
  std::string description;
  IssueStatus status = IssueStatus::Other;
  std::vector<Comment> comments;

  /// Throws std::invalid_argument: empty key/summary, non-dense indices.
  void validate() const;
};

struct GoldPatch {
  std::string file_path;
  std::string unified_diff;
  std::string function_before;
  std::string function_after;
  int changed_line_count = 0;
};

struct BenchmarkEntry {
  IssueRecord issue;
  std::string repo_ref;
  std::string pr_id;
  GoldPatch gold;
};

/// First violated entry invariant, or nullopt.
std::optional<std::string> check_entry(const BenchmarkEntry &entry);

class FormatError : public std::runtime_error {
public:
  FormatError(std::string source, int line, const std::string &what);
  std::string source;
  int line; // 1-based record line; 0 when not line-oriented
};

// ---- redaction ---------------------------------------------------------

/// Replaces every closed {code}/{noformat} block and ``` / ~~~ fence with
/// the literal "[code]". Unclosed openers are left as they are.
std::string redact_code_blocks(std::string_view body);

/// True when redact_code_blocks would change `body`.
bool contains_code_block(std::string_view body);

// ---- filters -----------------------------------------------------------

bool is_source_path(std::string_view path);

/// A path with a test/ or tests/ directory segment, or whose file name
/// (before the extension) ends in Test or Tests.
bool is_test_path(std::string_view path);

struct Accept {};
struct Rejection {
  std::string reason;
};
using FilterResult = std::variant<Accept, Rejection>;

/// Rules in order: issue_not_closed, pr_not_merged, multi_file,
/// non_source_file, test_file, unparseable_diff, no_changed_lines,
/// too_many_lines.
FilterResult filter_candidate(const std::vector<std::string> &pr_files, std::string_view diff,
                              IssueStatus issue_status, bool pr_merged);

// ---- linking -----------------------------------------------------------

struct ChangedFile {
  std::string path;
  std::string patch; // hunks, with or without ---/+++ headers
};

struct PullRequest {
  std::string id;
  std::string title;
  std::string body;
  bool merged = false;
  std::string base_sha;
  std::vector<ChangedFile> files;
};

/// Issue key -> PRs whose title or body mention it.
using PrIndex = std::map<std::string, std::vector<PullRequest>, std::less<>>;

PrIndex build_pr_index(const std::vector<PullRequest> &prs);

/// Issue-tracker keys (PROJECT-123) mentioned in `text`, deduplicated.
std::vector<std::string> mentioned_issue_keys(std::string_view text);

/// The unique merged PR mentioning the issue; nullopt if none or several.
std::optional<std::string> link_issue_to_pr(const IssueRecord &issue, const PrIndex &index);

// ---- exports -----------------------------------------------------------

/// Jira REST search export: {"issues": [{"key", "fields": {...}}]}.
std::vector<IssueRecord> parse_tracker_export(std::string_view json_text,
                                              const std::string &source = "tracker export");

/// GitHub-style pull list: [{"number", "title", "body", "merged" |
/// "merged_at", "base": {"sha"}, "files": [{"filename", "patch"}]}].
std::vector<PullRequest> parse_pr_export(std::string_view json_text,
                                         const std::string &source = "pr export");

// ---- benchmark construction ---------------------------------------------

using BuildResult = std::variant<BenchmarkEntry, Rejection>;

/// Applies the filters, locates the single buggy method touched by the
/// patch, and redacts comment code blocks.
BuildResult build_entry(const IssueRecord &issue, const PullRequest &pr, const RepoSource &repo);

struct IngestReport {
  std::vector<BenchmarkEntry> entries;
  std::map<std::string, int> rejections; // reason -> count
};

IngestReport ingest(const std::vector<IssueRecord> &issues, const std::vector<PullRequest> &prs,
                    const RepoSource &repo);

// ---- benchmark file -----------------------------------------------------

nlohmann::json to_json(const IssueRecord &issue);
IssueRecord issue_from_json(const nlohmann::json &j);
nlohmann::json to_json(const BenchmarkEntry &entry);
BenchmarkEntry entry_from_json(const nlohmann::json &j);

struct LoadResult {
  std::vector<BenchmarkEntry> entries;
  std::vector<std::string> warnings; // one per skipped record
};

/// One JSON object per line. Malformed lines throw FormatError; records that
/// parse but violate an invariant are skipped with a warning.
LoadResult load_benchmark(const std::filesystem::path &path);

void write_benchmark(const std::filesystem::path &path, const std::vector<BenchmarkEntry> &entries);

// ---- changed-line distribution -----------------------------------------

struct LineBucket {
  int lo;
  int hi;
  bool hi_inclusive;
  std::string_view label;
};

/// [1,5) [5,10) [10,15) [15,20) [20,22]
const std::array<LineBucket, 5> &line_buckets();

/// Bucket index, or nullopt outside [1, 22].
std::optional<std::size_t> bucket_index(int changed_lines);

/// Counts per bucket, in bucket order.
std::vector<std::pair<std::string, int>> bucket_histogram(const std::vector<int> &changed_lines);

} // namespace repairkit::ingest
