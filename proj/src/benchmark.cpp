#include "repairkit/benchmark.hpp"

#include "repairkit/code_analysis.hpp"
#include "repairkit/diff.hpp"
#include "repairkit/text.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <set>

namespace repairkit::ingest {

using nlohmann::json;

std::string_view to_string(IssueStatus s) {
  switch (s) {
  case IssueStatus::Open:
    return "open";
  case IssueStatus::Closed:
    return "closed";
  case IssueStatus::Other:
    return "other";
  }
  return "other";
}

IssueStatus status_from_string(std::string_view s) {
  std::string lower = to_lower(trim(s));
  if (lower == "closed" || lower == "resolved") {
    return IssueStatus::Closed;
  }
  if (lower == "open" || lower == "reopened" || lower == "in progress") {
    return IssueStatus::Open;
  }
  return IssueStatus::Other;
}

void IssueRecord::validate() const {
  if (key.empty()) {
    throw std::invalid_argument("issue key is empty");
  }
  if (is_blank(summary)) {
    throw std::invalid_argument("issue " + key + " has an empty summary");
  }
  for (std::size_t i = 0; i < comments.size(); ++i) {
    if (comments[i].index != static_cast<int>(i)) {
      throw std::invalid_argument(
          fmt::format("issue {}: comment indices must be 0..n-1 in order", key));
    }
  }
}

std::optional<std::string> check_entry(const BenchmarkEntry &e) {
  try {
    e.issue.validate();
  } catch (const std::invalid_argument &ex) {
    return ex.what();
  }
  if (e.issue.status != IssueStatus::Closed) {
    return "issue " + e.issue.key + " is not closed";
  }
  const auto &g = e.gold;
  if (g.changed_line_count < 1 || g.changed_line_count > kMaxChangedLines) {
    return fmt::format("changed_line_count {} outside [1, {}]", g.changed_line_count,
                       kMaxChangedLines);
  }
  if (!is_source_path(g.file_path) || is_test_path(g.file_path)) {
    return "gold file is not a non-test source file: " + g.file_path;
  }
  for (const auto &c : e.issue.comments) {
    if (contains_code_block(c.body)) {
      return fmt::format("comment {} contains an unredacted code block", c.index);
    }
  }
  return std::nullopt;
}

FormatError::FormatError(std::string src, int l, const std::string &what)
    : std::runtime_error(l > 0 ? fmt::format("{}:{}: {}", src, l, what)
                               : fmt::format("{}: {}", src, what)),
      source(std::move(src)), line(l) {}

// ---- redaction ---------------------------------------------------------

namespace {

struct Block {
  std::size_t begin;
  std::size_t end;
};

// Opener at `pos`: returns the opener length and the closer it needs.
std::optional<std::pair<std::size_t, std::string_view>> opener_at(std::string_view s,
                                                                   std::size_t pos) {
  for (std::string_view tag : {std::string_view("{code"), std::string_view("{noformat")}) {
    if (s.compare(pos, tag.size(), tag) != 0) {
      continue;
    }
    std::size_t p = pos + tag.size();
    if (p < s.size() && s[p] == '}') {
      return std::make_pair(p + 1 - pos, tag == "{code" ? std::string_view("{code}")
                                                          : std::string_view("{noformat}"));
    }
    if (p < s.size() && s[p] == ':') {
      std::size_t close = s.find('}', p);
      if (close != std::string_view::npos && s.find('\n', p) > close) {
        return std::make_pair(close + 1 - pos, tag == "{code" ? std::string_view("{code}")
                                                                : std::string_view("{noformat}"));
      }
    }
  }
  for (std::string_view fence : {std::string_view("```"), std::string_view("~~~")}) {
    if (s.compare(pos, fence.size(), fence) == 0) {
      return std::make_pair(fence.size(), fence);
    }
  }
  return std::nullopt;
}

std::vector<Block> find_blocks(std::string_view s) {
  std::vector<Block> blocks;
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto op = opener_at(s, pos);
    if (!op) {
      ++pos;
      continue;
    }
    std::size_t close = s.find(op->second, pos + op->first);
    if (close == std::string_view::npos) {
      pos += op->first;
      continue;
    }
    std::size_t end = close + op->second.size();
    blocks.push_back({pos, end});
    pos = end;
  }
  return blocks;
}

} // namespace

std::string redact_code_blocks(std::string_view body) {
  std::string out;
  std::size_t pos = 0;
  for (const auto &b : find_blocks(body)) {
    out.append(body.substr(pos, b.begin - pos));
    out += "[code]";
    pos = b.end;
  }
  out.append(body.substr(pos));
  return out;
}

bool contains_code_block(std::string_view body) { return !find_blocks(body).empty(); }

// ---- filters -----------------------------------------------------------

bool is_source_path(std::string_view path) {
  return path.size() > 5 && path.substr(path.size() - 5) == ".java";
}

bool is_test_path(std::string_view path) {
  std::string p(path);
  std::replace(p.begin(), p.end(), '\\', '/');
  std::size_t slash = p.rfind('/');
  std::string dir = slash == std::string::npos ? "" : p.substr(0, slash);
  std::string file = slash == std::string::npos ? p : p.substr(slash + 1);
  std::size_t start = 0;
  while (start <= dir.size() && !dir.empty()) {
    std::size_t next = dir.find('/', start);
    std::string seg = dir.substr(start, next == std::string::npos ? std::string::npos : next - start);
    std::string lower = to_lower(seg);
    if (lower == "test" || lower == "tests") {
      return true;
    }
    if (next == std::string::npos) {
      break;
    }
    start = next + 1;
  }
  std::size_t dot = file.rfind('.');
  std::string stem = dot == std::string::npos ? file : file.substr(0, dot);
  auto ends_with = [&](std::string_view suffix) {
    return stem.size() >= suffix.size() && stem.compare(stem.size() - suffix.size(), suffix.size(),
                                                        suffix) == 0;
  };
  return ends_with("Test") || ends_with("Tests");
}

FilterResult filter_candidate(const std::vector<std::string> &pr_files, std::string_view diff,
                              IssueStatus issue_status, bool pr_merged) {
  if (issue_status != IssueStatus::Closed) {
    return Rejection{"issue_not_closed"};
  }
  if (!pr_merged) {
    return Rejection{"pr_not_merged"};
  }
  if (pr_files.size() != 1) {
    return Rejection{"multi_file"};
  }
  if (!is_source_path(pr_files.front())) {
    return Rejection{"non_source_file"};
  }
  if (is_test_path(pr_files.front())) {
    return Rejection{"test_file"};
  }
  int changed = 0;
  try {
    changed = diff::count_changed_lines(diff);
  } catch (const diff::DiffParseError &) {
    return Rejection{"unparseable_diff"};
  }
  if (changed == 0) {
    return Rejection{"no_changed_lines"};
  }
  if (changed > kMaxChangedLines) {
    return Rejection{"too_many_lines"};
  }
  return Accept{};
}

// ---- linking -----------------------------------------------------------

std::vector<std::string> mentioned_issue_keys(std::string_view text) {
  static const std::regex key_re(R"((^|[^A-Za-z0-9_-])([A-Z][A-Z0-9_]*-[0-9]+)(?![0-9]))");
  std::vector<std::string> keys;
  std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), key_re); it != std::sregex_iterator();
       ++it) {
    std::string k = (*it)[2].str();
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      keys.push_back(k);
    }
  }
  return keys;
}

PrIndex build_pr_index(const std::vector<PullRequest> &prs) {
  PrIndex index;
  for (const auto &pr : prs) {
    for (const auto &k : mentioned_issue_keys(pr.title + "\n" + pr.body)) {
      index[k].push_back(pr);
    }
  }
  return index;
}

std::optional<std::string> link_issue_to_pr(const IssueRecord &issue, const PrIndex &index) {
  auto it = index.find(issue.key);
  if (it == index.end()) {
    return std::nullopt;
  }
  std::optional<std::string> found;
  for (const auto &pr : it->second) {
    if (!pr.merged) {
      continue;
    }
    if (found) {
      return std::nullopt;
    }
    found = pr.id;
  }
  return found;
}

// ---- exports -----------------------------------------------------------

namespace {

std::string string_or_empty(const json &j, const char *key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    return {};
  }
  if (it->is_string()) {
    return it->get<std::string>();
  }
  return it->dump();
}

} // namespace

std::vector<IssueRecord> parse_tracker_export(std::string_view json_text,
                                              const std::string &source) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw FormatError(source, 0, fmt::format("byte {}: {}", e.byte, e.what()));
  }
  const json *issues = &doc;
  if (doc.is_object()) {
    if (!doc.contains("issues")) {
      throw FormatError(source, 0, "expected an \"issues\" array");
    }
    issues = &doc["issues"];
  }
  if (!issues->is_array()) {
    throw FormatError(source, 0, "\"issues\" is not an array");
  }
  std::vector<IssueRecord> out;
  for (std::size_t i = 0; i < issues->size(); ++i) {
    const json &raw = (*issues)[i];
    try {
      IssueRecord rec;
      rec.key = raw.at("key").get<std::string>();
      const json &f = raw.at("fields");
      rec.summary = string_or_empty(f, "summary");
      rec.description = string_or_empty(f, "description");
      if (f.contains("status") && f["status"].is_object()) {
        rec.status = status_from_string(string_or_empty(f["status"], "name"));
      } else {
        rec.status = status_from_string(string_or_empty(f, "status"));
      }
      if (f.contains("comment") && f["comment"].contains("comments")) {
        int idx = 0;
        for (const json &c : f["comment"]["comments"]) {
          Comment comment;
          comment.index = idx++;
          if (c.contains("author") && c["author"].is_object()) {
            comment.author = string_or_empty(c["author"], "displayName");
            if (comment.author.empty()) {
              comment.author = string_or_empty(c["author"], "name");
            }
          }
          comment.timestamp = string_or_empty(c, "created");
          comment.body = string_or_empty(c, "body");
          rec.comments.push_back(std::move(comment));
        }
      }
      out.push_back(std::move(rec));
    } catch (const json::exception &e) {
      throw FormatError(source, 0, fmt::format("issue #{}: {}", i, e.what()));
    }
  }
  return out;
}

std::vector<PullRequest> parse_pr_export(std::string_view json_text, const std::string &source) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw FormatError(source, 0, fmt::format("byte {}: {}", e.byte, e.what()));
  }
  if (!doc.is_array()) {
    throw FormatError(source, 0, "expected an array of pull requests");
  }
  std::vector<PullRequest> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json &raw = doc[i];
    try {
      PullRequest pr;
      pr.id = string_or_empty(raw, "number");
      if (pr.id.empty()) {
        pr.id = string_or_empty(raw, "id");
      }
      pr.title = string_or_empty(raw, "title");
      pr.body = string_or_empty(raw, "body");
      if (raw.contains("merged") && raw["merged"].is_boolean()) {
        pr.merged = raw["merged"].get<bool>();
      } else {
        pr.merged = !string_or_empty(raw, "merged_at").empty();
      }
      if (raw.contains("base") && raw["base"].is_object()) {
        pr.base_sha = string_or_empty(raw["base"], "sha");
      }
      for (const json &f : raw.value("files", json::array())) {
        pr.files.push_back({f.at("filename").get<std::string>(), string_or_empty(f, "patch")});
      }
      out.push_back(std::move(pr));
    } catch (const json::exception &e) {
      throw FormatError(source, 0, fmt::format("pull request #{}: {}", i, e.what()));
    }
  }
  return out;
}

// ---- benchmark construction ---------------------------------------------

namespace {

std::string normalized_diff(const ChangedFile &f) {
  if (f.patch.rfind("--- ", 0) == 0 || f.patch.rfind("diff ", 0) == 0) {
    return f.patch;
  }
  std::string out = "--- a/" + f.path + "\n+++ b/" + f.path + "\n" + f.patch;
  if (!out.empty() && out.back() != '\n') {
    out += '\n';
  }
  return out;
}

bool method_covers(const analysis::LineSpan &span, const diff::ChangeSite &site) {
  if (site.insertion) {
    return site.old_line >= span.start && site.old_line < span.end;
  }
  return site.old_line >= span.start && site.old_line <= span.end;
}

std::string slice_lines(const std::vector<std::string> &lines, int start, int end) {
  std::vector<std::string> out(lines.begin() + (start - 1), lines.begin() + end);
  return join_lines(out);
}

} // namespace

BuildResult build_entry(const IssueRecord &issue, const PullRequest &pr, const RepoSource &repo) {
  std::vector<std::string> paths;
  for (const auto &f : pr.files) {
    paths.push_back(f.path);
  }
  const std::string diff_text = pr.files.size() == 1 ? normalized_diff(pr.files[0]) : "";
  auto verdict = filter_candidate(paths, diff_text, issue.status, pr.merged);
  if (auto *rej = std::get_if<Rejection>(&verdict)) {
    return *rej;
  }
  const std::string &path = pr.files[0].path;
  std::string before_text;
  try {
    before_text = repo.read(path, pr.base_sha);
  } catch (const RepoError &e) {
    spdlog::warn("{}: {}", issue.key, e.what());
    return Rejection{"file_not_in_repo"};
  }
  auto files = diff::parse_unified_diff(diff_text);
  std::string after_text;
  try {
    after_text = diff::apply(files.at(0), before_text);
  } catch (const diff::DiffParseError &e) {
    spdlog::warn("{}: {}", issue.key, e.what());
    return Rejection{"diff_does_not_apply"};
  }

  std::vector<analysis::MethodUnit> methods;
  try {
    methods = analysis::extract_methods({path, before_text});
  } catch (const analysis::ParseError &e) {
    spdlog::warn("{}: {}", issue.key, e.what());
    return Rejection{"parse_error"};
  }
  auto sites = diff::change_sites(files[0]);
  const analysis::MethodUnit *target = nullptr;
  for (const auto &m : methods) {
    bool covers_all = std::all_of(sites.begin(), sites.end(),
                                  [&](const auto &s) { return method_covers(m.original_span, s); });
    if (covers_all && (!target || m.original_span.length() < target->original_span.length())) {
      target = &m;
    }
  }
  if (!target || sites.empty()) {
    return Rejection{"outside_single_method"};
  }

  int net = 0;
  for (const auto &h : files[0].hunks) {
    net += h.new_count - h.old_count;
  }
  auto before_lines = split_lines(before_text);
  auto after_lines = split_lines(after_text);
  const auto span = target->original_span;
  if (span.end + net > static_cast<int>(after_lines.size()) || span.end + net < span.start) {
    return Rejection{"outside_single_method"};
  }

  BenchmarkEntry entry;
  entry.issue = issue;
  for (auto &c : entry.issue.comments) {
    c.body = redact_code_blocks(c.body);
  }
  entry.repo_ref = pr.base_sha;
  entry.pr_id = pr.id;
  entry.gold.file_path = path;
  entry.gold.unified_diff = diff_text;
  entry.gold.function_before = slice_lines(before_lines, span.start, span.end);
  entry.gold.function_after = slice_lines(after_lines, span.start, span.end + net);
  entry.gold.changed_line_count = diff::count_changed_lines(diff_text);
  if (auto violation = check_entry(entry)) {
    spdlog::warn("{}: {}", issue.key, *violation);
    return Rejection{"invalid_entry"};
  }
  return entry;
}

IngestReport ingest(const std::vector<IssueRecord> &issues, const std::vector<PullRequest> &prs,
                    const RepoSource &repo) {
  IngestReport report;
  PrIndex index = build_pr_index(prs);
  std::map<std::string, const PullRequest *> by_id;
  for (const auto &pr : prs) {
    by_id[pr.id] = &pr;
  }
  for (const auto &issue : issues) {
    try {
      issue.validate();
    } catch (const std::invalid_argument &e) {
      spdlog::warn("{}", e.what());
      ++report.rejections["invalid_issue"];
      continue;
    }
    auto pr_id = link_issue_to_pr(issue, index);
    if (!pr_id) {
      auto it = index.find(issue.key);
      ++report.rejections[it == index.end() ? "no_linked_pr" : "ambiguous_or_unmerged_pr"];
      continue;
    }
    auto result = build_entry(issue, *by_id.at(*pr_id), repo);
    if (auto *rej = std::get_if<Rejection>(&result)) {
      ++report.rejections[rej->reason];
    } else {
      report.entries.push_back(std::get<BenchmarkEntry>(std::move(result)));
    }
  }
  return report;
}

// ---- benchmark file -----------------------------------------------------

json to_json(const IssueRecord &issue) {
  json comments = json::array();
  for (const auto &c : issue.comments) {
    comments.push_back(
        {{"index", c.index}, {"author", c.author}, {"timestamp", c.timestamp}, {"body", c.body}});
  }
  return {{"key", issue.key},
          {"summary", issue.summary},
          {"description", issue.description},
          {"status", to_string(issue.status)},
          {"comments", comments}};
}

IssueRecord issue_from_json(const json &j) {
  IssueRecord issue;
  issue.key = j.at("key").get<std::string>();
  issue.summary = j.at("summary").get<std::string>();
  issue.description = j.value("description", "");
  issue.status = status_from_string(j.at("status").get<std::string>());
  for (const auto &c : j.value("comments", json::array())) {
    issue.comments.push_back({c.at("index").get<int>(), c.value("author", ""),
                              c.value("timestamp", ""), c.at("body").get<std::string>()});
  }
  return issue;
}

json to_json(const BenchmarkEntry &e) {
  return {{"issue", to_json(e.issue)},
          {"repo_ref", e.repo_ref},
          {"pr_id", e.pr_id},
          {"gold",
           {{"file_path", e.gold.file_path},
            {"unified_diff", e.gold.unified_diff},
            {"function_before", e.gold.function_before},
            {"function_after", e.gold.function_after},
            {"changed_line_count", e.gold.changed_line_count}}}};
}

BenchmarkEntry entry_from_json(const json &j) {
  BenchmarkEntry e;
  e.issue = issue_from_json(j.at("issue"));
  e.repo_ref = j.value("repo_ref", "");
  e.pr_id = j.value("pr_id", "");
  const json &g = j.at("gold");
  e.gold.file_path = g.at("file_path").get<std::string>();
  e.gold.unified_diff = g.at("unified_diff").get<std::string>();
  e.gold.function_before = g.at("function_before").get<std::string>();
  e.gold.function_after = g.at("function_after").get<std::string>();
  e.gold.changed_line_count = g.at("changed_line_count").get<int>();
  return e;
}

LoadResult load_benchmark(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw FormatError(path.string(), 0, "cannot open benchmark file");
  }
  LoadResult result;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) {
      continue;
    }
    BenchmarkEntry entry;
    try {
      entry = entry_from_json(json::parse(line));
    } catch (const json::exception &e) {
      throw FormatError(path.string(), lineno, e.what());
    }
    if (auto violation = check_entry(entry)) {
      std::string msg = fmt::format("{}:{}: skipped {}: {}", path.string(), lineno,
                                    entry.issue.key, *violation);
      spdlog::warn("{}", msg);
      result.warnings.push_back(std::move(msg));
      continue;
    }
    result.entries.push_back(std::move(entry));
  }
  return result;
}

void write_benchmark(const std::filesystem::path &path,
                     const std::vector<BenchmarkEntry> &entries) {
  std::string out;
  for (const auto &e : entries) {
    out += to_json(e).dump();
    out += '\n';
  }
  write_file_atomic(path, out);
}

// ---- changed-line distribution -----------------------------------------

const std::array<LineBucket, 5> &line_buckets() {
  static const std::array<LineBucket, 5> kBuckets = {{
      {1, 5, false, "[1,5)"},
      {5, 10, false, "[5,10)"},
      {10, 15, false, "[10,15)"},
      {15, 20, false, "[15,20)"},
      {20, 22, true, "[20,22]"},
  }};
  return kBuckets;
}

std::optional<std::size_t> bucket_index(int n) {
  const auto &buckets = line_buckets();
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    const auto &b = buckets[i];
    if (n >= b.lo && (n < b.hi || (b.hi_inclusive && n == b.hi))) {
      return i;
    }
  }
  return std::nullopt;
}

std::vector<std::pair<std::string, int>> bucket_histogram(const std::vector<int> &changed_lines) {
  std::vector<std::pair<std::string, int>> hist;
  for (const auto &b : line_buckets()) {
    hist.emplace_back(std::string(b.label), 0);
  }
  for (int n : changed_lines) {
    auto idx = bucket_index(n);
    if (!idx) {
      throw std::invalid_argument(fmt::format("changed-line count {} is outside [1, {}]", n,
                                              kMaxChangedLines));
    }
    ++hist[*idx].second;
  }
  return hist;
}

} // namespace repairkit::ingest
