#include "repairkit/diff.hpp"

#include "repairkit/text.hpp"

#include <fmt/format.h>

#include <regex>

namespace repairkit::diff {

DiffParseError::DiffParseError(int l, const std::string &what)
    : std::runtime_error(fmt::format("diff line {}: {}", l, what)), line(l) {}

namespace {

std::string header_path(std::string_view rest) {
  // "--- a/path\t2020-01-01 ..." -> "a/path"
  auto tab = rest.find('\t');
  if (tab != std::string_view::npos) {
    rest = rest.substr(0, tab);
  }
  return std::string(trim(rest));
}

std::string strip_prefix(const std::string &p) {
  if (p.size() > 2 && (p.rfind("a/", 0) == 0 || p.rfind("b/", 0) == 0)) {
    return p.substr(2);
  }
  return p;
}

} // namespace

std::string FileDiff::path() const {
  if (!new_path.empty() && new_path != "/dev/null") {
    return strip_prefix(new_path);
  }
  return strip_prefix(old_path);
}

std::vector<FileDiff> parse_unified_diff(std::string_view text) {
  static const std::regex hunk_re(R"(^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@.*$)");
  std::vector<FileDiff> files;
  auto lines = split_lines(text);
  int old_left = 0;
  int new_left = 0;
  Hunk *hunk = nullptr;

  auto current_file = [&]() -> FileDiff & {
    if (files.empty()) {
      files.emplace_back();
    }
    return files.back();
  };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string &line = lines[i];
    const int lineno = static_cast<int>(i) + 1;
    if (hunk && (old_left > 0 || new_left > 0)) {
      if (line.rfind("\\", 0) == 0) {
        continue;
      }
      char tag = line.empty() ? ' ' : line[0];
      std::string body = line.empty() ? std::string() : line.substr(1);
      if (tag == ' ') {
        if (old_left == 0 || new_left == 0) {
          throw DiffParseError(lineno, "context line exceeds hunk header counts");
        }
        hunk->lines.push_back({LineKind::Context, body});
        --old_left;
        --new_left;
      } else if (tag == '-') {
        if (old_left == 0) {
          throw DiffParseError(lineno, "removed line exceeds hunk header count");
        }
        hunk->lines.push_back({LineKind::Removed, body});
        --old_left;
      } else if (tag == '+') {
        if (new_left == 0) {
          throw DiffParseError(lineno, "added line exceeds hunk header count");
        }
        hunk->lines.push_back({LineKind::Added, body});
        --new_left;
      } else {
        throw DiffParseError(lineno, "unexpected line inside hunk");
      }
      continue;
    }
    hunk = nullptr;
    if (line.rfind("\\", 0) == 0) {
      continue;
    }
    if (line.rfind("diff ", 0) == 0) {
      files.emplace_back();
      static const std::regex git_re(R"(^diff --git (\S+) (\S+)$)");
      std::smatch m;
      if (std::regex_match(line, m, git_re)) {
        files.back().old_path = m[1].str();
        files.back().new_path = m[2].str();
      }
      continue;
    }
    if (line.rfind("--- ", 0) == 0) {
      if (files.empty() || !files.back().hunks.empty()) {
        files.emplace_back();
      }
      files.back().old_path = header_path(std::string_view(line).substr(4));
      continue;
    }
    if (line.rfind("+++ ", 0) == 0) {
      current_file().new_path = header_path(std::string_view(line).substr(4));
      continue;
    }
    if (line.rfind("@@", 0) == 0) {
      std::smatch m;
      if (!std::regex_match(line, m, hunk_re)) {
        throw DiffParseError(lineno, "malformed hunk header");
      }
      Hunk h;
      h.old_start = std::stoi(m[1].str());
      h.old_count = m[2].matched ? std::stoi(m[2].str()) : 1;
      h.new_start = std::stoi(m[3].str());
      h.new_count = m[4].matched ? std::stoi(m[4].str()) : 1;
      auto &file = current_file();
      file.hunks.push_back(std::move(h));
      hunk = &file.hunks.back();
      old_left = hunk->old_count;
      new_left = hunk->new_count;
      continue;
    }
    if (!line.empty() && (line[0] == '+' || line[0] == '-' || line[0] == ' ') &&
        !files.empty() && !files.back().hunks.empty()) {
      throw DiffParseError(lineno, "change line outside any hunk");
    }
    // Other git metadata (index, mode, rename, similarity) is ignored.
  }
  if (hunk && (old_left > 0 || new_left > 0)) {
    throw DiffParseError(static_cast<int>(lines.size()), "truncated hunk");
  }
  return files;
}

int count_changed_lines(std::string_view unified_diff) {
  int n = 0;
  for (const auto &file : parse_unified_diff(unified_diff)) {
    for (const auto &hunk : file.hunks) {
      for (const auto &l : hunk.lines) {
        if (l.kind != LineKind::Context) {
          ++n;
        }
      }
    }
  }
  return n;
}

std::vector<ChangeSite> change_sites(const FileDiff &file) {
  std::vector<ChangeSite> sites;
  for (const auto &hunk : file.hunks) {
    int old_line = hunk.old_count == 0 ? hunk.old_start + 1 : hunk.old_start;
    std::size_t i = 0;
    while (i < hunk.lines.size()) {
      if (hunk.lines[i].kind == LineKind::Context) {
        ++old_line;
        ++i;
        continue;
      }
      int block_start = old_line;
      bool removed_any = false;
      while (i < hunk.lines.size() && hunk.lines[i].kind != LineKind::Context) {
        if (hunk.lines[i].kind == LineKind::Removed) {
          sites.push_back({old_line, false});
          ++old_line;
          removed_any = true;
        }
        ++i;
      }
      if (!removed_any) {
        sites.push_back({block_start - 1, true});
      }
    }
  }
  return sites;
}

std::string apply(const FileDiff &file, std::string_view old_text) {
  auto old_lines = split_lines(old_text);
  std::vector<std::string> out;
  std::size_t cursor = 0; // 0-based index of next unconsumed old line
  for (const auto &hunk : file.hunks) {
    std::size_t start = hunk.old_count == 0 ? static_cast<std::size_t>(hunk.old_start)
                                            : static_cast<std::size_t>(hunk.old_start - 1);
    if (start < cursor || start > old_lines.size()) {
      throw DiffParseError(0, fmt::format("hunk at old line {} is out of order or range",
                                          hunk.old_start));
    }
    while (cursor < start) {
      out.push_back(old_lines[cursor++]);
    }
    for (const auto &l : hunk.lines) {
      if (l.kind == LineKind::Added) {
        out.push_back(l.text);
        continue;
      }
      if (cursor >= old_lines.size() || old_lines[cursor] != l.text) {
        throw DiffParseError(0, fmt::format("hunk does not match old line {}", cursor + 1));
      }
      if (l.kind == LineKind::Context) {
        out.push_back(old_lines[cursor]);
      }
      ++cursor;
    }
  }
  while (cursor < old_lines.size()) {
    out.push_back(old_lines[cursor++]);
  }
  std::string result = join_lines(out);
  if (!old_text.empty() && old_text.back() == '\n' && !result.empty()) {
    result += '\n';
  }
  return result;
}

} // namespace repairkit::diff
