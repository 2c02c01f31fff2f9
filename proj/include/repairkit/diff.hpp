#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace repairkit::diff {

class DiffParseError : public std::runtime_error {
public:
  DiffParseError(int line, const std::string &what);
  int line; // 1-based line of the diff text
};

enum class LineKind { Context, Added, Removed };

struct HunkLine {
  LineKind kind;
  std::string text;
};

struct Hunk {
  int old_start = 0;
  int old_count = 0;
  int new_start = 0;
  int new_count = 0;
  std::vector<HunkLine> lines;
};

struct FileDiff {
  std::string old_path;
  std::string new_path;
  std::vector<Hunk> hunks;

  /// Path the change applies to, with any a/ or b/ prefix removed.
  std::string path() const;
};

/// Parses a unified diff (git or plain). Empty input yields no files.
std::vector<FileDiff> parse_unified_diff(std::string_view text);

/// Added plus removed lines across all hunks; context lines excluded.
int count_changed_lines(std::string_view unified_diff);

/// Old-file line numbers (1-based) touched by a hunk: removed lines, plus
/// for pure insertions the old line after which text is inserted (0 when
/// inserting before the first line).
struct ChangeSite {
  int old_line;
  bool insertion;
};
std::vector<ChangeSite> change_sites(const FileDiff &file);

/// Applies the hunks to `old_text`. Context and removed lines must match
/// exactly; throws DiffParseError otherwise.
std::string apply(const FileDiff &file, std::string_view old_text);

} // namespace repairkit::diff
