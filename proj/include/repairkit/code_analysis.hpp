#pragma once

#include "repairkit/java_syntax.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace repairkit::analysis {

struct SourceFile {
  std::string path;
  std::string text;
};

/// Inclusive 1-based line range.
struct LineSpan {
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }
  bool overlaps(const LineSpan &o) const { return start <= o.end && o.start <= end; }
  friend bool operator==(const LineSpan &, const LineSpan &) = default;
};

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string &path, SourceLocation where);
  SourceLocation where;
};

/// A method or constructor with comments and blank lines removed.
///
/// `header_lines + body_lines + footer` is the stripped method text. The
/// header ends with the body's opening brace; the footer is the closing
/// brace with its original indentation. Abstract and interface methods
/// have no body, empty `body_lines` and an empty footer.
struct MethodUnit {
  std::string file_path;
  std::string name;
  std::string signature;
  int header_line = 0;
  std::vector<std::string> header_lines;
  std::vector<std::string> body_lines;
  std::string footer;
  LineSpan original_span;

  std::string method_id() const;
  std::vector<std::string> stripped_lines() const;
  std::string stripped_text() const;
};

/// One unit per method/constructor declaration, in source order. Throws
/// ParseError when the file has any syntax error.
std::vector<MethodUnit> extract_methods(const SourceFile &file);

/// Removes line, block and doc comments and blank lines. Lines that lost a
/// comment are right-trimmed; other lines are kept verbatim.
std::vector<std::string> strip_comments_blanks(std::string_view text);

using IdentifierCounts = std::map<std::string, int, std::less<>>;

/// Identifier tokens (declarations and uses); keywords, literals and the
/// contents of strings and comments are excluded.
IdentifierCounts collect_identifiers(std::string_view text);

/// Identifiers in order of first appearance, without duplicates.
std::vector<std::string> identifiers_in_order(std::string_view text);

enum class TableScope { File, Project };

struct IdentifierTable {
  TableScope scope = TableScope::File;
  IdentifierCounts counts;

  void add(std::string_view text);
  bool contains(std::string_view name) const { return counts.find(name) != counts.end(); }
};

IdentifierTable build_identifier_table(TableScope scope, const std::vector<SourceFile> &files);

/// First occurrence of `snippet` in `function_text`, comparing trimmed
/// lines. Leading and trailing blank lines of the snippet are ignored.
std::optional<LineSpan> find_verbatim(std::string_view snippet, std::string_view function_text);

} // namespace repairkit::analysis
