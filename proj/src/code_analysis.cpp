#include "repairkit/code_analysis.hpp"

#include "repairkit/java_lexer.hpp"
#include "repairkit/text.hpp"

#include <fmt/format.h>

#include <set>

namespace repairkit::analysis {

ParseError::ParseError(const std::string &path, SourceLocation loc)
    : std::runtime_error(fmt::format("{}:{}:{}: syntax error", path, loc.line, loc.column)),
      where(loc) {}

std::string MethodUnit::method_id() const {
  return fmt::format("{}#{}:{}", file_path, name, header_line);
}

std::vector<std::string> MethodUnit::stripped_lines() const {
  std::vector<std::string> out = header_lines;
  out.insert(out.end(), body_lines.begin(), body_lines.end());
  if (!footer.empty()) {
    out.push_back(footer);
  }
  return out;
}

std::string MethodUnit::stripped_text() const { return join_lines(stripped_lines()); }

std::vector<std::string> strip_comments_blanks(std::string_view text) {
  auto comments = find_comments(text);
  std::vector<std::string> out;
  std::size_t ci = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    std::string kept;
    bool removed = false;
    for (std::size_t i = pos; i < end; ++i) {
      while (ci < comments.size() && comments[ci].end <= i) {
        ++ci;
      }
      if (ci < comments.size() && comments[ci].begin <= i) {
        removed = true;
        continue;
      }
      kept += text[i];
    }
    if (!kept.empty() && kept.back() == '\r') {
      kept.pop_back();
    }
    if (!is_blank(kept)) {
      out.emplace_back(removed ? rtrim(kept) : std::string_view(kept));
    }
    if (nl == std::string_view::npos) {
      break;
    }
    pos = nl + 1;
  }
  return out;
}

namespace {

std::size_t line_start(std::string_view src, std::size_t offset) {
  std::size_t p = src.rfind('\n', offset == 0 ? 0 : offset - 1);
  if (offset == 0 || p == std::string_view::npos) {
    return 0;
  }
  return p + 1;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      space = !out.empty();
    } else {
      if (space) {
        out += ' ';
      }
      out += c;
      space = false;
    }
  }
  return out;
}

MethodUnit make_unit(const SyntaxTree &tree, TSNode node, const std::string &path) {
  std::string_view src = tree.source();
  MethodUnit unit;
  unit.file_path = path;
  TSNode name = ts_node_child_by_field_name(node, "name", 4);
  unit.name = std::string(ts_node_is_null(name) ? std::string_view("<anonymous>") : tree.text(name));
  unit.header_line = static_cast<int>(ts_node_start_point(node).row) + 1;
  unit.original_span = {unit.header_line, static_cast<int>(ts_node_end_point(node).row) + 1};

  std::size_t node_start = ts_node_start_byte(node);
  TSNode body = ts_node_child_by_field_name(node, "body", 4);
  if (ts_node_is_null(body)) {
    std::string_view decl = tree.text(node);
    unit.header_lines = strip_comments_blanks(src.substr(line_start(src, node_start),
                                                         ts_node_end_byte(node) -
                                                             line_start(src, node_start)));
    std::string sig;
    for (auto &l : strip_comments_blanks(decl)) {
      sig += l;
      sig += ' ';
    }
    unit.signature = collapse_whitespace(sig);
    if (!unit.signature.empty() && unit.signature.back() == ';') {
      unit.signature.pop_back();
      unit.signature = std::string(rtrim(unit.signature));
    }
    return unit;
  }

  std::size_t open = ts_node_start_byte(body);
  std::size_t close = ts_node_end_byte(body) - 1;
  std::size_t first = line_start(src, node_start);
  unit.header_lines = strip_comments_blanks(src.substr(first, open + 1 - first));
  std::string sig;
  for (auto &l : strip_comments_blanks(src.substr(node_start, open - node_start))) {
    sig += l;
    sig += ' ';
  }
  unit.signature = collapse_whitespace(sig);
  unit.body_lines = strip_comments_blanks(src.substr(open + 1, close - open - 1));

  std::size_t close_line = line_start(src, close);
  std::string_view before_brace = src.substr(close_line, close - close_line);
  unit.footer = is_blank(before_brace) ? std::string(before_brace) + "}" : "}";
  return unit;
}

} // namespace

std::vector<MethodUnit> extract_methods(const SourceFile &file) {
  SyntaxTree tree = SyntaxTree::parse(file.text);
  if (auto err = tree.first_error()) {
    throw ParseError(file.path, *err);
  }
  std::vector<MethodUnit> units;
  walk_named(tree.root(), [&](TSNode node) {
    std::string_view type = node_type(node);
    if (type == "method_declaration" || type == "constructor_declaration" ||
        type == "compact_constructor_declaration") {
      units.push_back(make_unit(tree, node, file.path));
    }
    return true;
  });
  return units;
}

IdentifierCounts collect_identifiers(std::string_view text) {
  IdentifierCounts counts;
  for (const auto &tok : lex_java(text)) {
    if (tok.kind == TokenKind::Identifier) {
      ++counts[tok.text];
    }
  }
  return counts;
}

std::vector<std::string> identifiers_in_order(std::string_view text) {
  std::vector<std::string> out;
  std::set<std::string, std::less<>> seen;
  for (const auto &tok : lex_java(text)) {
    if (tok.kind == TokenKind::Identifier && seen.insert(tok.text).second) {
      out.push_back(tok.text);
    }
  }
  return out;
}

void IdentifierTable::add(std::string_view text) {
  for (const auto &[name, n] : collect_identifiers(text)) {
    counts[name] += n;
  }
}

IdentifierTable build_identifier_table(TableScope scope, const std::vector<SourceFile> &files) {
  IdentifierTable table{scope, {}};
  for (const auto &f : files) {
    table.add(f.text);
  }
  return table;
}

std::optional<LineSpan> find_verbatim(std::string_view snippet, std::string_view function_text) {
  std::vector<std::string_view> needle;
  auto snippet_lines = split_lines(snippet);
  for (const auto &l : snippet_lines) {
    needle.push_back(trim(l));
  }
  while (!needle.empty() && needle.front().empty()) {
    needle.erase(needle.begin());
  }
  while (!needle.empty() && needle.back().empty()) {
    needle.pop_back();
  }
  if (needle.empty()) {
    return std::nullopt;
  }
  auto hay_lines = split_lines(function_text);
  std::vector<std::string_view> hay;
  for (const auto &l : hay_lines) {
    hay.push_back(trim(l));
  }
  if (needle.size() > hay.size()) {
    return std::nullopt;
  }
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < needle.size() && match; ++j) {
      match = hay[i + j] == needle[j];
    }
    if (match) {
      return LineSpan{static_cast<int>(i) + 1, static_cast<int>(i + needle.size())};
    }
  }
  return std::nullopt;
}

} // namespace repairkit::analysis
