#include "repairkit/java_syntax.hpp"

#include <stdexcept>

extern "C" const TSLanguage *tree_sitter_java(void);

namespace repairkit::analysis {

namespace {

struct ParserDeleter {
  void operator()(TSParser *p) const { ts_parser_delete(p); }
};

TSParser *thread_parser() {
  thread_local std::unique_ptr<TSParser, ParserDeleter> parser = [] {
    std::unique_ptr<TSParser, ParserDeleter> p(ts_parser_new());
    if (!ts_parser_set_language(p.get(), tree_sitter_java())) {
      throw std::runtime_error("tree-sitter-java grammar ABI is incompatible with the runtime");
    }
    return p;
  }();
  return parser.get();
}

std::optional<TSNode> find_error(TSNode node) {
  if (ts_node_is_error(node) || ts_node_is_missing(node)) {
    return node;
  }
  if (!ts_node_has_error(node)) {
    return std::nullopt;
  }
  uint32_t n = ts_node_child_count(node);
  for (uint32_t i = 0; i < n; ++i) {
    if (auto found = find_error(ts_node_child(node, i))) {
      return found;
    }
  }
  return std::nullopt;
}

} // namespace

SyntaxTree SyntaxTree::parse(std::string source) {
  TSTree *tree = ts_parser_parse_string(thread_parser(), nullptr, source.data(),
                                        static_cast<uint32_t>(source.size()));
  if (!tree) {
    throw std::runtime_error("tree-sitter parse aborted");
  }
  return SyntaxTree(std::move(source), tree);
}

std::string_view SyntaxTree::text(TSNode node) const {
  uint32_t a = ts_node_start_byte(node);
  uint32_t b = ts_node_end_byte(node);
  if (a > b || b > source_.size()) {
    return {};
  }
  return std::string_view(source_).substr(a, b - a);
}

std::optional<SourceLocation> SyntaxTree::first_error() const {
  auto node = find_error(root());
  if (!node) {
    return std::nullopt;
  }
  TSPoint p = ts_node_start_point(*node);
  return SourceLocation{static_cast<int>(p.row) + 1, static_cast<int>(p.column) + 1};
}

std::string_view node_type(TSNode node) { return ts_node_type(node); }

std::vector<TSNode> named_children(TSNode node) {
  std::vector<TSNode> out;
  uint32_t n = ts_node_named_child_count(node);
  out.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    out.push_back(ts_node_named_child(node, i));
  }
  return out;
}

} // namespace repairkit::analysis
