#pragma once

#include <tree_sitter/api.h>

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace repairkit::analysis {

struct SourceLocation {
  int line;   // 1-based
  int column; // 1-based, bytes
};

/// A parsed Java concrete syntax tree that owns its source text.
class SyntaxTree {
public:
  static SyntaxTree parse(std::string source);

  TSNode root() const { return ts_tree_root_node(tree_.get()); }
  const std::string &source() const { return source_; }
  std::string_view text(TSNode node) const;

  bool has_error() const { return ts_node_has_error(root()); }
  /// Location of the first ERROR or MISSING node in document order.
  std::optional<SourceLocation> first_error() const;

private:
  struct TreeDeleter {
    void operator()(TSTree *t) const { ts_tree_delete(t); }
  };

  SyntaxTree(std::string source, TSTree *tree) : source_(std::move(source)), tree_(tree) {}

  std::string source_;
  std::unique_ptr<TSTree, TreeDeleter> tree_;
};

std::string_view node_type(TSNode node);

/// Named children in order.
std::vector<TSNode> named_children(TSNode node);

/// Visits `node` and its named descendants in document order. The visitor
/// returns false to skip a node's subtree.
template <typename Visitor> void walk_named(TSNode node, Visitor &&visit) {
  if (!visit(node)) {
    return;
  }
  uint32_t n = ts_node_named_child_count(node);
  for (uint32_t i = 0; i < n; ++i) {
    walk_named(ts_node_named_child(node, i), visit);
  }
}

} // namespace repairkit::analysis
