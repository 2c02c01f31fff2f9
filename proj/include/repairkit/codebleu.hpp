#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace repairkit::codebleu {

/// Component weights; must sum to 1.
struct Weights {
  double ngram = 0.25;
  double weighted_ngram = 0.25;
  double ast = 0.25;
  double dataflow = 0.25;

  /// Throws std::invalid_argument on negative weights or |sum - 1| > 1e-12.
  void validate() const;
};

struct Score {
  double ngram = 0;
  double weighted_ngram = 0;
  double ast_match = 0;
  double dataflow_match = 0;
  double total = 0;
  // Set when a side failed to parse and the component fell back to ngram.
  bool ast_fallback = false;
  bool dataflow_fallback = false;
};

/// BLEU over code tokens: clipped 1..max_n-gram precisions, geometric mean,
/// brevity penalty. When any order has zero matches, orders >= 2 use add-one
/// smoothing. Both sides empty scores 1.
double ngram_bleu(const std::vector<std::string> &candidate,
                  const std::vector<std::string> &reference, int max_n = 4);
double ngram_bleu(std::string_view candidate, std::string_view reference, int max_n = 4);

/// Like ngram_bleu, but an n-gram whose first token is in `keywords` counts
/// `keyword_weight` times in both matches and totals.
double weighted_ngram_bleu(const std::vector<std::string> &candidate,
                           const std::vector<std::string> &reference,
                           const std::unordered_set<std::string> &keywords,
                           double keyword_weight = 5.0, int max_n = 4);
double weighted_ngram_bleu(std::string_view candidate, std::string_view reference,
                           const std::unordered_set<std::string> &keywords,
                           double keyword_weight = 5.0);

struct ComponentResult {
  double value = 0;
  bool fallback = false;
};

using SubtreeCounts = std::map<std::string, int>;

/// Multiset of subtree shapes (named node types only, so identifiers are
/// anonymized) of height >= 2. Snippets that do not parse standalone are
/// wrapped in a synthetic class or method whose own nodes are excluded.
/// nullopt when no wrapping parses.
std::optional<SubtreeCounts> subtree_multiset(std::string_view code);

/// Clipped fraction of reference subtrees found in the candidate.
ComponentResult ast_match(std::string_view candidate, std::string_view reference);

/// A def-use relation with variables renamed by first appearance
/// (var_0, var_1, ...). `relation` is "comesFrom" (use reached by a def of
/// the same variable) or "computedFrom" (def computed from a used variable).
struct DataflowEdge {
  std::string var;
  std::string relation;
  std::string source;
  friend auto operator<=>(const DataflowEdge &, const DataflowEdge &) = default;
};

/// Edges from straight-line reaching definitions over declarations,
/// assignments and updates. nullopt when the code does not parse.
std::optional<std::vector<DataflowEdge>> dataflow_edges(std::string_view code);

/// Clipped fraction of reference edges present in the candidate. 1 when
/// neither side has edges, 0 when only the reference has none.
ComponentResult dataflow_match(std::string_view candidate, std::string_view reference);

Score codebleu(std::string_view candidate, std::string_view reference,
               const Weights &weights = {});

} // namespace repairkit::codebleu
