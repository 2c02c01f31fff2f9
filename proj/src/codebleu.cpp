#include "repairkit/codebleu.hpp"

#include "repairkit/java_lexer.hpp"
#include "repairkit/java_syntax.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <stdexcept>
#include <unordered_map>

namespace repairkit::codebleu {

using analysis::SyntaxTree;

void Weights::validate() const {
  if (ngram < 0 || weighted_ngram < 0 || ast < 0 || dataflow < 0) {
    throw std::invalid_argument("CodeBLEU weights must be non-negative");
  }
  if (std::abs(ngram + weighted_ngram + ast + dataflow - 1.0) > 1e-12) {
    throw std::invalid_argument("CodeBLEU weights must sum to 1");
  }
}

namespace {

using NgramCounts = std::unordered_map<std::string, int>;

NgramCounts count_ngrams(const std::vector<std::string> &tokens, int n) {
  NgramCounts counts;
  if (tokens.size() < static_cast<std::size_t>(n)) {
    return counts;
  }
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int k = 1; k < n; ++k) {
      key += '\x1f';
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

std::string first_token(const std::string &ngram) { return ngram.substr(0, ngram.find('\x1f')); }

double brevity_penalty(std::size_t c, std::size_t r) {
  if (c > r) {
    return 1.0;
  }
  return std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
}

// Shared by plain and weighted BLEU; `weight` maps an n-gram to its weight.
template <typename WeightFn>
double bleu_impl(const std::vector<std::string> &cand, const std::vector<std::string> &ref,
                 int max_n, WeightFn &&weight) {
  if (cand.empty() && ref.empty()) {
    return 1.0;
  }
  if (cand.empty()) {
    return 0.0;
  }
  std::vector<double> matched(max_n, 0.0);
  std::vector<double> total(max_n, 0.0);
  for (int n = 1; n <= max_n; ++n) {
    NgramCounts c = count_ngrams(cand, n);
    NgramCounts r = count_ngrams(ref, n);
    for (const auto &[gram, count] : c) {
      double w = weight(gram);
      auto it = r.find(gram);
      int clip = it == r.end() ? 0 : std::min(count, it->second);
      matched[n - 1] += w * clip;
      total[n - 1] += w * count;
    }
  }
  if (matched[0] == 0.0) {
    return 0.0;
  }
  bool smooth = std::any_of(matched.begin(), matched.end(), [](double m) { return m == 0.0; });
  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    double p = (smooth && n >= 2) ? (matched[n - 1] + 1.0) / (total[n - 1] + 1.0)
                                  : matched[n - 1] / total[n - 1];
    log_sum += std::log(p) / max_n;
  }
  return brevity_penalty(cand.size(), ref.size()) * std::exp(log_sum);
}

// ---- syntax side -------------------------------------------------------

constexpr std::string_view kShellClass = "class RkShell__ {\n";
constexpr std::string_view kShellMethod = "class RkShell__ { void rkShell__() {\n";

bool is_comment(TSNode n) {
  std::string_view t = analysis::node_type(n);
  return t == "line_comment" || t == "block_comment";
}

struct ParsedSnippet {
  SyntaxTree tree;
  std::vector<TSNode> region;
};

std::vector<TSNode> code_children(TSNode node) {
  std::vector<TSNode> out;
  for (TSNode c : analysis::named_children(node)) {
    if (!is_comment(c)) {
      out.push_back(c);
    }
  }
  return out;
}

std::optional<ParsedSnippet> parse_snippet(std::string_view code) {
  {
    SyntaxTree tree = SyntaxTree::parse(std::string(code));
    if (!tree.has_error()) {
      auto region = code_children(tree.root());
      return ParsedSnippet{std::move(tree), std::move(region)};
    }
  }
  {
    SyntaxTree tree = SyntaxTree::parse(std::string(kShellClass) + std::string(code) + "\n}");
    if (!tree.has_error()) {
      TSNode cls = ts_node_named_child(tree.root(), 0);
      TSNode body = ts_node_child_by_field_name(cls, "body", 4);
      auto region = code_children(body);
      return ParsedSnippet{std::move(tree), std::move(region)};
    }
  }
  {
    SyntaxTree tree = SyntaxTree::parse(std::string(kShellMethod) + std::string(code) + "\n} }");
    if (!tree.has_error()) {
      TSNode cls = ts_node_named_child(tree.root(), 0);
      TSNode cbody = ts_node_child_by_field_name(cls, "body", 4);
      TSNode method = code_children(cbody).at(0);
      TSNode body = ts_node_child_by_field_name(method, "body", 4);
      auto region = code_children(body);
      return ParsedSnippet{std::move(tree), std::move(region)};
    }
  }
  return std::nullopt;
}

// Returns the subtree height; appends (shape) for every node of height >= 2.
int collect_shapes(TSNode node, std::string &shape, SubtreeCounts &out) {
  shape = "(";
  shape += analysis::node_type(node);
  int height = 1;
  for (TSNode child : code_children(node)) {
    std::string child_shape;
    height = std::max(height, collect_shapes(child, child_shape, out) + 1);
    shape += ' ';
    shape += child_shape;
  }
  shape += ')';
  if (height >= 2) {
    ++out[shape];
  }
  return height;
}

// ---- dataflow ----------------------------------------------------------

class DataflowExtractor {
public:
  explicit DataflowExtractor(const SyntaxTree &tree) : tree_(tree) {}

  std::vector<DataflowEdge> run(const std::vector<TSNode> &region) {
    for (TSNode n : region) {
      eval(n);
    }
    return std::move(edges_);
  }

private:
  std::string norm(const std::string &var) {
    auto [it, inserted] = names_.try_emplace(var, "var_" + std::to_string(names_.size()));
    return it->second;
  }

  void use(const std::string &var, std::vector<std::string> &used) {
    norm(var);
    if (defined_.count(var)) {
      edges_.push_back({norm(var), "comesFrom", norm(var)});
    }
    used.push_back(var);
  }

  void define(const std::string &var, const std::vector<std::string> &sources) {
    std::string v = norm(var);
    std::vector<std::string> seen;
    for (const auto &s : sources) {
      if (std::find(seen.begin(), seen.end(), s) == seen.end()) {
        seen.push_back(s);
        edges_.push_back({v, "computedFrom", norm(s)});
      }
    }
    defined_.insert({var, true});
  }

  std::string text(TSNode n) const { return std::string(tree_.text(n)); }

  TSNode field(TSNode n, const char *name) const {
    return ts_node_child_by_field_name(n, name, static_cast<uint32_t>(std::strlen(name)));
  }

  bool is_identifier(TSNode n) const {
    return !ts_node_is_null(n) && analysis::node_type(n) == "identifier";
  }

  std::vector<std::string> eval_field(TSNode n, const char *name) {
    TSNode f = field(n, name);
    return ts_node_is_null(f) ? std::vector<std::string>{} : eval(f);
  }

  // Variable uses inside `node`, recording edges for nested defs and uses.
  std::vector<std::string> eval(TSNode node) {
    std::vector<std::string> used;
    std::string_view type = analysis::node_type(node);
    if (type == "identifier") {
      use(text(node), used);
      return used;
    }
    if (type == "variable_declarator") {
      std::vector<std::string> src = eval_field(node, "value");
      TSNode name = field(node, "name");
      if (is_identifier(name)) {
        define(text(name), src);
      }
      return used;
    }
    if (type == "assignment_expression") {
      std::vector<std::string> src = eval_field(node, "right");
      TSNode left = field(node, "left");
      TSNode op = field(node, "operator");
      if (is_identifier(left)) {
        std::string var = text(left);
        if (!ts_node_is_null(op) && text(op) != "=") {
          use(var, src);
        }
        define(var, src);
        used.push_back(var);
      } else {
        used = eval(left);
        used.insert(used.end(), src.begin(), src.end());
      }
      return used;
    }
    if (type == "update_expression") {
      for (TSNode c : code_children(node)) {
        if (is_identifier(c)) {
          std::string var = text(c);
          std::vector<std::string> src;
          use(var, src);
          define(var, src);
          used.push_back(var);
        } else {
          auto u = eval(c);
          used.insert(used.end(), u.begin(), u.end());
        }
      }
      return used;
    }
    if (type == "formal_parameter" || type == "spread_parameter" ||
        type == "catch_formal_parameter") {
      TSNode name = field(node, "name");
      if (ts_node_is_null(name)) {
        for (TSNode c : code_children(node)) {
          if (analysis::node_type(c) == "variable_declarator") {
            eval(c);
          } else if (is_identifier(c)) {
            name = c;
          }
        }
      }
      if (is_identifier(name)) {
        define(text(name), {});
      }
      return used;
    }
    if (type == "resource") {
      std::vector<std::string> src = eval_field(node, "value");
      TSNode name = field(node, "name");
      if (is_identifier(name)) {
        define(text(name), src);
        return used;
      }
      if (ts_node_is_null(field(node, "value"))) {
        for (TSNode c : code_children(node)) {
          auto u = eval(c);
          used.insert(used.end(), u.begin(), u.end());
        }
      }
      return used;
    }
    if (type == "enhanced_for_statement") {
      std::vector<std::string> src = eval_field(node, "value");
      TSNode name = field(node, "name");
      if (is_identifier(name)) {
        define(text(name), src);
      }
      eval_field(node, "body");
      return used;
    }
    if (type == "lambda_expression") {
      TSNode params = field(node, "parameters");
      if (is_identifier(params)) {
        define(text(params), {});
      } else if (!ts_node_is_null(params)) {
        for (TSNode c : code_children(params)) {
          if (is_identifier(c)) {
            define(text(c), {});
          } else {
            eval(c);
          }
        }
      }
      return eval_field(node, "body");
    }
    if (type == "method_reference") {
      auto kids = code_children(node);
      if (!kids.empty()) {
        return eval(kids.front());
      }
      return used;
    }
    if (type == "package_declaration" || type == "import_declaration" ||
        type == "marker_annotation" || type == "annotation" || type == "scoped_identifier" ||
        type == "break_statement" || type == "continue_statement") {
      return used;
    }
    // Generic: skip identifiers in naming positions (declaration names,
    // invoked method names, accessed fields, labels).
    uint32_t n = ts_node_child_count(node);
    for (uint32_t i = 0; i < n; ++i) {
      TSNode c = ts_node_child(node, i);
      if (!ts_node_is_named(c) || is_comment(c)) {
        continue;
      }
      const char *fname = ts_node_field_name_for_child(node, i);
      if (is_identifier(c) && fname != nullptr &&
          (std::strcmp(fname, "name") == 0 || std::strcmp(fname, "field") == 0)) {
        continue;
      }
      if (is_identifier(c) && type == "labeled_statement") {
        continue;
      }
      auto u = eval(c);
      used.insert(used.end(), u.begin(), u.end());
    }
    return used;
  }

  const SyntaxTree &tree_;
  std::unordered_map<std::string, std::string> names_;
  std::unordered_map<std::string, bool> defined_;
  std::vector<DataflowEdge> edges_;
};

template <typename Key>
double clipped_fraction(const std::map<Key, int> &cand, const std::map<Key, int> &ref) {
  long matched = 0;
  long total = 0;
  for (const auto &[key, count] : ref) {
    total += count;
    auto it = cand.find(key);
    if (it != cand.end()) {
      matched += std::min(count, it->second);
    }
  }
  if (total == 0) {
    return cand.empty() ? 1.0 : 0.0;
  }
  return static_cast<double>(matched) / static_cast<double>(total);
}

} // namespace

double ngram_bleu(const std::vector<std::string> &candidate,
                  const std::vector<std::string> &reference, int max_n) {
  return bleu_impl(candidate, reference, max_n, [](const std::string &) { return 1.0; });
}

double ngram_bleu(std::string_view candidate, std::string_view reference, int max_n) {
  return ngram_bleu(analysis::token_texts(candidate), analysis::token_texts(reference), max_n);
}

double weighted_ngram_bleu(const std::vector<std::string> &candidate,
                           const std::vector<std::string> &reference,
                           const std::unordered_set<std::string> &keywords,
                           double keyword_weight, int max_n) {
  return bleu_impl(candidate, reference, max_n, [&](const std::string &gram) {
    return keywords.count(first_token(gram)) ? keyword_weight : 1.0;
  });
}

double weighted_ngram_bleu(std::string_view candidate, std::string_view reference,
                           const std::unordered_set<std::string> &keywords,
                           double keyword_weight) {
  return weighted_ngram_bleu(analysis::token_texts(candidate), analysis::token_texts(reference),
                             keywords, keyword_weight);
}

std::optional<SubtreeCounts> subtree_multiset(std::string_view code) {
  auto parsed = parse_snippet(code);
  if (!parsed) {
    return std::nullopt;
  }
  SubtreeCounts counts;
  for (TSNode n : parsed->region) {
    std::string shape;
    collect_shapes(n, shape, counts);
  }
  return counts;
}

ComponentResult ast_match(std::string_view candidate, std::string_view reference) {
  auto c = subtree_multiset(candidate);
  auto r = subtree_multiset(reference);
  if (!c || !r) {
    return {ngram_bleu(candidate, reference), true};
  }
  return {clipped_fraction(*c, *r), false};
}

std::optional<std::vector<DataflowEdge>> dataflow_edges(std::string_view code) {
  auto parsed = parse_snippet(code);
  if (!parsed) {
    return std::nullopt;
  }
  return DataflowExtractor(parsed->tree).run(parsed->region);
}

ComponentResult dataflow_match(std::string_view candidate, std::string_view reference) {
  auto c = dataflow_edges(candidate);
  auto r = dataflow_edges(reference);
  if (!c || !r) {
    return {ngram_bleu(candidate, reference), true};
  }
  std::map<DataflowEdge, int> cm;
  std::map<DataflowEdge, int> rm;
  for (const auto &e : *c) {
    ++cm[e];
  }
  for (const auto &e : *r) {
    ++rm[e];
  }
  return {clipped_fraction(cm, rm), false};
}

Score codebleu(std::string_view candidate, std::string_view reference, const Weights &weights) {
  weights.validate();
  auto cand = analysis::token_texts(candidate);
  auto ref = analysis::token_texts(reference);
  Score s;
  s.ngram = ngram_bleu(cand, ref);
  s.weighted_ngram = weighted_ngram_bleu(cand, ref, analysis::java_keywords());
  auto ast = ast_match(candidate, reference);
  auto df = dataflow_match(candidate, reference);
  s.ast_match = ast.value;
  s.ast_fallback = ast.fallback;
  s.dataflow_match = df.value;
  s.dataflow_fallback = df.fallback;
  s.total = weights.ngram * s.ngram + weights.weighted_ngram * s.weighted_ngram +
            weights.ast * s.ast_match + weights.dataflow * s.dataflow_match;
  s.total = std::clamp(s.total, 0.0, 1.0);
  return s;
}

} // namespace repairkit::codebleu
