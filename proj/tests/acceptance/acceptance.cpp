// Acceptance checks. Prints one "PASS ACn: ..." or "FAIL ACn: ..." line per
// criterion; `--criterion ACn` runs a single one.

#include "repairkit/benchmark.hpp"
#include "repairkit/cli.hpp"
#include "repairkit/code_analysis.hpp"
#include "repairkit/codebleu.hpp"
#include "repairkit/corpus.hpp"
#include "repairkit/evaluation.hpp"
#include "repairkit/gateway.hpp"
#include "repairkit/identifiers.hpp"
#include "repairkit/java_lexer.hpp"
#include "repairkit/java_syntax.hpp"
#include "repairkit/pipeline.hpp"
#include "repairkit/reference.hpp"
#include "repairkit/text.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace repairkit;
using nlohmann::json;

namespace {

// Tolerances and budgets.
constexpr double kComponentTolerance = 1e-9;
constexpr double kPercentPointTolerance = 0.01;
constexpr double kMetricSlack = 1e-9;

const fs::path kFixtures = fs::path(REPAIRKIT_FIXTURE_DIR) / "mini";

struct Check {
  bool ok = true;
  std::vector<std::string> failures;

  void expect(bool cond, const std::string &what) {
    if (!cond) {
      ok = false;
      failures.push_back(what);
    }
  }
};

// ---------------------------------------------------------------- AC1

Check ac1() {
  Check c;
  struct Row {
    std::size_t n;
    std::size_t total;
    std::string published; // as printed in the results table
  };
  const std::vector<Row> rows = {{109, 714, "109(15.27%)"}, {23, 714, "23(3.22%)"}, {18, 224, "18(8.03%)"}};
  for (const auto &row : rows) {
    std::vector<eval::EvalOutcome> outcomes(row.total);
    for (std::size_t i = 0; i < row.total; ++i) {
      outcomes[i].task_id = fmt::format("T-{}", i);
      outcomes[i].full_match = i < row.n;
    }
    auto s = eval::summarize(outcomes, {});
    std::string got = eval::format_count(s.n_full_match, s.n_tasks);
    c.expect(got == row.published, fmt::format("{}/{} renders {}, table prints {}", row.n, row.total,
                                           got, row.published));
  }
  return c;
}

// ---------------------------------------------------------------- AC2

Check ac2() {
  Check c;
  struct Row {
    double base;
    double variant;
    double published_percent;
  };
  const std::vector<Row> rows = {{109, 20, 81.65}, {0.785, 0.713, 9.17}};
  for (const auto &row : rows) {
    double got = eval::drop_ratio(row.base, row.variant) * 100.0;
    c.expect(std::abs(got - row.published_percent) <= kPercentPointTolerance,
             fmt::format("drop({}, {}) = {:.4f}%, expected {}%", row.base, row.variant, got,
                         row.published_percent));
  }
  return c;
}

// ---------------------------------------------------------------- AC3

std::size_t oracle_bucket(int v) {
  if (v < 5) return 0;
  if (v < 10) return 1;
  if (v < 15) return 2;
  if (v < 20) return 3;
  return 4;
}

Check ac3() {
  Check c;
  const std::vector<std::string> labels = {"[1,5)", "[5,10)", "[10,15)", "[15,20)", "[20,22]"};
  const std::map<int, std::size_t> boundaries = {{1, 0},  {4, 0},  {5, 1},  {9, 1},  {10, 2},
                                                 {14, 2}, {15, 3}, {19, 3}, {20, 4}, {21, 4},
                                                 {22, 4}};
  for (auto [v, idx] : boundaries) {
    auto h = ingest::bucket_histogram({v});
    for (std::size_t i = 0; i < h.size(); ++i) {
      c.expect(h[i].second == (i == idx ? 1 : 0), fmt::format("{} lines miscounted in {}", v, labels[i]));
    }
  }
  for (int bad : {0, 23}) {
    bool threw = false;
    try {
      ingest::bucket_histogram({bad});
    } catch (const std::invalid_argument &) {
      threw = true;
    }
    c.expect(threw, fmt::format("{} lines should be outside every bucket", bad));
  }

  std::mt19937 rng(7);
  for (int round = 0; round < 50; ++round) {
    std::size_t n = 1 + rng() % 300;
    std::vector<ingest::BenchmarkEntry> entries(n);
    std::vector<eval::EvalOutcome> outcomes(n);
    std::vector<int> expected(5, 0);
    for (std::size_t i = 0; i < n; ++i) {
      int lines = 1 + static_cast<int>(rng() % 22);
      entries[i].issue.key = outcomes[i].task_id = fmt::format("S-{}", i);
      entries[i].gold.changed_line_count = lines;
      ++expected[oracle_bucket(lines)];
    }
    auto s = eval::summarize(outcomes, entries);
    int sum = 0;
    c.expect(s.bucket_histogram.size() == 5, "five buckets");
    for (std::size_t i = 0; i < s.bucket_histogram.size() && i < 5; ++i) {
      c.expect(s.bucket_histogram[i].first == labels[i], "bucket label " + labels[i]);
      c.expect(s.bucket_histogram[i].second == expected[i],
               fmt::format("round {} bucket {}: {} vs {}", round, labels[i],
                           s.bucket_histogram[i].second, expected[i]));
      sum += s.bucket_histogram[i].second;
    }
    c.expect(static_cast<std::size_t>(sum) == n, fmt::format("round {}: counts sum to {}", round, sum));
  }
  return c;
}

// ---------------------------------------------------------------- AC4

analysis::MethodUnit random_method(std::mt19937_64 &rng, int id) {
  analysis::MethodUnit m;
  m.file_path = "src/main/java/Gen.java";
  m.name = fmt::format("gen{}", id);
  m.signature = fmt::format("gen{}()", id);
  m.header_lines = {fmt::format("    int gen{}() {{", id)};
  std::size_t n = 3 + rng() % 38;
  for (std::size_t i = 0; i < n; ++i) {
    m.body_lines.push_back(fmt::format("        int v{} = {} + {};", i, rng() % 100, i));
  }
  m.footer = "    }";
  return m;
}

std::size_t occurrences(const std::string &text, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

Check ac4() {
  Check c;
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 200; ++k) {
    auto m = random_method(rng, k);
    std::uint64_t seed = rng();
    auto samples = corpus::build_samples(m, seed);
    std::size_t n = m.body_lines.size();
    std::vector<bool> covered(n, false);
    for (const auto &s : samples) {
      std::size_t max_scale = std::min<std::size_t>(5, n);
      c.expect(s.scale >= 1 && s.scale <= max_scale,
               fmt::format("method {}: scale {} outside [1,{}]", k, s.scale, max_scale));
      c.expect(s.end_idx >= s.start_idx && s.end_idx - s.start_idx + 1 == s.scale && s.end_idx < n,
               fmt::format("method {}: window [{},{}] vs scale {}", k, s.start_idx, s.end_idx, s.scale));
      c.expect(occurrences(s.masked_text, analysis::kMaskSentinel) == 1,
               fmt::format("method {}: sentinel count", k));
      c.expect(corpus::fill_mask(s.masked_text, s.target_text) == m.stripped_text(),
               fmt::format("method {}: back-substitution", k));
      for (std::size_t i = s.start_idx; i <= s.end_idx && i < n; ++i) {
        covered[i] = true;
      }
    }
    c.expect(std::all_of(covered.begin(), covered.end(), [](bool b) { return b; }),
             fmt::format("method {} ({} lines, seed {}): coverage incomplete", k, n, seed));
    if (!c.ok) {
      break;
    }
  }
  return c;
}

// ---------------------------------------------------------------- AC5

std::vector<std::string> split_ws(const std::string &s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;) {
    out.push_back(t);
  }
  return out;
}

// BLEU by explicit position matching: every candidate n-gram is matched to
// a distinct unused reference position holding the same n-gram.
double oracle_bleu(const std::vector<std::string> &cand, const std::vector<std::string> &ref,
                   const std::function<double(const std::string &)> &weight_of_first) {
  const int max_n = 4;
  if (cand.empty() && ref.empty()) return 1.0;
  if (cand.empty()) return 0.0;
  std::vector<double> matched(max_n), total(max_n);
  for (int n = 1; n <= max_n; ++n) {
    if (cand.size() < static_cast<std::size_t>(n)) continue;
    std::vector<bool> used(ref.size() + 1, false);
    for (std::size_t i = 0; i + n <= cand.size(); ++i) {
      double w = weight_of_first(cand[i]);
      total[n - 1] += w;
      for (std::size_t j = 0; j + n <= ref.size(); ++j) {
        if (used[j]) continue;
        bool same = true;
        for (int k = 0; k < n; ++k) same = same && cand[i + k] == ref[j + k];
        if (same) {
          used[j] = true;
          matched[n - 1] += w;
          break;
        }
      }
    }
  }
  if (matched[0] == 0) return 0.0;
  bool smooth = false;
  for (double m : matched) smooth = smooth || m == 0;
  double log_sum = 0;
  for (int n = 1; n <= max_n; ++n) {
    double p = (smooth && n >= 2) ? (matched[n - 1] + 1) / (total[n - 1] + 1) : matched[n - 1] / total[n - 1];
    log_sum += std::log(p) / max_n;
  }
  double c_len = static_cast<double>(cand.size()), r_len = static_cast<double>(ref.size());
  double bp = c_len > r_len ? 1.0 : std::exp(1.0 - r_len / c_len);
  return bp * std::exp(log_sum);
}

// Subtree shapes read from tree-sitter's own s-expression printer, with
// field labels removed; statements are parsed inside a method body.
std::vector<std::string> oracle_subtrees(const std::string &code) {
  auto tree = analysis::SyntaxTree::parse("class O { void o() {\n" + code + "\n} }");
  std::vector<std::string> shapes;
  if (tree.has_error()) return shapes;
  static const std::regex field_label(R"(\w+: )");
  std::function<int(TSNode)> visit = [&](TSNode n) {
    int h = 1;
    for (uint32_t i = 0; i < ts_node_named_child_count(n); ++i) {
      h = std::max(h, visit(ts_node_named_child(n, i)) + 1);
    }
    if (h >= 2) {
      char *raw = ts_node_string(n);
      shapes.push_back(std::regex_replace(raw, field_label, ""));
      free(raw);
    }
    return h;
  };
  TSNode cls = ts_node_named_child(tree.root(), 0);
  TSNode method = ts_node_named_child(ts_node_child_by_field_name(cls, "body", 4), 0);
  TSNode body = ts_node_child_by_field_name(method, "body", 4);
  for (uint32_t i = 0; i < ts_node_named_child_count(body); ++i) {
    visit(ts_node_named_child(body, i));
  }
  return shapes;
}

template <typename T>
double oracle_clipped(const std::vector<T> &cand, const std::vector<T> &ref) {
  if (ref.empty()) return cand.empty() ? 1.0 : 0.0;
  std::vector<bool> used(cand.size(), false);
  std::size_t hit = 0;
  for (const auto &r : ref) {
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (!used[i] && cand[i] == r) {
        used[i] = true;
        ++hit;
        break;
      }
    }
  }
  return static_cast<double>(hit) / static_cast<double>(ref.size());
}

using Edge = std::tuple<std::string, std::string, std::string>;

struct OraclePair {
  std::string candidate;
  std::string reference;
  // Def-use edges worked out by hand; variables are numbered in the order
  // the extractor first evaluates them (right-hand sides before targets).
  std::vector<Edge> cand_edges;
  std::vector<Edge> ref_edges;
};

const std::vector<OraclePair> &oracle_pairs() {
  const Edge x_from_a = {"var_1", "computedFrom", "var_0"};
  // An update reads the variable before redefining it.
  const Edge i_self = {"var_0", "computedFrom", "var_0"};
  static const std::vector<OraclePair> pairs = {
      {"x = a + 1 ;", "x = a + 1 ;", {x_from_a}, {x_from_a}},
      {"x = b + 1 ;", "x = a + 1 ;", {x_from_a}, {x_from_a}},
      {"int x = z ;", "int x = y ;", {x_from_a}, {x_from_a}},
      {"return b ;", "return a ;", {}, {}},
      {"i -- ;", "i ++ ;", {i_self}, {i_self}},
      {"if ( a ) c ( ) ;", "if ( a ) b ( ) ;", {}, {}},
      {"int s = a + b ;", "int s = a * b ;",
       {{"var_2", "computedFrom", "var_0"}, {"var_2", "computedFrom", "var_1"}},
       {{"var_2", "computedFrom", "var_0"}, {"var_2", "computedFrom", "var_1"}}},
      {"y = x ; z = x ;", "y = x ; z = y ;",
       {x_from_a, {"var_2", "computedFrom", "var_0"}},
       {x_from_a, {"var_1", "comesFrom", "var_1"}, {"var_2", "computedFrom", "var_1"}}},
      {"return a . equals ( b ) ;", "return a == b ;", {}, {}},
      {"foo ( b , a ) ;", "foo ( a , b ) ;", {}, {}},
      {"int x = 0 ; x = y ;", "int x = 0 ; x += y ;",
       {{"var_0", "computedFrom", "var_1"}},
       {{"var_0", "comesFrom", "var_0"}, {"var_0", "computedFrom", "var_1"}, {"var_0", "computedFrom", "var_0"}}},
      {"x = a ;", "return a ;", {x_from_a}, {}},
      {"while ( i < n ) i ++ ;", "for ( ; ; ) i ++ ;", {i_self}, {i_self}},
  };
  return pairs;
}

Check ac5() {
  Check c;
  const auto &keywords = analysis::java_keywords();
  auto plain = [](const std::string &) { return 1.0; };
  auto weighted = [&](const std::string &first) { return keywords.count(first) ? 5.0 : 1.0; };
  auto near = [](double a, double b) { return std::abs(a - b) <= kComponentTolerance; };

  for (const auto &p : oracle_pairs()) {
    auto ct = split_ws(p.candidate);
    auto rt = split_ws(p.reference);
    c.expect(ct.size() <= 10 && rt.size() <= 10, "pair exceeds 10 tokens: " + p.candidate);
    c.expect(analysis::token_texts(p.candidate) == ct && analysis::token_texts(p.reference) == rt,
             "lexer disagrees with the hand tokenization of " + p.candidate);

    auto s = codebleu::codebleu(p.candidate, p.reference);
    double ng = oracle_bleu(ct, rt, plain);
    double wng = oracle_bleu(ct, rt, weighted);
    double ast = oracle_clipped(oracle_subtrees(p.candidate), oracle_subtrees(p.reference));
    double df = oracle_clipped(p.cand_edges, p.ref_edges);

    std::string tag = "'" + p.candidate + "' vs '" + p.reference + "'";
    c.expect(!s.ast_fallback && !s.dataflow_fallback, tag + ": parse fallback");
    c.expect(near(s.ngram, ng), fmt::format("{}: ngram {} vs oracle {}", tag, s.ngram, ng));
    c.expect(near(s.weighted_ngram, wng), fmt::format("{}: weighted {} vs oracle {}", tag, s.weighted_ngram, wng));
    c.expect(near(s.ast_match, ast), fmt::format("{}: ast {} vs oracle {}", tag, s.ast_match, ast));
    c.expect(near(s.dataflow_match, df), fmt::format("{}: dataflow {} vs oracle {}", tag, s.dataflow_match, df));

    auto edges_of = [](std::string_view code) {
      std::vector<Edge> out;
      for (const auto &e : codebleu::dataflow_edges(code).value_or(std::vector<codebleu::DataflowEdge>{})) {
        out.emplace_back(e.var, e.relation, e.source);
      }
      std::sort(out.begin(), out.end());
      return out;
    };
    auto sorted = [](std::vector<Edge> v) {
      std::sort(v.begin(), v.end());
      return v;
    };
    c.expect(edges_of(p.candidate) == sorted(p.cand_edges), tag + ": candidate edges differ from hand derivation");
    c.expect(edges_of(p.reference) == sorted(p.ref_edges), tag + ": reference edges differ from hand derivation");

    double total = 0.25 * ng + 0.25 * wng + 0.25 * ast + 0.25 * df;
    c.expect(near(s.total, total), fmt::format("{}: total {} vs oracle {}", tag, s.total, total));

    const std::vector<std::pair<codebleu::Weights, double>> projections = {
        {{1, 0, 0, 0}, s.ngram}, {{0, 1, 0, 0}, s.weighted_ngram},
        {{0, 0, 1, 0}, s.ast_match}, {{0, 0, 0, 1}, s.dataflow_match}};
    for (const auto &[w, component] : projections) {
      c.expect(near(codebleu::codebleu(p.candidate, p.reference, w).total, component),
               tag + ": single-weight projection differs from its component");
    }
    auto id = codebleu::codebleu(p.reference, p.reference);
    c.expect(near(id.total, 1.0) && near(id.ngram, 1.0) && near(id.weighted_ngram, 1.0) &&
                 near(id.ast_match, 1.0) && near(id.dataflow_match, 1.0),
             tag + ": identity does not score 1");
  }
  return c;
}

// ---------------------------------------------------------------- AC6

Check ac6() {
  Check c;
  const std::string rel = "src/main/java/org/example/config/ConfigReader.java";
  analysis::SourceFile file{rel, read_file(kFixtures / "repo" / rel)};
  const std::string patch =
      "        String target = conf.get(TARGET);\n        if (target == null) {\n"
      "            return DEFAULT_TARGET;\n        }\n        return target.trim();";

  auto file_ids = analysis::collect_identifiers(file.text);
  c.expect(file_ids.count("getString") && !file_ids.count("get"), "fixture must hold getString and not get");

  analysis::IdentifierTable file_table;
  file_table.add(file.text);
  analysis::IdentifierTable project_table{analysis::TableScope::Project, {}};
  DirectorySource repo(kFixtures / "repo");
  for (const auto &p : project_source_files(repo, "")) {
    project_table.add(repo.read(p, ""));
  }
  auto suspects = ident::detect_suspects(patch, file_table, project_table);
  c.expect(suspects == std::vector<std::string>{"get"},
           fmt::format("suspects: [{}]", fmt::join(suspects, ", ")));

  auto s = ident::recommend("get", file, patch);
  std::vector<std::string> names;
  for (const auto &cand : s.candidates) names.push_back(cand.identifier);
  c.expect(s.candidates.size() <= ident::kMaxCandidates, "more than six candidates");
  c.expect(std::find(names.begin(), names.end(), "getString") != names.end(),
           fmt::format("getString missing from [{}]", fmt::join(names, ", ")));

  auto merged = ident::suggest_for_patches({patch}, file, project_table);
  c.expect(merged.size() == 1 && merged[0].suspect == "get", "suggest_for_patches reports get");

  // Properties over several patch sizes and suspects.
  auto lines = split_lines(file.text);
  for (std::size_t k = 1; k <= lines.size() + 2; ++k) {
    auto chunks = ident::chunk_file(lines, k);
    std::vector<std::string> joined;
    std::size_t next = 0;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      c.expect(chunks[i].first_line == next, fmt::format("window {} of size {} is not contiguous", i, k));
      c.expect(i + 1 == chunks.size() ? chunks[i].lines.size() <= k && !chunks[i].lines.empty()
                                      : chunks[i].lines.size() == k,
               fmt::format("window {} of size {} has {} lines", i, k, chunks[i].lines.size()));
      next += chunks[i].lines.size();
      joined.insert(joined.end(), chunks[i].lines.begin(), chunks[i].lines.end());
    }
    c.expect(joined == lines, fmt::format("windows of size {} do not partition the file", k));
  }
  for (const std::string suspect : {"get", "trgt", "retry", "describeIt", "confg", "sb"}) {
    auto r = ident::recommend(suspect, file, patch);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < r.candidates.size(); ++i) {
      const auto &cand = r.candidates[i];
      c.expect(seen.insert(cand.identifier).second, suspect + ": duplicate " + cand.identifier);
      c.expect(file_ids.count(cand.identifier) == 1, suspect + ": " + cand.identifier + " not in file");
      if (i > 0) {
        const auto &prev = r.candidates[i - 1];
        c.expect(prev.similarity > cand.similarity ||
                     (prev.similarity == cand.similarity && prev.identifier < cand.identifier),
                 suspect + ": candidates not sorted");
      }
    }
    c.expect(r.candidates.size() <= ident::kMaxCandidates, suspect + ": too many candidates");
  }
  return c;
}

// ---------------------------------------------------------------- AC7

struct NoNetwork : gateway::Transport {
  bool touched = false;
  gateway::HttpResponse post(const gateway::HttpRequest &) override {
    touched = true;
    throw gateway::TransportError("network access during replay");
  }
};

struct Variant {
  std::string file;
  std::vector<std::string> flags;
  pipeline::PipelineConfig config;
  std::string omitted_header; // empty for the full pipeline
};

const std::vector<Variant> &variants() {
  static const std::vector<Variant> v = {
      {"full.jsonl", {}, {true, true, true}, ""},
      {"minus-dr.jsonl", {"--no-dr"}, {false, true, true}, std::string(pipeline::kDrHeader)},
      {"minus-pf.jsonl", {"--no-reference"}, {true, false, true}, std::string(pipeline::kReferenceHeader)},
      {"minus-id.jsonl", {"--no-identifiers"}, {true, true, false}, std::string(pipeline::kIdentifierHeader)},
  };
  return v;
}

Check ac7() {
  Check c;
  fs::path work = fs::temp_directory_path() / fmt::format("repairkit-ac7-{}", ::getpid());
  fs::create_directories(work);
  auto bench = ingest::load_benchmark(kFixtures / "benchmark.jsonl");
  c.expect(bench.entries.size() >= 5, "mini benchmark has fewer than five issues");

  for (int run = 0; run < 2; ++run) {
    for (const auto &v : variants()) {
      fs::path out = work / fmt::format("{}-{}", run, v.file);
      std::vector<std::string> args = {"repair",
                                       "--benchmark", (kFixtures / "benchmark.jsonl").string(),
                                       "--cache-dir", (kFixtures / "cache").string(),
                                       "--provider", "replay",
                                       "--repo", (kFixtures / "repo").string(),
                                       "--corpus", (kFixtures / "corpus.jsonl").string(),
                                       "--out", out.string()};
      args.insert(args.end(), v.flags.begin(), v.flags.end());
      int rc = cli::run(args);
      c.expect(rc == 0, fmt::format("run {} {}: exit status {}", run, v.file, rc));
      c.expect(fs::exists(out) && read_file(out) == read_file(kFixtures / "golden" / v.file),
               fmt::format("run {} {}: differs from the golden file", run, v.file));
    }
  }

  // The same runs in-process, with a transport that fails on any use.
  prompts::Library lib;
  DirectorySource repo(kFixtures / "repo");
  refpatch::RetrievalProvider retrieval(corpus::load_corpus(kFixtures / "corpus.jsonl"));
  gateway::GatewayConfig gcfg;
  gcfg.provider_kind = gateway::ProviderKind::Replay;
  gcfg.cache_dir = kFixtures / "cache";
  auto transport = std::make_unique<NoNetwork>();
  NoNetwork *probe = transport.get();
  gateway::Gateway gw(gcfg, std::move(transport));
  pipeline::Pipeline pipe({&gw, &lib, &retrieval, &repo});

  gateway::ResponseCache cache(kFixtures / "cache");
  for (const auto &v : variants()) {
    std::vector<pipeline::RepairTask> tasks;
    for (const auto &e : bench.entries) tasks.push_back(pipeline::make_task(e, v.config));
    auto outcomes = pipe.run_all(tasks);
    fs::path out = work / ("inproc-" + v.file);
    pipeline::write_outcomes(out, outcomes);
    c.expect(read_file(out) == read_file(kFixtures / "golden" / v.file),
             v.file + ": in-process replay differs from the golden file");

    std::set<std::string> headers_seen;
    for (const auto &o : outcomes) {
      for (const auto &t : o.transcript) {
        fs::path entry = cache.path_for(t.replay_key);
        if (!fs::exists(entry)) {
          c.expect(false, v.file + ": transcript key without cache entry " + t.replay_key);
          continue;
        }
        json j = json::parse(read_file(entry));
        for (const auto &m : j.at("request").at("messages")) {
          std::string content = m.at("content");
          for (auto h : {pipeline::kDrHeader, pipeline::kReferenceHeader, pipeline::kIdentifierHeader}) {
            if (content.find(h) != std::string::npos) headers_seen.insert(std::string(h));
          }
        }
      }
    }
    if (v.omitted_header.empty()) {
      c.expect(headers_seen.size() == 3, "full run prompts lack one of the feedback blocks");
    } else {
      c.expect(headers_seen.count(v.omitted_header) == 0,
               v.file + ": a prompt contains the omitted block " + v.omitted_header);
    }
  }
  c.expect(!probe->touched && gw.network_calls() == 0, "replay touched the network");
  fs::remove_all(work);
  return c;
}

// ---------------------------------------------------------------- AC8

std::string diff_with_changes(int removed, int added) {
  std::string d = fmt::format("@@ -1,{} +1,{} @@\n", removed + 1, added + 1);
  d += " class A {\n";
  for (int i = 0; i < removed; ++i) d += fmt::format("-    int r{};\n", i);
  for (int i = 0; i < added; ++i) d += fmt::format("+    int a{};\n", i);
  return d;
}

std::string reason(const ingest::FilterResult &r) {
  if (std::holds_alternative<ingest::Accept>(r)) return "accept";
  return std::get<ingest::Rejection>(r).reason;
}

std::string random_body(std::mt19937 &rng) {
  static const std::vector<std::string> pieces = {
      "plain words ", "{code}", "{code:java}", "{noformat}", "```", "~~~", "\n", "x = 1;",
      "{code", "`", "~~", "{noformat:title=a}", "see MINI-1 ", "{{monospace}} ", "[code]"};
  std::string body;
  std::size_t n = rng() % 20;
  for (std::size_t i = 0; i < n; ++i) body += pieces[rng() % pieces.size()];
  return body;
}

Check ac8() {
  Check c;
  const std::string src = "src/main/java/org/example/A.java";
  auto closed = ingest::IssueStatus::Closed;
  c.expect(reason(ingest::filter_candidate({src}, diff_with_changes(11, 11), closed, true)) == "accept",
           "22 changed lines must be accepted");
  c.expect(reason(ingest::filter_candidate({src}, diff_with_changes(11, 12), closed, true)) == "too_many_lines",
           "23 changed lines must be rejected");
  c.expect(reason(ingest::filter_candidate({src}, diff_with_changes(0, 22), closed, true)) == "accept",
           "22 added lines must be accepted");
  c.expect(reason(ingest::filter_candidate({"src/test/java/org/example/ATest.java"},
                                           diff_with_changes(1, 1), closed, true)) == "test_file",
           "test files must be rejected");
  c.expect(reason(ingest::filter_candidate({"src/main/java/org/example/ATest.java"},
                                           diff_with_changes(1, 1), closed, true)) == "test_file",
           "Test-suffixed files must be rejected");
  c.expect(reason(ingest::filter_candidate({src, "src/main/java/org/example/B.java"},
                                           diff_with_changes(1, 1), closed, true)) == "multi_file",
           "multi-file PRs must be rejected");

  std::mt19937 rng(99);
  for (int i = 0; i < 100; ++i) {
    std::string body = random_body(rng);
    std::string once = ingest::redact_code_blocks(body);
    c.expect(ingest::redact_code_blocks(once) == once, "redaction not idempotent on " + json(body).dump());
    c.expect(!ingest::contains_code_block(once), "block left after redaction of " + json(body).dump());
  }
  return c;
}

// ---------------------------------------------------------------- AC9

Check ac9() {
  Check c;
  auto bench = ingest::load_benchmark(kFixtures / "benchmark.jsonl");
  std::map<std::string, ingest::GoldPatch> gold;
  for (const auto &e : bench.entries) gold[e.issue.key] = e.gold;
  std::size_t checked = 0, matches = 0;
  for (const auto &v : variants()) {
    for (const auto &o : pipeline::load_outcomes(kFixtures / "golden" / v.file)) {
      auto it = gold.find(o.task_id);
      if (it == gold.end()) {
        c.expect(false, o.task_id + " has no benchmark entry");
        continue;
      }
      auto e = eval::evaluate_outcome(o, it->second);
      ++checked;
      if (e.full_match) {
        ++matches;
        c.expect(e.codebleu.total >= 1.0 - kMetricSlack,
                 fmt::format("{} {}: full match with CodeBLEU {}", v.file, o.task_id, e.codebleu.total));
      }
    }
  }
  c.expect(checked == 4 * bench.entries.size(), "golden outcomes incomplete");
  c.expect(matches > 0, "no full match among golden outcomes");
  return c;
}

struct Criterion {
  std::string id;
  std::string title;
  std::chrono::milliseconds budget;
  std::function<Check()> run;
};

} // namespace

int main(int argc, char **argv) {
  spdlog::set_level(spdlog::level::err);
  const std::vector<Criterion> criteria = {
      {"AC1", "results-table percentages", std::chrono::milliseconds(1000), ac1},
      {"AC2", "ablation drop ratios", std::chrono::milliseconds(1000), ac2},
      {"AC3", "changed-line buckets", std::chrono::milliseconds(1000), ac3},
      {"AC4", "masking coverage over 200 methods", std::chrono::milliseconds(5000), ac4},
      {"AC5", "CodeBLEU components against oracles", std::chrono::milliseconds(5000), ac5},
      {"AC6", "identifier recommendation", std::chrono::milliseconds(1000), ac6},
      {"AC7", "replayed end-to-end determinism", std::chrono::milliseconds(10000), ac7},
      {"AC8", "benchmark filters and redaction", std::chrono::milliseconds(1000), ac8},
      {"AC9", "full match implies perfect CodeBLEU", std::chrono::milliseconds(1000), ac9},
  };
  std::string only;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--criterion" && i + 1 < argc) only = argv[++i];
  }
  bool all_ok = true;
  bool ran = false;
  for (const auto &cr : criteria) {
    if (!only.empty() && cr.id != only) continue;
    ran = true;
    auto start = std::chrono::steady_clock::now();
    Check result;
    try {
      result = cr.run();
    } catch (const std::exception &e) {
      result.expect(false, std::string("exception: ") + e.what());
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    result.expect(ms <= cr.budget, fmt::format("took {} ms, budget {} ms", ms.count(), cr.budget.count()));
    std::cout << fmt::format("{} {}: {} ({} ms)", result.ok ? "PASS" : "FAIL", cr.id, cr.title, ms.count());
    if (!result.ok) {
      std::cout << " -- " << fmt::format("{}", fmt::join(result.failures, "; "));
    }
    std::cout << "\n";
    all_ok = all_ok && result.ok;
  }
  if (!ran) {
    std::cerr << "unknown criterion " << only << "\n";
    return 2;
  }
  return all_ok ? 0 : 1;
}
