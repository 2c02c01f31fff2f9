#include "repairkit/evaluation.hpp"

#include "repairkit/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>

namespace repairkit::eval {

using nlohmann::json;

std::vector<std::string> normalized_lines(std::string_view text) {
  std::vector<std::string> out;
  for (const auto &l : split_lines(text)) {
    auto t = trim(l);
    if (!t.empty()) {
      out.emplace_back(t);
    }
  }
  return out;
}

bool full_match(std::string_view candidate, std::string_view gold) {
  return normalized_lines(candidate) == normalized_lines(gold);
}

EvalOutcome evaluate_outcome(const pipeline::RepairOutcome &outcome, const ingest::GoldPatch &gold) {
  EvalOutcome e;
  e.task_id = outcome.task_id;
  e.full_match = full_match(outcome.repaired_function, gold.function_after);
  e.codebleu = codebleu::codebleu(outcome.repaired_function, gold.function_after);
  e.fallback_used = outcome.fallback_used;
  e.errored = outcome.error.has_value();
  return e;
}

RunSummary summarize(const std::vector<EvalOutcome> &outcomes,
                     const std::vector<ingest::BenchmarkEntry> &entries, std::string variant) {
  if (outcomes.empty()) {
    throw EmptyRun("no outcomes to summarize");
  }
  std::map<std::string, int, std::less<>> lines_by_task;
  for (const auto &e : entries) {
    lines_by_task[e.issue.key] = e.gold.changed_line_count;
  }
  RunSummary s;
  s.variant = std::move(variant);
  s.n_tasks = outcomes.size();
  double total = 0;
  std::vector<int> counts;
  for (const auto &o : outcomes) {
    s.n_full_match += o.full_match ? 1 : 0;
    s.n_errored += o.errored ? 1 : 0;
    s.n_fallback += o.fallback_used ? 1 : 0;
    total += o.codebleu.total;
    if (auto it = lines_by_task.find(o.task_id); it != lines_by_task.end()) {
      counts.push_back(it->second);
    }
  }
  s.full_match_ratio = static_cast<double>(s.n_full_match) / static_cast<double>(s.n_tasks);
  s.mean_codebleu = std::clamp(total / static_cast<double>(s.n_tasks), 0.0, 1.0);
  s.bucket_histogram = ingest::bucket_histogram(counts);
  return s;
}

std::string format_percent(double ratio) { return fmt::format("{:.2f}%", ratio * 100.0); }

std::string format_count(std::size_t n, std::size_t total) {
  if (total == 0) {
    throw EmptyRun("percentage of an empty run");
  }
  return fmt::format("{}({})", n,
                     format_percent(static_cast<double>(n) / static_cast<double>(total)));
}

double drop_ratio(double base, double variant) {
  if (base == 0) {
    throw DivisionByZero("drop ratio against a zero baseline");
  }
  return (base - variant) / base;
}

std::string render_report(const std::vector<RunSummary> &summaries) {
  std::string out;
  std::size_t width = 7;
  for (const auto &s : summaries) {
    width = std::max(width, s.variant.size());
  }
  out += fmt::format("{:<{}}  {:>16}  {:>8}  {:>6}\n", "Variant", width, "Full-Match", "CodeBLEU",
                     "Tasks");
  for (const auto &s : summaries) {
    out += fmt::format("{:<{}}  {:>16}  {:>8.3f}  {:>6}\n", s.variant, width,
                       format_count(s.n_full_match, s.n_tasks), s.mean_codebleu, s.n_tasks);
  }

  auto full = std::find_if(summaries.begin(), summaries.end(),
                           [](const auto &s) { return s.variant == "full"; });
  if (full != summaries.end() && summaries.size() > 1) {
    out += "\nAblation (drop against full)\n";
    out += fmt::format("{:<{}}  {:>18}  {:>18}\n", "Variant", width, "Full-Match", "CodeBLEU");
    for (const auto &s : summaries) {
      if (&s == &*full) {
        continue;
      }
      std::string fm = full->n_full_match == 0
                           ? fmt::format("{} (n/a)", s.n_full_match)
                           : fmt::format("{} (↓{})", s.n_full_match,
                                         format_percent(drop_ratio(
                                             static_cast<double>(full->n_full_match),
                                             static_cast<double>(s.n_full_match))));
      std::string cb = full->mean_codebleu == 0
                           ? fmt::format("{:.3f} (n/a)", s.mean_codebleu)
                           : fmt::format("{:.3f} (↓{})", s.mean_codebleu,
                                         format_percent(drop_ratio(full->mean_codebleu,
                                                                   s.mean_codebleu)));
      out += fmt::format("{:<{}}  {:>18}  {:>18}\n", s.variant, width, fm, cb);
    }
  }

  for (const auto &s : summaries) {
    out += fmt::format("\nChanged lines ({})\n", s.variant);
    std::size_t bucketed = 0;
    for (const auto &[label, n] : s.bucket_histogram) {
      bucketed += static_cast<std::size_t>(n);
    }
    for (const auto &[label, n] : s.bucket_histogram) {
      out += fmt::format("  {:<8} {}\n", label,
                         bucketed ? format_count(static_cast<std::size_t>(n), bucketed)
                                  : std::string("0"));
    }
    if (s.n_errored || s.n_fallback) {
      out += fmt::format("  errored: {}  fallback: {}\n", s.n_errored, s.n_fallback);
    }
  }
  return out;
}

json to_json(const EvalOutcome &o) {
  return {{"task_id", o.task_id},
          {"full_match", o.full_match},
          {"codebleu",
           {{"ngram", o.codebleu.ngram},
            {"weighted_ngram", o.codebleu.weighted_ngram},
            {"ast_match", o.codebleu.ast_match},
            {"dataflow_match", o.codebleu.dataflow_match},
            {"total", o.codebleu.total}}},
          {"fallback_used", o.fallback_used},
          {"errored", o.errored}};
}

json to_json(const RunSummary &s) {
  json hist = json::object();
  for (const auto &[label, n] : s.bucket_histogram) {
    hist[label] = n;
  }
  return {{"variant", s.variant},
          {"n_tasks", s.n_tasks},
          {"n_full_match", s.n_full_match},
          {"full_match_ratio", s.full_match_ratio},
          {"mean_codebleu", s.mean_codebleu},
          {"n_errored", s.n_errored},
          {"n_fallback", s.n_fallback},
          {"bucket_histogram", hist}};
}

} // namespace repairkit::eval
