#pragma once

#include "repairkit/benchmark.hpp"
#include "repairkit/codebleu.hpp"
#include "repairkit/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace repairkit::eval {

class EmptyRun : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class DivisionByZero : public std::domain_error {
  using std::domain_error::domain_error;
};

/// Lines trimmed at both ends, blank lines removed.
std::vector<std::string> normalized_lines(std::string_view text);

bool full_match(std::string_view candidate_function, std::string_view gold_function);

struct EvalOutcome {
  std::string task_id;
  bool full_match = false;
  codebleu::Score codebleu;
  bool fallback_used = false;
  bool errored = false;
};

EvalOutcome evaluate_outcome(const pipeline::RepairOutcome &outcome, const ingest::GoldPatch &gold);

struct RunSummary {
  std::string variant;
  std::size_t n_tasks = 0;
  std::size_t n_full_match = 0;
  double full_match_ratio = 0;
  double mean_codebleu = 0;
  std::size_t n_errored = 0;
  std::size_t n_fallback = 0;
  std::vector<std::pair<std::string, int>> bucket_histogram;
};

/// Throws EmptyRun for no outcomes. `entries` supplies the changed-line
/// counts for the histogram; outcomes without an entry are not bucketed.
RunSummary summarize(const std::vector<EvalOutcome> &outcomes,
                     const std::vector<ingest::BenchmarkEntry> &entries,
                     std::string variant = "full");

/// "15.27%": ratio * 100 at two decimals.
std::string format_percent(double ratio);

/// "109(15.27%)".
std::string format_count(std::size_t n, std::size_t total);

/// (base - variant) / base. Throws DivisionByZero when base is 0.
double drop_ratio(double base, double variant);

/// Full-match / CodeBLEU table, one row per summary; when a "full" summary
/// is present the other rows also get a drop-ratio table against it.
std::string render_report(const std::vector<RunSummary> &summaries);

nlohmann::json to_json(const EvalOutcome &o);
nlohmann::json to_json(const RunSummary &s);

} // namespace repairkit::eval
