#pragma once

#include "repairkit/benchmark.hpp"
#include "repairkit/code_analysis.hpp"
#include "repairkit/design_rationale.hpp"
#include "repairkit/gateway.hpp"
#include "repairkit/identifiers.hpp"
#include "repairkit/prompts.hpp"
#include "repairkit/reference.hpp"
#include "repairkit/repo_source.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace repairkit::pipeline {

/// Block headers; an ablated prompt never contains the header of the block
/// it leaves out.
inline constexpr std::string_view kSummaryHeader = "[Summary]";
inline constexpr std::string_view kDrHeader = "[Design Rationale]";
inline constexpr std::string_view kReferenceHeader = "[Reference Patch";
inline constexpr std::string_view kIdentifierHeader = "[Identifier Suggestions]";

struct SnippetPatchPair {
  std::string buggy_snippet;
  std::string patch;
  analysis::LineSpan span; // within the buggy function, 1-based
  friend bool operator==(const SnippetPatchPair &, const SnippetPatchPair &) = default;
};

struct PipelineConfig {
  bool use_dr = true;
  bool use_reference = true;
  bool use_identifiers = true;
  std::string model_id = gateway::kDefaultModel;

  /// "full", or the removed parts such as "-DR" or "-PF-ID".
  std::string variant() const;
};

struct RepairTask {
  ingest::BenchmarkEntry entry;
  std::string buggy_function;
  dr::DesignRationale dr;
  PipelineConfig config;

  const std::string &task_id() const { return entry.issue.key; }
};

RepairTask make_task(const ingest::BenchmarkEntry &entry, const PipelineConfig &config);

class ParseError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class OverlapError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TranscriptEntry {
  std::string stage;
  std::string replay_key;
};

struct RepairOutcome {
  std::string task_id;
  std::string variant;
  dr::DesignRationale dr;
  std::vector<SnippetPatchPair> draft_pairs;
  std::vector<std::optional<refpatch::ReferencePatch>> references; // one per draft pair
  std::vector<ident::IdentifierSuggestion> suggestions;
  std::vector<SnippetPatchPair> final_pairs;
  std::string repaired_function;
  std::vector<TranscriptEntry> transcript;
  bool fallback_used = false;
  std::optional<std::string> error; // set when the task failed
};

/// Instruction, [Summary] block, buggy code, design rationale (when enabled
/// and non-empty) and output instruction, as one user message.
gateway::PromptRequest assemble_draft_prompt(const RepairTask &task, const prompts::Library &lib);

/// Pairs of <buggy_snippet>..</buggy_snippet> <patch>..</patch> blocks, in
/// order. Pairs whose snippet is not found verbatim in the function, or whose
/// patch is empty, are dropped. Throws ParseError when no pair is left and
/// OverlapError when two snippets overlap.
std::vector<SnippetPatchPair> parse_draft_output(std::string_view model_text,
                                                 std::string_view buggy_function);

/// The draft request and answer as prior turns, then a user turn with the
/// expert role and tips, reference patches, identifier suggestions and the
/// output directives.
gateway::PromptRequest assemble_final_prompt(
    const RepairTask &task, const gateway::PromptRequest &draft_request,
    const std::string &draft_answer,
    const std::vector<std::optional<refpatch::ReferencePatch>> &references,
    const std::vector<ident::IdentifierSuggestion> &suggestions, const prompts::Library &lib);

/// Replaces each pair's span with its patch, bottom-up. Patch lines without
/// indentation take the indentation of the first replaced line. Throws
/// OverlapError.
std::string apply_patch(std::string_view buggy_function,
                        const std::vector<SnippetPatchPair> &pairs);

struct Services {
  gateway::Gateway *gateway = nullptr;
  const prompts::Library *prompts = nullptr;
  refpatch::Provider *reference_provider = nullptr; // none: no references
  const RepoSource *repo = nullptr;                 // none: no identifier feedback
};

class Pipeline {
public:
  explicit Pipeline(Services services);

  /// Never throws for task-level failures: they are recorded in
  /// RepairOutcome::error and the buggy function is returned unchanged.
  RepairOutcome run(const RepairTask &task);

  /// Outcomes in task order; `jobs` tasks run at a time.
  std::vector<RepairOutcome> run_all(const std::vector<RepairTask> &tasks, int jobs = 1);

private:
  struct ProjectKnowledge {
    analysis::IdentifierTable table;
  };
  const ProjectKnowledge &knowledge(const std::string &ref);
  std::string complete(const gateway::PromptRequest &req, RepairOutcome &out);
  std::vector<SnippetPatchPair> ask_for_pairs(gateway::PromptRequest &req,
                                              const std::string &buggy_function,
                                              RepairOutcome &out, std::string *answer);

  Services services_;
  std::mutex knowledge_mu_;
  std::map<std::string, ProjectKnowledge> knowledge_;
};

nlohmann::json to_json(const RepairOutcome &outcome);
RepairOutcome outcome_from_json(const nlohmann::json &j);

/// One JSON record per line.
void write_outcomes(const std::filesystem::path &path, const std::vector<RepairOutcome> &outcomes);
std::vector<RepairOutcome> load_outcomes(const std::filesystem::path &path);

} // namespace repairkit::pipeline
