#include "repairkit/cli.hpp"

#include "repairkit/benchmark.hpp"
#include "repairkit/codebleu.hpp"
#include "repairkit/corpus.hpp"
#include "repairkit/evaluation.hpp"
#include "repairkit/gateway.hpp"
#include "repairkit/pipeline.hpp"
#include "repairkit/prompts.hpp"
#include "repairkit/reference.hpp"
#include "repairkit/repo_source.hpp"
#include "repairkit/text.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <iostream>
#include <map>

namespace repairkit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct IngestOpts {
  std::string issues, prs, repo, out, rejections;
};

struct CorpusOpts {
  std::string repo, out, ref;
  std::uint64_t seed = kDefaultSeed;
};

struct RepairOpts {
  std::string benchmark, out, cache_dir, provider = "replay", endpoint, api_key_env = "OPENAI_API_KEY";
  std::string model = "gpt-4-1106-preview", repo, corpus, infill_url, prompts;
  bool no_dr = false, no_reference = false, no_identifiers = false;
  int limit = 0, jobs = 1, timeout_s = 120, max_retries = 2, max_concurrency = 4;
};

struct EvalOpts {
  std::vector<std::string> outcomes;
  std::string benchmark, out;
};

struct ScoreOpts {
  std::string candidate, reference;
};

class InputError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

int cmd_ingest(const IngestOpts &o) {
  std::vector<ingest::IssueRecord> issues;
  std::vector<ingest::PullRequest> prs;
  try {
    issues = ingest::parse_tracker_export(read_file(o.issues), o.issues);
    prs = ingest::parse_pr_export(read_file(o.prs), o.prs);
  } catch (const ingest::FormatError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  auto repo = open_repo(o.repo);
  auto report = ingest::ingest(issues, prs, *repo);
  ingest::write_benchmark(o.out, report.entries);
  json rej = json::object();
  for (const auto &[reason, n] : report.rejections) {
    rej[reason] = n;
  }
  std::string rej_path = o.rejections.empty() ? o.out + ".rejections.json" : o.rejections;
  write_file_atomic(rej_path, rej.dump(2) + "\n");
  std::cout << fmt::format("{} entries, {} rejected\n", report.entries.size(),
                           issues.size() - report.entries.size());
  return report.entries.empty() ? kEmpty : kOk;
}

int cmd_corpus(const CorpusOpts &o) {
  if (!fs::is_directory(o.repo)) {
    throw InputError("repository not found: " + o.repo);
  }
  auto repo = open_repo(o.repo);
  auto stats = corpus::build_corpus(*repo, o.ref, o.out, o.seed);
  json j = {{"files_seen", stats.files_seen},
            {"files_failed", stats.files_failed},
            {"methods_seen", stats.methods_seen},
            {"methods_excluded_short", stats.methods_excluded_short},
            {"samples_emitted", stats.samples_emitted},
            {"coverage_complete", stats.coverage_complete},
            {"sha256", sha256_hex(read_file(o.out))}};
  std::cout << j.dump(2) << "\n";
  return stats.samples_emitted == 0 ? kEmpty : kOk;
}

int cmd_repair(const RepairOpts &o) {
  gateway::GatewayConfig gcfg;
  if (o.provider == "http") {
    gcfg.provider_kind = gateway::ProviderKind::Http;
  } else if (o.provider == "replay") {
    gcfg.provider_kind = gateway::ProviderKind::Replay;
  } else {
    throw InputError("unknown provider " + o.provider);
  }
  gcfg.endpoint = o.endpoint;
  gcfg.api_key_env = o.api_key_env;
  gcfg.cache_dir = o.cache_dir;
  gcfg.timeout = std::chrono::seconds(o.timeout_s);
  gcfg.max_retries = o.max_retries;
  gcfg.max_concurrency = o.max_concurrency;
  gateway::Gateway gw(gcfg);

  prompts::Library lib(o.prompts.empty() ? prompts::default_dir() : fs::path(o.prompts));

  ingest::LoadResult bench;
  try {
    bench = ingest::load_benchmark(o.benchmark);
  } catch (const ingest::FormatError &e) {
    throw InputError(e.what());
  }

  pipeline::PipelineConfig pcfg{!o.no_dr, !o.no_reference, !o.no_identifiers, o.model};

  std::unique_ptr<refpatch::Provider> provider;
  if (pcfg.use_reference) {
    if (!o.infill_url.empty()) {
      provider = std::make_unique<refpatch::RemoteInfillProvider>(o.infill_url);
    } else if (!o.corpus.empty()) {
      auto records = corpus::load_corpus(o.corpus);
      if (records.empty()) {
        spdlog::warn("corpus {} is empty; no reference patches", o.corpus);
      }
      provider = std::make_unique<refpatch::RetrievalProvider>(std::move(records));
    } else {
      spdlog::warn("no --corpus or --infill-url given; running without reference patches");
    }
  }
  std::unique_ptr<RepoSource> repo;
  if (!o.repo.empty()) {
    if (!fs::is_directory(o.repo)) {
      throw InputError("repository not found: " + o.repo);
    }
    repo = open_repo(o.repo);
  } else if (pcfg.use_identifiers) {
    spdlog::warn("no --repo given; running without identifier suggestions");
  }

  std::vector<pipeline::RepairTask> tasks;
  for (const auto &e : bench.entries) {
    if (o.limit > 0 && static_cast<int>(tasks.size()) >= o.limit) {
      break;
    }
    auto task = pipeline::make_task(e, pcfg);
    tasks.push_back(std::move(task));
  }
  if (tasks.empty()) {
    std::cerr << "error: no benchmark entries to repair\n";
    return kEmpty;
  }
  pipeline::Pipeline pipe({&gw, &lib, provider.get(), repo.get()});
  auto outcomes = pipe.run_all(tasks, o.jobs);
  pipeline::write_outcomes(o.out, outcomes);
  std::size_t failed = 0;
  for (const auto &oc : outcomes) {
    failed += oc.error ? 1 : 0;
  }
  std::cout << fmt::format("{} tasks, {} failed, {} network calls\n", outcomes.size(), failed,
                           gw.network_calls());
  return kOk;
}

int cmd_eval(const EvalOpts &o) {
  ingest::LoadResult bench;
  try {
    bench = ingest::load_benchmark(o.benchmark);
  } catch (const ingest::FormatError &e) {
    throw InputError(e.what());
  }
  std::map<std::string, const ingest::BenchmarkEntry *> by_key;
  for (const auto &e : bench.entries) {
    by_key[e.issue.key] = &e;
  }
  std::vector<eval::RunSummary> summaries;
  std::string records;
  bool any_error = false;
  for (const auto &path : o.outcomes) {
    std::vector<pipeline::RepairOutcome> outcomes;
    try {
      outcomes = pipeline::load_outcomes(path);
    } catch (const std::runtime_error &e) {
      throw InputError(e.what());
    }
    if (outcomes.empty()) {
      std::cerr << "error: " << path << " holds no outcomes\n";
      return kEmpty;
    }
    std::vector<eval::EvalOutcome> evals;
    for (const auto &oc : outcomes) {
      auto it = by_key.find(oc.task_id);
      if (it == by_key.end()) {
        throw InputError("outcome for unknown task " + oc.task_id);
      }
      evals.push_back(eval::evaluate_outcome(oc, it->second->gold));
      any_error = any_error || evals.back().errored;
      json rec = eval::to_json(evals.back());
      rec["variant"] = oc.variant;
      records += rec.dump() + "\n";
    }
    summaries.push_back(eval::summarize(evals, bench.entries, outcomes.front().variant));
  }
  std::string report = eval::render_report(summaries);
  std::cout << report;
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    write_file_atomic(fs::path(o.out) / "report.txt", report);
    write_file_atomic(fs::path(o.out) / "records.jsonl", records);
    json sums = json::array();
    for (const auto &s : summaries) {
      sums.push_back(eval::to_json(s));
    }
    write_file_atomic(fs::path(o.out) / "summary.json", sums.dump(2) + "\n");
  }
  return any_error ? kEmpty : kOk;
}

int cmd_score(const ScoreOpts &o) {
  auto s = codebleu::codebleu(read_file(o.candidate), read_file(o.reference));
  json j = {{"ngram", s.ngram},
            {"weighted_ngram", s.weighted_ngram},
            {"ast_match", s.ast_match},
            {"dataflow_match", s.dataflow_match},
            {"total", s.total}};
  std::cout << j.dump(2) << "\n";
  return kOk;
}

void setup_logging(const std::string &level) {
  auto logger = spdlog::get("repairkit");
  if (!logger) {
    logger = spdlog::stderr_color_mt("repairkit");
  }
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(level));
}

} // namespace

int run(int argc, const char *const *argv) {
  CLI::App app{"Issue-driven program repair: benchmark mining, repair pipeline and evaluation"};
  app.set_config("--config", "", "key=value configuration file; command-line flags win");
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  IngestOpts io;
  auto *ingest_cmd = app.add_subcommand("ingest", "Build a benchmark from tracker and PR exports");
  ingest_cmd->add_option("--issues", io.issues, "Issue tracker JSON export")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--prs", io.prs, "Pull request JSON export")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--repo", io.repo, "Repository clone or snapshot")->required()->check(CLI::ExistingDirectory);
  ingest_cmd->add_option("--out", io.out, "Benchmark file to write (JSON lines)")->required();
  ingest_cmd->add_option("--rejections", io.rejections, "Rejection report (default: <out>.rejections.json)");

  CorpusOpts co;
  auto *corpus_cmd = app.add_subcommand("corpus", "Build the masked infilling corpus of a project");
  corpus_cmd->add_option("--repo", co.repo, "Repository clone or snapshot")->required();
  corpus_cmd->add_option("--out", co.out, "Corpus file to write (JSON lines)")->required();
  corpus_cmd->add_option("--seed", co.seed, "Random seed")->capture_default_str();
  corpus_cmd->add_option("--ref", co.ref, "Git revision (default: working tree)");

  RepairOpts ro;
  auto *repair_cmd = app.add_subcommand("repair", "Run the repair pipeline over a benchmark");
  repair_cmd->add_option("--benchmark", ro.benchmark, "Benchmark file")->required()->check(CLI::ExistingFile);
  repair_cmd->add_option("--out", ro.out, "Outcomes file to write (JSON lines)")->required();
  repair_cmd->add_option("--cache-dir", ro.cache_dir, "Model response cache")->required();
  repair_cmd->add_option("--provider", ro.provider, "http or replay")->check(CLI::IsMember({"http", "replay"}))->capture_default_str();
  repair_cmd->add_option("--endpoint", ro.endpoint, "Chat completion URL (http provider)");
  repair_cmd->add_option("--api-key-env", ro.api_key_env, "Environment variable holding the API key")->capture_default_str();
  repair_cmd->add_option("--model", ro.model, "Model id")->capture_default_str();
  repair_cmd->add_option("--timeout", ro.timeout_s, "Request timeout in seconds")->capture_default_str();
  repair_cmd->add_option("--max-retries", ro.max_retries, "Retries per model request")->capture_default_str();
  repair_cmd->add_option("--max-concurrency", ro.max_concurrency, "Simultaneous model requests")->capture_default_str();
  repair_cmd->add_option("--repo", ro.repo, "Repository snapshot for identifier suggestions");
  repair_cmd->add_option("--corpus", ro.corpus, "Infilling corpus for retrieval reference patches");
  repair_cmd->add_option("--infill-url", ro.infill_url, "Remote infill endpoint (POST /infill)");
  repair_cmd->add_option("--prompts", ro.prompts, "Prompt template directory");
  repair_cmd->add_flag("--no-dr", ro.no_dr, "Leave the design rationale out of the draft prompt");
  repair_cmd->add_flag("--no-reference", ro.no_reference, "Leave reference patches out of the final prompt");
  repair_cmd->add_flag("--no-identifiers", ro.no_identifiers, "Leave identifier suggestions out of the final prompt");
  repair_cmd->add_option("--limit", ro.limit, "Repair only the first N entries (0: all)")->check(CLI::NonNegativeNumber);
  repair_cmd->add_option("--jobs", ro.jobs, "Tasks run in parallel")->check(CLI::PositiveNumber)->capture_default_str();

  EvalOpts eo;
  auto *eval_cmd = app.add_subcommand("eval", "Score outcomes against the gold patches");
  eval_cmd->add_option("--outcomes", eo.outcomes, "Outcomes file; repeat for several variants")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--benchmark", eo.benchmark, "Benchmark file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", eo.out, "Directory for report.txt, records.jsonl and summary.json");

  ScoreOpts so;
  auto *score_cmd = app.add_subcommand("score", "CodeBLEU of a candidate file against a reference file");
  score_cmd->add_option("--candidate", so.candidate, "Candidate code")->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--reference", so.reference, "Reference code")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }
  setup_logging(log_level);
  try {
    if (*ingest_cmd) {
      return cmd_ingest(io);
    }
    if (*corpus_cmd) {
      return cmd_corpus(co);
    }
    if (*repair_cmd) {
      return cmd_repair(ro);
    }
    if (*eval_cmd) {
      return cmd_eval(eo);
    }
    if (*score_cmd) {
      return cmd_score(so);
    }
  } catch (const InputError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const gateway::ConfigError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const prompts::TemplateError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const RepoError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

int run(const std::vector<std::string> &args) {
  std::vector<const char *> argv;
  argv.push_back("repairkit");
  for (const auto &a : args) {
    argv.push_back(a.c_str());
  }
  return run(static_cast<int>(argv.size()), argv.data());
}

} // namespace repairkit::cli
