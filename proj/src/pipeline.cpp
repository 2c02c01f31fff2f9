#include "repairkit/pipeline.hpp"

#include "repairkit/text.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <thread>

namespace repairkit::pipeline {

using nlohmann::json;

std::string PipelineConfig::variant() const {
  std::string v;
  if (!use_dr) {
    v += "-DR";
  }
  if (!use_reference) {
    v += "-PF";
  }
  if (!use_identifiers) {
    v += "-ID";
  }
  return v.empty() ? "full" : v;
}

RepairTask make_task(const ingest::BenchmarkEntry &entry, const PipelineConfig &config) {
  entry.issue.validate();
  RepairTask task;
  task.entry = entry;
  task.buggy_function = entry.gold.function_before;
  task.config = config;
  return task;
}

gateway::PromptRequest assemble_draft_prompt(const RepairTask &task, const prompts::Library &lib) {
  std::vector<std::string> sections;
  sections.push_back(lib.get("draft_instruction"));
  sections.push_back(lib.render("draft_summary", {{"summary", task.entry.issue.summary}}));
  sections.push_back(lib.render("draft_code", {{"function", task.buggy_function}}));
  if (task.config.use_dr && !task.dr.empty()) {
    sections.push_back(lib.render("draft_dr", {{"dr", dr::render_dr_section(task.dr)}}));
  }
  sections.push_back(lib.get("draft_output"));

  gateway::PromptRequest req;
  req.model_id = task.config.model_id;
  req.request_tag = "draft";
  req.messages.push_back({gateway::Role::User, fmt::format("{}", fmt::join(sections, "\n\n"))});
  return req;
}

namespace {

std::string block_body(std::string_view raw) {
  auto lines = split_lines(raw);
  std::vector<std::string> kept;
  for (auto &l : lines) {
    if (trim(l).rfind("```", 0) == 0) {
      continue;
    }
    kept.push_back(std::move(l));
  }
  while (!kept.empty() && is_blank(kept.front())) {
    kept.erase(kept.begin());
  }
  while (!kept.empty() && is_blank(kept.back())) {
    kept.pop_back();
  }
  return join_lines(kept);
}

void check_disjoint(std::vector<SnippetPatchPair> pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const auto &a, const auto &b) { return a.span.start < b.span.start; });
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (pairs[i - 1].span.overlaps(pairs[i].span)) {
      throw OverlapError(fmt::format("snippets at lines {}-{} and {}-{} overlap",
                                     pairs[i - 1].span.start, pairs[i - 1].span.end,
                                     pairs[i].span.start, pairs[i].span.end));
    }
  }
}

} // namespace

std::vector<SnippetPatchPair> parse_draft_output(std::string_view text,
                                                 std::string_view buggy_function) {
  constexpr std::string_view kSnipOpen = "<buggy_snippet>";
  constexpr std::string_view kSnipClose = "</buggy_snippet>";
  constexpr std::string_view kPatchOpen = "<patch>";
  constexpr std::string_view kPatchClose = "</patch>";

  std::vector<SnippetPatchPair> pairs;
  std::size_t pos = 0;
  while (true) {
    std::size_t s0 = text.find(kSnipOpen, pos);
    if (s0 == std::string_view::npos) {
      break;
    }
    std::size_t s1 = text.find(kSnipClose, s0);
    if (s1 == std::string_view::npos) {
      break;
    }
    std::size_t p0 = text.find(kPatchOpen, s1);
    if (p0 == std::string_view::npos) {
      break;
    }
    std::size_t p1 = text.find(kPatchClose, p0);
    if (p1 == std::string_view::npos) {
      break;
    }
    pos = p1 + kPatchClose.size();
    std::size_t next_snip = text.find(kSnipOpen, s1);
    if (next_snip < p0) {
      spdlog::warn("buggy_snippet without a patch skipped");
      pos = next_snip;
      continue;
    }
    std::string snippet = block_body(text.substr(s0 + kSnipOpen.size(), s1 - s0 - kSnipOpen.size()));
    std::string patch = block_body(text.substr(p0 + kPatchOpen.size(), p1 - p0 - kPatchOpen.size()));
    if (is_blank(patch)) {
      spdlog::warn("pair with an empty patch dropped");
      continue;
    }
    auto span = analysis::find_verbatim(snippet, buggy_function);
    if (!span || is_blank(snippet)) {
      spdlog::warn("snippet not found in the buggy function; pair dropped");
      continue;
    }
    pairs.push_back({std::move(snippet), std::move(patch), *span});
  }
  if (pairs.empty()) {
    throw ParseError("no usable buggy_snippet/patch pair in model output");
  }
  check_disjoint(pairs);
  return pairs;
}

gateway::PromptRequest assemble_final_prompt(
    const RepairTask &task, const gateway::PromptRequest &draft_request,
    const std::string &draft_answer,
    const std::vector<std::optional<refpatch::ReferencePatch>> &references,
    const std::vector<ident::IdentifierSuggestion> &suggestions, const prompts::Library &lib) {
  std::vector<std::string> parts;
  parts.push_back(lib.get("final_role"));
  if (task.config.use_reference) {
    for (std::size_t i = 0; i < references.size(); ++i) {
      if (references[i]) {
        parts.push_back(lib.render("final_reference", {{"index", std::to_string(i + 1)},
                                                       {"reference", references[i]->text}}));
      }
    }
  }
  if (task.config.use_identifiers && !suggestions.empty()) {
    parts.push_back(
        lib.render("final_identifiers", {{"suggestions", ident::render_suggestions(suggestions)}}));
  }
  parts.push_back(lib.get("final_directives"));

  gateway::PromptRequest req = draft_request;
  req.request_tag = "final";
  req.messages.push_back(
      {gateway::Role::Assistant, draft_answer.empty() ? std::string("(empty)") : draft_answer});
  req.messages.push_back({gateway::Role::User, fmt::format("{}", fmt::join(parts, "\n\n"))});
  return req;
}

std::string apply_patch(std::string_view buggy_function,
                        const std::vector<SnippetPatchPair> &pairs) {
  check_disjoint(pairs);
  auto lines = split_lines(buggy_function);
  std::vector<SnippetPatchPair> ordered = pairs;
  std::sort(ordered.begin(), ordered.end(),
            [](const auto &a, const auto &b) { return a.span.start > b.span.start; });
  for (const auto &p : ordered) {
    if (p.span.start < 1 || p.span.end < p.span.start ||
        p.span.end > static_cast<int>(lines.size())) {
      throw std::invalid_argument(fmt::format("span {}-{} outside a {}-line function",
                                              p.span.start, p.span.end, lines.size()));
    }
    std::string base(indentation(lines[p.span.start - 1]));
    std::vector<std::string> replacement;
    for (const auto &l : split_lines(p.patch)) {
      if (!is_blank(l) && indentation(l).empty()) {
        replacement.push_back(base + l);
      } else {
        replacement.push_back(l);
      }
    }
    auto first = lines.begin() + (p.span.start - 1);
    lines.erase(first, lines.begin() + p.span.end);
    lines.insert(lines.begin() + (p.span.start - 1), replacement.begin(), replacement.end());
  }
  return join_lines(lines);
}

Pipeline::Pipeline(Services services) : services_(services) {
  if (!services_.gateway || !services_.prompts) {
    throw std::invalid_argument("pipeline needs a gateway and a prompt library");
  }
}

const Pipeline::ProjectKnowledge &Pipeline::knowledge(const std::string &ref) {
  std::lock_guard lock(knowledge_mu_);
  auto it = knowledge_.find(ref);
  if (it != knowledge_.end()) {
    return it->second;
  }
  ProjectKnowledge k{{analysis::TableScope::Project, {}}};
  for (const auto &path : project_source_files(*services_.repo, ref)) {
    k.table.add(services_.repo->read(path, ref));
  }
  return knowledge_.emplace(ref, std::move(k)).first->second;
}

std::string Pipeline::complete(const gateway::PromptRequest &req, RepairOutcome &out) {
  out.transcript.push_back({req.request_tag, gateway::replay_key(req)});
  return services_.gateway->complete(req);
}

std::vector<SnippetPatchPair> Pipeline::ask_for_pairs(gateway::PromptRequest &req,
                                                      const std::string &buggy_function,
                                                      RepairOutcome &out, std::string *answer) {
  std::string text = complete(req, out);
  try {
    auto pairs = parse_draft_output(text, buggy_function);
    *answer = text;
    return pairs;
  } catch (const ParseError &e) {
    spdlog::info("{}: {} stage needs a reformat: {}", out.task_id, req.request_tag, e.what());
  } catch (const OverlapError &e) {
    spdlog::info("{}: {} stage needs a reformat: {}", out.task_id, req.request_tag, e.what());
  }
  req.messages.push_back({gateway::Role::Assistant, text.empty() ? std::string("(empty)") : text});
  req.messages.push_back({gateway::Role::User, services_.prompts->get("patch_reformat")});
  req.request_tag += "-reformat";
  text = complete(req, out);
  auto pairs = parse_draft_output(text, buggy_function);
  *answer = text;
  return pairs;
}

RepairOutcome Pipeline::run(const RepairTask &input) {
  RepairTask task = input;
  RepairOutcome out;
  out.task_id = task.task_id();
  out.variant = task.config.variant();
  out.repaired_function = task.buggy_function;
  const auto &lib = *services_.prompts;
  try {
    if (task.config.use_dr && task.dr.issue_key.empty()) {
      std::vector<std::string> keys;
      try {
        task.dr = dr::extract_dr(task.entry.issue, *services_.gateway, lib, task.config.model_id, &keys);
      } catch (...) {
        for (std::size_t i = 0; i < keys.size(); ++i) {
          out.transcript.push_back({i == 0 ? "dr" : "dr-reformat", keys[i]});
        }
        throw;
      }
      for (std::size_t i = 0; i < keys.size(); ++i) {
        out.transcript.push_back({i == 0 ? "dr" : "dr-reformat", keys[i]});
      }
    }
    out.dr = task.dr;

    auto draft_req = assemble_draft_prompt(task, lib);
    std::string draft_answer;
    out.draft_pairs = ask_for_pairs(draft_req, task.buggy_function, out, &draft_answer);

    out.references.assign(out.draft_pairs.size(), std::nullopt);
    if (task.config.use_reference && services_.reference_provider) {
      for (std::size_t i = 0; i < out.draft_pairs.size(); ++i) {
        auto query = refpatch::mask_defective_span(task.buggy_function, out.draft_pairs[i].span,
                                                   out.task_id);
        out.references[i] = refpatch::generate_reference(query, *services_.reference_provider);
      }
    }

    if (task.config.use_identifiers && services_.repo) {
      const auto &gold = task.entry.gold;
      try {
        analysis::SourceFile file{gold.file_path,
                                  services_.repo->read(gold.file_path, task.entry.repo_ref)};
        std::vector<std::string> patches;
        for (const auto &p : out.draft_pairs) {
          patches.push_back(p.patch);
        }
        for (const auto &r : out.references) {
          if (r) {
            patches.push_back(r->text);
          }
        }
        out.suggestions = ident::suggest_for_patches(patches, file,
                                                     knowledge(task.entry.repo_ref).table);
      } catch (const RepoError &e) {
        spdlog::warn("{}: no identifier feedback: {}", out.task_id, e.what());
      }
    }

    auto final_req = assemble_final_prompt(task, draft_req, draft_answer, out.references,
                                           out.suggestions, lib);
    std::string final_answer;
    try {
      out.final_pairs = ask_for_pairs(final_req, task.buggy_function, out, &final_answer);
    } catch (const ParseError &e) {
      spdlog::warn("{}: final answer unusable, keeping the draft: {}", out.task_id, e.what());
      out.final_pairs = out.draft_pairs;
      out.fallback_used = true;
    } catch (const OverlapError &e) {
      spdlog::warn("{}: final answer unusable, keeping the draft: {}", out.task_id, e.what());
      out.final_pairs = out.draft_pairs;
      out.fallback_used = true;
    }
    out.repaired_function = apply_patch(task.buggy_function, out.final_pairs);
  } catch (const std::exception &e) {
    spdlog::error("{}: {}", out.task_id, e.what());
    out.error = e.what();
    out.repaired_function = task.buggy_function;
  }
  return out;
}

std::vector<RepairOutcome> Pipeline::run_all(const std::vector<RepairTask> &tasks, int jobs) {
  std::vector<RepairOutcome> outcomes(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      outcomes[i] = run(tasks[i]);
    }
  };
  std::size_t n = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1,
                                          std::max<std::size_t>(tasks.size(), 1));
  if (n == 1) {
    worker();
    return outcomes;
  }
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < n; ++t) {
    threads.emplace_back(worker);
  }
  for (auto &t : threads) {
    t.join();
  }
  return outcomes;
}

// ---- records ------------------------------------------------------------

namespace {

json pairs_json(const std::vector<SnippetPatchPair> &pairs) {
  json arr = json::array();
  for (const auto &p : pairs) {
    arr.push_back({{"buggy_snippet", p.buggy_snippet},
                   {"patch", p.patch},
                   {"span", {p.span.start, p.span.end}}});
  }
  return arr;
}

std::vector<SnippetPatchPair> pairs_from_json(const json &arr) {
  std::vector<SnippetPatchPair> out;
  for (const auto &p : arr) {
    out.push_back({p.at("buggy_snippet").get<std::string>(), p.at("patch").get<std::string>(),
                   {p.at("span").at(0).get<int>(), p.at("span").at(1).get<int>()}});
  }
  return out;
}

} // namespace

json to_json(const RepairOutcome &o) {
  json refs = json::array();
  for (const auto &r : o.references) {
    if (r) {
      refs.push_back(
          {{"text", r->text}, {"provider_id", refpatch::to_string(r->provider_id)}, {"score", r->score}});
    } else {
      refs.push_back(nullptr);
    }
  }
  json sugg = json::array();
  for (const auto &s : o.suggestions) {
    json cands = json::array();
    for (const auto &c : s.candidates) {
      cands.push_back({{"identifier", c.identifier},
                       {"similarity", c.similarity},
                       {"source", ident::to_string(c.source)}});
    }
    sugg.push_back({{"suspect", s.suspect}, {"candidates", cands}});
  }
  json transcript = json::array();
  for (const auto &t : o.transcript) {
    transcript.push_back({{"stage", t.stage}, {"replay_key", t.replay_key}});
  }
  return {{"task_id", o.task_id},
          {"variant", o.variant},
          {"dr", dr::to_json(o.dr)},
          {"draft_pairs", pairs_json(o.draft_pairs)},
          {"references", refs},
          {"suggestions", sugg},
          {"final_pairs", pairs_json(o.final_pairs)},
          {"repaired_function", o.repaired_function},
          {"transcript", transcript},
          {"fallback_used", o.fallback_used},
          {"error", o.error ? json(*o.error) : json(nullptr)}};
}

RepairOutcome outcome_from_json(const json &j) {
  RepairOutcome o;
  o.task_id = j.at("task_id").get<std::string>();
  o.variant = j.value("variant", "full");
  if (j.contains("dr") && !j["dr"].is_null()) {
    o.dr = dr::dr_from_json(j["dr"]);
  }
  o.draft_pairs = pairs_from_json(j.at("draft_pairs"));
  for (const auto &r : j.at("references")) {
    if (r.is_null()) {
      o.references.emplace_back();
    } else {
      o.references.push_back(refpatch::ReferencePatch{
          r.at("text").get<std::string>(),
          r.at("provider_id").get<std::string>() == "remote_model"
              ? refpatch::ProviderId::RemoteModel
              : refpatch::ProviderId::Retrieval,
          r.at("score").get<double>()});
    }
  }
  for (const auto &s : j.at("suggestions")) {
    ident::IdentifierSuggestion sugg{s.at("suspect").get<std::string>(), {}};
    for (const auto &c : s.at("candidates")) {
      sugg.candidates.push_back({c.at("identifier").get<std::string>(),
                                 c.at("similarity").get<double>(),
                                 c.at("source").get<std::string>() == "file"
                                     ? ident::CandidateSource::File
                                     : ident::CandidateSource::Snippet});
    }
    o.suggestions.push_back(std::move(sugg));
  }
  o.final_pairs = pairs_from_json(j.at("final_pairs"));
  o.repaired_function = j.at("repaired_function").get<std::string>();
  for (const auto &t : j.at("transcript")) {
    o.transcript.push_back({t.at("stage").get<std::string>(), t.at("replay_key").get<std::string>()});
  }
  o.fallback_used = j.value("fallback_used", false);
  if (j.contains("error") && !j["error"].is_null()) {
    o.error = j["error"].get<std::string>();
  }
  return o;
}

void write_outcomes(const std::filesystem::path &path, const std::vector<RepairOutcome> &outcomes) {
  std::string data;
  for (const auto &o : outcomes) {
    data += to_json(o).dump();
    data += '\n';
  }
  write_file_atomic(path, data);
}

std::vector<RepairOutcome> load_outcomes(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open outcomes file " + path.string());
  }
  std::vector<RepairOutcome> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) {
      continue;
    }
    try {
      out.push_back(outcome_from_json(json::parse(line)));
    } catch (const std::exception &e) {
      throw std::runtime_error(fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    }
  }
  return out;
}

} // namespace repairkit::pipeline
