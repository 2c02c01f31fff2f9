#include "repairkit/design_rationale.hpp"

#include "repairkit/text.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <map>
#include <regex>

namespace repairkit::dr {

using nlohmann::json;

std::string_view to_string(Stance s) { return s == Stance::Opposes ? "opposes" : "supports"; }

DesignRationale parse_extraction(std::string_view model_text, const std::string &issue_key,
                                 int comment_count) {
  static const std::regex solution_re(
      R"(^SOLUTION\s+(\d+)\s*\[\s*comment\s+(\d+)\s*\]\s*:\s*(.*\S)\s*$)", std::regex::icase);
  static const std::regex argument_re(
      R"(^ARGUMENT\s+(\d+)\s*\[\s*comment\s+(\d+)\s*\]\s*(?:\(\s*([A-Za-z]*)\s*\))?\s*:\s*(.*\S)\s*$)",
      std::regex::icase);

  DesignRationale dr;
  dr.issue_key = issue_key;
  bool saw_none = false;
  bool saw_line = false;
  std::map<long, std::size_t> numbering; // model's solution number -> index
  struct PendingArg {
    long solution;
    Argument arg;
  };
  std::vector<PendingArg> pending;

  auto valid_comment = [&](long idx) { return idx >= 0 && idx < comment_count; };

  for (const auto &raw : split_lines(model_text)) {
    std::string line(trim(raw));
    if (line.empty() || line.rfind("```", 0) == 0) {
      continue;
    }
    if (to_lower(line) == "none") {
      saw_none = true;
      continue;
    }
    std::smatch m;
    if (std::regex_match(line, m, solution_re)) {
      saw_line = true;
      long n = std::stol(m[1].str());
      long c = std::stol(m[2].str());
      if (!valid_comment(c) || numbering.count(n)) {
        spdlog::warn("{}: dropped solution line '{}'", issue_key, line);
        continue;
      }
      numbering[n] = dr.solutions.size();
      dr.solutions.push_back({m[3].str(), static_cast<int>(c)});
    } else if (std::regex_match(line, m, argument_re)) {
      saw_line = true;
      long c = std::stol(m[2].str());
      if (!valid_comment(c)) {
        spdlog::warn("{}: dropped argument line '{}'", issue_key, line);
        continue;
      }
      Stance stance = to_lower(m[3].str()) == "opposes" ? Stance::Opposes : Stance::Supports;
      pending.push_back({std::stol(m[1].str()), {m[4].str(), static_cast<int>(c), stance, 0}});
    }
  }
  for (auto &p : pending) {
    auto it = numbering.find(p.solution);
    if (it == numbering.end()) {
      spdlog::warn("{}: argument refers to unknown solution {}", issue_key, p.solution);
      continue;
    }
    p.arg.solution_ref = it->second;
    dr.arguments.push_back(std::move(p.arg));
  }
  if (!saw_line && !saw_none) {
    throw ParseError("no SOLUTION/ARGUMENT lines in model output for " + issue_key);
  }
  return dr;
}

gateway::PromptRequest extraction_request(const ingest::IssueRecord &issue,
                                          const prompts::Library &lib,
                                          const std::string &model_id) {
  std::string comments;
  for (const auto &c : issue.comments) {
    comments += fmt::format("[comment {}] {}:\n{}\n\n", c.index,
                            c.author.empty() ? "unknown" : c.author, trim(c.body));
  }
  while (!comments.empty() && comments.back() == '\n') {
    comments.pop_back();
  }
  gateway::PromptRequest req;
  req.model_id = model_id;
  req.request_tag = "dr";
  req.messages.push_back({gateway::Role::System, lib.get("dr_extract_system")});
  req.messages.push_back(
      {gateway::Role::User,
       lib.render("dr_extract_user",
                  {{"issue_key", issue.key}, {"summary", issue.summary}, {"comments", comments}})});
  return req;
}

DesignRationale extract_dr(const ingest::IssueRecord &issue, gateway::Gateway &gw,
                           const prompts::Library &lib, const std::string &model_id,
                           std::vector<std::string> *replay_keys) {
  const int n = static_cast<int>(issue.comments.size());
  if (n == 0) {
    return DesignRationale{issue.key, {}, {}};
  }
  auto ask = [&](const gateway::PromptRequest &req) {
    if (replay_keys) {
      replay_keys->push_back(gateway::replay_key(req));
    }
    return gw.complete(req);
  };
  auto req = extraction_request(issue, lib, model_id);
  std::string answer = ask(req);
  try {
    return parse_extraction(answer, issue.key, n);
  } catch (const ParseError &) {
    spdlog::info("{}: asking for a reformatted rationale", issue.key);
  }
  req.request_tag = "dr-reformat";
  req.messages.push_back({gateway::Role::Assistant, answer.empty() ? std::string("(empty)") : answer});
  req.messages.push_back({gateway::Role::User, lib.get("dr_reformat")});
  return parse_extraction(ask(req), issue.key, n);
}

std::string render_dr_section(const DesignRationale &dr) {
  std::string out;
  for (std::size_t i = 0; i < dr.solutions.size(); ++i) {
    out += fmt::format("Solution {}: {}\n", i + 1, dr.solutions[i].text);
    for (const auto &a : dr.arguments) {
      if (a.solution_ref == i) {
        out += fmt::format("  Argument ({}): {}\n", to_string(a.stance), a.text);
      }
    }
  }
  if (!out.empty()) {
    out.pop_back();
  }
  return out;
}

json to_json(const DesignRationale &dr) {
  json sols = json::array();
  for (const auto &s : dr.solutions) {
    sols.push_back({{"text", s.text}, {"comment_index", s.comment_index}});
  }
  json args = json::array();
  for (const auto &a : dr.arguments) {
    args.push_back({{"text", a.text},
                    {"comment_index", a.comment_index},
                    {"stance", to_string(a.stance)},
                    {"solution_ref", a.solution_ref}});
  }
  return {{"issue_key", dr.issue_key}, {"solutions", sols}, {"arguments", args}};
}

DesignRationale dr_from_json(const json &j) {
  DesignRationale dr;
  dr.issue_key = j.at("issue_key").get<std::string>();
  for (const auto &s : j.at("solutions")) {
    dr.solutions.push_back({s.at("text").get<std::string>(), s.at("comment_index").get<int>()});
  }
  for (const auto &a : j.at("arguments")) {
    Argument arg;
    arg.text = a.at("text").get<std::string>();
    arg.comment_index = a.at("comment_index").get<int>();
    arg.stance = a.at("stance").get<std::string>() == "opposes" ? Stance::Opposes : Stance::Supports;
    arg.solution_ref = a.at("solution_ref").get<std::size_t>();
    if (arg.solution_ref >= dr.solutions.size()) {
      throw ParseError("argument refers to a missing solution");
    }
    dr.arguments.push_back(std::move(arg));
  }
  return dr;
}

} // namespace repairkit::dr
