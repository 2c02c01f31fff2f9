#pragma once

#include "repairkit/benchmark.hpp"
#include "repairkit/gateway.hpp"
#include "repairkit/prompts.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace repairkit::dr {

struct Solution {
  std::string text;
  int comment_index = 0;
  friend bool operator==(const Solution &, const Solution &) = default;
};

enum class Stance { Supports, Opposes };

std::string_view to_string(Stance s);

struct Argument {
  std::string text;
  int comment_index = 0;
  Stance stance = Stance::Supports;
  std::size_t solution_ref = 0; // index into DesignRationale::solutions
  friend bool operator==(const Argument &, const Argument &) = default;
};

struct DesignRationale {
  std::string issue_key;
  std::vector<Solution> solutions;
  std::vector<Argument> arguments;

  bool empty() const { return solutions.empty(); }
  friend bool operator==(const DesignRationale &, const DesignRationale &) = default;
};

class ParseError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reads the SOLUTION/ARGUMENT line format. Lines naming a comment index
/// outside [0, comment_count) or an unknown solution are dropped; a stance
/// other than "opposes" reads as supports. Throws ParseError when the text
/// contains neither NONE nor a usable line.
DesignRationale parse_extraction(std::string_view model_text, const std::string &issue_key,
                                 int comment_count);

gateway::PromptRequest extraction_request(const ingest::IssueRecord &issue,
                                          const prompts::Library &lib,
                                          const std::string &model_id = gateway::kDefaultModel);

/// Asks the model once, and once more with a reformat instruction when the
/// first answer does not parse. Issues without comments give an empty
/// rationale without a model call. The replay key of every request made is
/// appended to `replay_keys` when given.
DesignRationale extract_dr(const ingest::IssueRecord &issue, gateway::Gateway &gw,
                           const prompts::Library &lib,
                           const std::string &model_id = gateway::kDefaultModel,
                           std::vector<std::string> *replay_keys = nullptr);

/// "Solution k: ..." lines, each followed by its indented
/// "Argument (supports|opposes): ..." lines. Empty for an empty rationale.
std::string render_dr_section(const DesignRationale &dr);

nlohmann::json to_json(const DesignRationale &dr);
DesignRationale dr_from_json(const nlohmann::json &j);

} // namespace repairkit::dr
