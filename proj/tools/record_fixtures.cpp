// Rebuilds the replay cache and golden outcomes of tests/fixtures/mini.
//
// The model is played by ScriptedTransport: each answer below is what the
// fixture pretends the model said for one task and stage. Running every
// pipeline variant through an http-mode gateway stores those answers in the
// cache; replaying the same variants through the CLI then writes the golden
// outcome files.

#include "repairkit/cli.hpp"
#include "repairkit/corpus.hpp"
#include "repairkit/gateway.hpp"
#include "repairkit/pipeline.hpp"
#include "repairkit/prompts.hpp"
#include "repairkit/reference.hpp"
#include "repairkit/repo_source.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>

namespace fs = std::filesystem;
using namespace repairkit;
using nlohmann::json;

namespace {

struct Context {
  bool has_dr = false;
  bool has_reference = false;
  bool has_identifiers = false;
};

struct Script {
  std::vector<std::string> dr;
  std::function<std::vector<std::string>(const Context &)> draft;
  std::function<std::vector<std::string>(const Context &)> final;
};

std::string pair(const std::string &snippet, const std::string &patch) {
  return "<buggy_snippet>\n" + snippet + "\n</buggy_snippet>\n<patch>\n" + patch + "\n</patch>";
}

std::map<std::string, Script> scripts() {
  std::map<std::string, Script> s;

  const std::string mini1_with_get =
      pair("        String target = conf.getString(TARGET);\n        return target.trim();",
           "        String target = conf.get(TARGET);\n        if (target == null) {\n"
           "            return DEFAULT_TARGET;\n        }\n        return target.trim();");
  const std::string mini1_fixed =
      pair("        String target = conf.getString(TARGET);\n        return target.trim();",
           "        String target = conf.getString(TARGET);\n        if (target == null) {\n"
           "            return DEFAULT_TARGET;\n        }\n        return target.trim();");
  const std::string mini1_no_dr =
      pair("        return target.trim();", "        return target == null ? \"\" : target.trim();");
  s["MINI-1"] = {
      {"SOLUTION 1 [comment 1]: Add a null check for the TARGET parameter and fall back to the "
       "default target.\n"
       "ARGUMENT 1 [comment 2] (supports): Falling back to local keeps existing jobs working."},
      [=](const Context &c) { return std::vector<std::string>{c.has_dr ? mini1_with_get : mini1_no_dr}; },
      [=](const Context &c) {
        if (!c.has_dr) {
          return std::vector<std::string>{mini1_no_dr};
        }
        return std::vector<std::string>{c.has_identifiers ? mini1_fixed : mini1_with_get};
      }};

  const std::string mini2 = pair("        for (int i = 0; i <= size; i++) {",
                                 "        for (int i = 0; i < size; i++) {");
  s["MINI-2"] = {{"SOLUTION 1 [comment 0]: Stop the loop before size instead of at size."},
                 [=](const Context &) { return std::vector<std::string>{mini2}; },
                 [=](const Context &) { return std::vector<std::string>{mini2}; }};

  const std::string mini3_equals =
      pair("        return owner == other;", "        return owner.equals(other);");
  const std::string mini3_objects =
      pair("        return owner == other;", "        return Objects.equals(owner, other);");
  s["MINI-3"] = {
      {"SOLUTION 1 [comment 0]: Compare the owner strings by value with equals.\n"
       "SOLUTION 2 [comment 1]: Use Objects.equals like sameLabel does.\n"
       "ARGUMENT 1 [comment 1] (opposes): owner.equals(other) throws for a null owner.\n"
       "ARGUMENT 2 [comment 1] (supports): sameLabel already compares with Objects.equals."},
      [=](const Context &) {
        return std::vector<std::string>{
            "The method compares references. It should compare the values instead.", mini3_equals};
      },
      [=](const Context &c) {
        return std::vector<std::string>{c.has_reference ? mini3_objects : mini3_equals};
      }};

  const std::string mini4 =
      pair("        BufferedReader reader = new BufferedReader(source);\n        int lines = 0;\n"
           "        while (reader.readLine() != null) {\n            lines++;\n        }",
           "        int lines = 0;\n        try (BufferedReader reader = new BufferedReader(source)) {\n"
           "            while (reader.readLine() != null) {\n                lines++;\n"
           "            }\n        }");
  s["MINI-4"] = {
      {"The developers agree that the reader has to be closed.",
       "SOLUTION 1 [comment 0]: Wrap the BufferedReader in try-with-resources.\n"
       "ARGUMENT 1 [comment 1] (supports): isEmpty already closes its reader this way."},
      [=](const Context &) { return std::vector<std::string>{mini4}; },
      [=](const Context &) {
        return std::vector<std::string>{
            "The draft patch already closes the reader, so no further change is needed.",
            "No change."};
      }};

  const std::string mini5 =
      pair("        if (attempt > maxRetries) {", "        if (attempt >= maxRetries) {") + "\n" +
      pair("        long delay = backoffMillis * attempt;",
           "        long delay = backoffMillis * (1L << attempt);");
  s["MINI-5"] = {{"NONE"},
                 [=](const Context &) { return std::vector<std::string>{mini5}; },
                 [=](const Context &) { return std::vector<std::string>{mini5}; }};

  const std::string mini6 =
      pair("        return base + child;", "        return base + \"/\" + child;");
  s["MINI-6"] = {{},
                 [=](const Context &) { return std::vector<std::string>{mini6}; },
                 [=](const Context &) { return std::vector<std::string>{mini6}; }};
  return s;
}

class ScriptedTransport : public gateway::Transport {
public:
  ScriptedTransport(const prompts::Library &lib, const std::vector<ingest::BenchmarkEntry> &entries)
      : lib_(lib), scripts_(scripts()) {
    for (const auto &e : entries) {
      by_summary_["[Summary]\n" + e.issue.summary + "\n[/Summary]"] = e.issue.key;
    }
  }

  gateway::HttpResponse post(const gateway::HttpRequest &request) override {
    json body = json::parse(request.body);
    std::vector<std::string> msgs;
    for (const auto &m : body.at("messages")) {
      msgs.push_back(m.at("content").get<std::string>());
    }
    std::string answer = respond(msgs);
    if (answer.empty()) {
      return {400, "unscripted request: " + msgs.back().substr(0, 200)};
    }
    json out = {{"choices", {{{"message", {{"role", "assistant"}, {"content", answer}}}}}}};
    return {200, out.dump()};
  }

private:
  std::string respond(const std::vector<std::string> &msgs) {
    const std::string &reformat = lib_.get("patch_reformat");
    for (const auto &[key, script] : scripts_) {
      if (msgs.size() >= 2 && msgs[1].rfind("Issue " + key + ":", 0) == 0) {
        std::size_t turn = (msgs.size() - 2) / 2;
        return turn < script.dr.size() ? script.dr[turn] : "";
      }
    }
    std::string key;
    for (const auto &[summary, k] : by_summary_) {
      if (msgs[0].find(summary) != std::string::npos) {
        key = k;
      }
    }
    if (key.empty()) {
      return "";
    }
    const Script &script = scripts_.at(key);
    Context ctx;
    ctx.has_dr = msgs[0].find("[Design Rationale]") != std::string::npos;

    // Locate the newest stage opener: the draft prompt or the final turn.
    std::size_t final_at = msgs.size();
    for (std::size_t i = 0; i < msgs.size(); ++i) {
      if (msgs[i].rfind(lib_.get("final_role"), 0) == 0) {
        final_at = i;
      }
    }
    std::size_t opener = final_at == msgs.size() ? 0 : final_at;
    std::size_t retries = 0;
    for (std::size_t i = opener + 1; i < msgs.size(); ++i) {
      retries += msgs[i] == reformat ? 1 : 0;
    }
    std::vector<std::string> answers;
    if (final_at == msgs.size()) {
      answers = script.draft(ctx);
    } else {
      ctx.has_reference = msgs[final_at].find("[Reference Patch") != std::string::npos;
      ctx.has_identifiers = msgs[final_at].find("[Identifier Suggestions]") != std::string::npos;
      answers = script.final(ctx);
    }
    return retries < answers.size() ? answers[retries] : answers.back();
  }

  const prompts::Library &lib_;
  std::map<std::string, Script> scripts_;
  std::map<std::string, std::string> by_summary_;
};

struct Variant {
  std::string file;
  std::vector<std::string> flags;
  pipeline::PipelineConfig config;
};

} // namespace

int main(int argc, char **argv) {
  fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path(REPAIRKIT_SOURCE_DIR) / "tests/fixtures/mini";
  fs::path cache = root / "cache";
  fs::path golden = root / "golden";
  fs::remove_all(cache);
  fs::create_directories(cache);
  fs::create_directories(golden);

  prompts::Library lib;
  auto bench = ingest::load_benchmark(root / "benchmark.jsonl");
  DirectorySource repo(root / "repo");
  refpatch::RetrievalProvider retrieval(corpus::load_corpus(root / "corpus.jsonl"));

  setenv("REPAIRKIT_RECORDER_KEY", "scripted", 1);
  gateway::GatewayConfig gcfg;
  gcfg.provider_kind = gateway::ProviderKind::Http;
  gcfg.endpoint = "http://scripted.invalid/v1/chat/completions";
  gcfg.api_key_env = "REPAIRKIT_RECORDER_KEY";
  gcfg.cache_dir = cache;
  gcfg.max_retries = 0;
  gateway::Gateway gw(gcfg, std::make_unique<ScriptedTransport>(lib, bench.entries));
  pipeline::Pipeline pipe({&gw, &lib, &retrieval, &repo});

  std::vector<Variant> variants = {
      {"full.jsonl", {}, {true, true, true}},
      {"minus-dr.jsonl", {"--no-dr"}, {false, true, true}},
      {"minus-pf.jsonl", {"--no-reference"}, {true, false, true}},
      {"minus-id.jsonl", {"--no-identifiers"}, {true, true, false}},
  };
  int failures = 0;
  for (const auto &v : variants) {
    std::vector<pipeline::RepairTask> tasks;
    for (const auto &e : bench.entries) {
      tasks.push_back(pipeline::make_task(e, v.config));
    }
    for (const auto &o : pipe.run_all(tasks)) {
      if (o.error) {
        std::cerr << v.file << " " << o.task_id << ": " << *o.error << "\n";
        ++failures;
      }
    }
  }
  if (failures) {
    return 1;
  }

  for (const auto &v : variants) {
    std::vector<std::string> args = {"repair",
                                     "--benchmark", (root / "benchmark.jsonl").string(),
                                     "--cache-dir", cache.string(),
                                     "--provider", "replay",
                                     "--repo", (root / "repo").string(),
                                     "--corpus", (root / "corpus.jsonl").string(),
                                     "--out", (golden / v.file).string()};
    args.insert(args.end(), v.flags.begin(), v.flags.end());
    if (int rc = cli::run(args); rc != 0) {
      std::cerr << "replay of " << v.file << " failed with status " << rc << "\n";
      return 1;
    }
  }
  std::cout << fmt::format("{} cache entries, {} network calls\n",
                           std::distance(fs::directory_iterator(cache), fs::directory_iterator()),
                           gw.network_calls());
  return 0;
}
