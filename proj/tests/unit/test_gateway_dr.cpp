#include "repairkit/benchmark.hpp"
#include "repairkit/design_rationale.hpp"
#include "repairkit/gateway.hpp"
#include "repairkit/prompts.hpp"
#include "repairkit/text.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <thread>

using namespace repairkit;
using namespace repairkit::gateway;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kMini = fs::path(REPAIRKIT_FIXTURE_DIR) / "mini";

struct ScriptedResponses : Transport {
  std::deque<HttpResponse> queue;
  std::atomic<int> calls{0};
  std::string last_body;
  HttpResponse post(const HttpRequest &req) override {
    ++calls;
    last_body = req.body;
    if (queue.empty()) {
      throw TransportError("connection refused");
    }
    auto r = queue.front();
    queue.pop_front();
    return r;
  }
};

HttpResponse ok(const std::string &content) {
  return {200, json{{"choices", {{{"message", {{"content", content}}}}}}}.dump()};
}

PromptRequest simple_request(const std::string &text) {
  PromptRequest r;
  r.messages = {{Role::System, "sys"}, {Role::User, text}};
  return r;
}

class TempDir {
public:
  TempDir() : path_(fs::temp_directory_path() / ("repairkit-gw-" + std::to_string(counter_++))) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path &path() const { return path_; }

private:
  static inline int counter_ = 0;
  fs::path path_;
};

GatewayConfig http_config(const fs::path &cache) {
  setenv("REPAIRKIT_TEST_KEY", "k", 1);
  GatewayConfig c;
  c.provider_kind = ProviderKind::Http;
  c.endpoint = "http://model.invalid/v1/chat/completions";
  c.api_key_env = "REPAIRKIT_TEST_KEY";
  c.cache_dir = cache;
  c.max_retries = 1;
  return c;
}

} // namespace

TEST(PromptRequest, Validation) {
  EXPECT_NO_THROW(simple_request("x").validate());
  PromptRequest empty;
  EXPECT_THROW(empty.validate(), std::invalid_argument);
  auto late_system = simple_request("x");
  late_system.messages.push_back({Role::System, "again"});
  EXPECT_THROW(late_system.validate(), std::invalid_argument);
  auto cold = simple_request("x");
  cold.temperature = -0.5;
  EXPECT_THROW(cold.validate(), std::invalid_argument);
  auto no_tokens = simple_request("x");
  no_tokens.max_tokens = 0;
  EXPECT_THROW(no_tokens.validate(), std::invalid_argument);
}

TEST(ReplayKey, IgnoresTagButNotContent) {
  auto a = simple_request("hello");
  auto b = a;
  b.request_tag = "other";
  EXPECT_EQ(replay_key(a), replay_key(b));
  EXPECT_EQ(replay_key(a).size(), 64u);
  auto c = simple_request("hello!");
  EXPECT_NE(replay_key(a), replay_key(c));
  auto d = a;
  d.model_id = "another-model";
  EXPECT_NE(replay_key(a), replay_key(d));
  EXPECT_EQ(replay_key(a), sha256_hex(canonical_form(a)));
}

TEST(Gateway, ReplayMissNamesTheKey) {
  TempDir dir;
  GatewayConfig c;
  c.cache_dir = dir.path();
  Gateway gw(c);
  auto req = simple_request("nothing cached");
  try {
    gw.complete(req);
    FAIL() << "expected ReplayMiss";
  } catch (const ReplayMiss &e) {
    EXPECT_EQ(e.key, replay_key(req));
  }
}

TEST(Gateway, HttpRequiresKey) {
  TempDir dir;
  auto c = http_config(dir.path());
  c.api_key_env = "REPAIRKIT_SURELY_UNSET_VARIABLE";
  EXPECT_THROW(Gateway(c, std::make_unique<ScriptedResponses>()), ConfigError);
}

TEST(Gateway, CachesAndReplays) {
  TempDir dir;
  auto t = std::make_unique<ScriptedResponses>();
  t->queue.push_back(ok("answer"));
  auto *probe = t.get();
  Gateway gw(http_config(dir.path()), std::move(t));
  auto req = simple_request("q");
  EXPECT_EQ(gw.complete(req), "answer");
  EXPECT_EQ(gw.complete(req), "answer");
  EXPECT_EQ(probe->calls, 1);
  EXPECT_EQ(gw.network_calls(), 1u);

  json sent = json::parse(probe->last_body);
  EXPECT_EQ(sent["model"], kDefaultModel);
  EXPECT_EQ(sent["messages"][1]["content"], "q");
  EXPECT_EQ(sent["messages"][0]["role"], "system");

  GatewayConfig replay;
  replay.cache_dir = dir.path();
  Gateway offline(replay);
  EXPECT_EQ(offline.complete(req), "answer");
  EXPECT_EQ(offline.network_calls(), 0u);
}

TEST(Gateway, RetriesServerErrorsOnly) {
  TempDir dir;
  auto t = std::make_unique<ScriptedResponses>();
  t->queue = {{503, "busy"}, ok("late")};
  auto *probe = t.get();
  Gateway gw(http_config(dir.path()), std::move(t));
  EXPECT_EQ(gw.complete(simple_request("a")), "late");
  EXPECT_EQ(probe->calls, 2);

  probe->queue = {{400, "bad request"}};
  try {
    gw.complete(simple_request("b"));
    FAIL() << "expected ProviderError";
  } catch (const ProviderError &e) {
    EXPECT_EQ(e.status, 400);
  }
  EXPECT_EQ(probe->calls, 3);

  probe->queue.clear();
  EXPECT_THROW(gw.complete(simple_request("c")), TransportError);
  probe->queue = {{200, "{\"unexpected\": true}"}};
  EXPECT_THROW(gw.complete(simple_request("d")), ProviderError);
}

TEST(Gateway, ConcurrentIdenticalRequestsShareOneCall) {
  TempDir dir;
  struct Slow : Transport {
    std::atomic<int> calls{0};
    HttpResponse post(const HttpRequest &) override {
      ++calls;
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
      return ok("shared");
    }
  };
  auto t = std::make_unique<Slow>();
  auto *probe = t.get();
  Gateway gw(http_config(dir.path()), std::move(t));
  std::vector<std::thread> threads;
  std::atomic<int> same{0};
  for (int i = 0; i < 4; ++i) {
    threads.emplace_back([&] { same += gw.complete(simple_request("same")) == "shared"; });
  }
  for (auto &th : threads) th.join();
  EXPECT_EQ(same, 4);
  EXPECT_EQ(probe->calls, 1);
}

TEST(Prompts, RenderPlaceholders) {
  EXPECT_EQ(prompts::render("a {{x}} b {{y}}", {{"x", "1"}, {"y", "2"}}), "a 1 b 2");
  EXPECT_THROW(prompts::render("{{missing}}", {}), prompts::TemplateError);
  EXPECT_THROW(prompts::render("{{open", {{"open", ""}}), prompts::TemplateError);
  prompts::Library lib;
  EXPECT_EQ(lib.render("draft_summary", {{"summary", "S"}}), "[Summary]\nS\n[/Summary]");
  EXPECT_THROW(lib.get("no_such_template"), prompts::TemplateError);
}

TEST(DesignRationale, ParsesLineFormat) {
  auto dr = dr::parse_extraction(
      "Here you go:\nSOLUTION 1 [comment 0]: Add a check\nsolution 2 [Comment 2]: Use a default\n"
      "ARGUMENT 2 [comment 1] (opposes): Hides errors\nARGUMENT 1 [comment 1] (neutral): Simple\n"
      "ARGUMENT 3 [comment 1] (supports): No such solution\nSOLUTION 3 [comment 9]: bad index\n",
      "K-1", 3);
  ASSERT_EQ(dr.solutions.size(), 2u);
  EXPECT_EQ(dr.solutions[1], (dr::Solution{"Use a default", 2}));
  ASSERT_EQ(dr.arguments.size(), 2u);
  EXPECT_EQ(dr.arguments[0].stance, dr::Stance::Opposes);
  EXPECT_EQ(dr.arguments[0].solution_ref, 1u);
  EXPECT_EQ(dr.arguments[1].stance, dr::Stance::Supports);
  EXPECT_EQ(dr::render_dr_section(dr),
            "Solution 1: Add a check\n  Argument (supports): Simple\n"
            "Solution 2: Use a default\n  Argument (opposes): Hides errors");
  EXPECT_EQ(dr::dr_from_json(dr::to_json(dr)), dr);
}

TEST(DesignRationale, NoneAndGarbage) {
  EXPECT_TRUE(dr::parse_extraction("NONE", "K", 2).empty());
  EXPECT_THROW(dr::parse_extraction("I think they should fix it.", "K", 2), dr::ParseError);
  EXPECT_EQ(dr::render_dr_section({}), "");
}

TEST(DesignRationale, ExtractFromReplayCache) {
  auto bench = ingest::load_benchmark(kMini / "benchmark.jsonl").entries;
  GatewayConfig c;
  c.cache_dir = kMini / "cache";
  Gateway gw(c);
  prompts::Library lib;

  std::vector<std::string> keys;
  auto m1 = dr::extract_dr(bench[0].issue, gw, lib, kDefaultModel, &keys);
  EXPECT_EQ(keys.size(), 1u);
  ASSERT_EQ(m1.solutions.size(), 1u);
  EXPECT_EQ(m1.solutions[0].comment_index, 1);
  EXPECT_EQ(m1.issue_key, "MINI-1");

  keys.clear();
  auto m4 = dr::extract_dr(bench[3].issue, gw, lib, kDefaultModel, &keys);
  EXPECT_EQ(keys.size(), 2u); // first answer unreadable, one reformat
  EXPECT_EQ(m4.solutions.size(), 1u);

  keys.clear();
  EXPECT_TRUE(dr::extract_dr(bench[4].issue, gw, lib, kDefaultModel, &keys).empty());
  EXPECT_EQ(keys.size(), 1u);

  keys.clear();
  EXPECT_TRUE(dr::extract_dr(bench[5].issue, gw, lib, kDefaultModel, &keys).empty());
  EXPECT_TRUE(keys.empty());
  EXPECT_EQ(gw.network_calls(), 0u);
}

TEST(DesignRationale, RequestListsNumberedComments) {
  auto bench = ingest::load_benchmark(kMini / "benchmark.jsonl").entries;
  prompts::Library lib;
  auto req = dr::extraction_request(bench[0].issue, lib);
  ASSERT_EQ(req.messages.size(), 2u);
  EXPECT_EQ(req.request_tag, "dr");
  const auto &user = req.messages[1].content;
  EXPECT_EQ(user.rfind("Issue MINI-1:", 0), 0u);
  EXPECT_NE(user.find("[comment 1] bob:\n"), std::string::npos);
  EXPECT_NE(user.find("[comment 2] carol:\n"), std::string::npos);
}
