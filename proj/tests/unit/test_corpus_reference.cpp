#include "repairkit/corpus.hpp"
#include "repairkit/java_lexer.hpp"
#include "repairkit/reference.hpp"
#include "repairkit/text.hpp"

#include <httplib.h>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <thread>

using namespace repairkit;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kMini = fs::path(REPAIRKIT_FIXTURE_DIR) / "mini";

analysis::MethodUnit method_with(std::size_t n) {
  analysis::MethodUnit m;
  m.file_path = "A.java";
  m.name = "f";
  m.header_line = 3;
  m.header_lines = {"  void f() {"};
  for (std::size_t i = 0; i < n; ++i) m.body_lines.push_back("    x" + std::to_string(i) + "();");
  m.footer = "  }";
  return m;
}

std::size_t sentinels(const std::string &s) {
  std::size_t n = 0;
  for (auto p = s.find(analysis::kMaskSentinel); p != std::string::npos;
       p = s.find(analysis::kMaskSentinel, p + 1))
    ++n;
  return n;
}

// Stand-in for the fine-tuned infill service.
class InfillStub {
public:
  InfillStub() {
    server_.Get("/health", [](const httplib::Request &, httplib::Response &res) {
      res.set_content(R"({"status":"ok"})", "application/json");
    });
    server_.Post("/infill", [this](const httplib::Request &req, httplib::Response &res) {
      ++requests;
      if (fail_next > 0) {
        --fail_next;
        res.status = 503;
        return;
      }
      json body = json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.contains("masked_text")) {
        res.status = 400;
        return;
      }
      std::string masked = body["masked_text"];
      if (sentinels(masked) != 1) {
        res.status = 400;
        res.set_content(R"({"error":"expected exactly one sentinel"})", "application/json");
        return;
      }
      res.set_content(json{{"fill_text", fill}, {"score", 0.75}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~InfillStub() {
    server_.stop();
    thread_.join();
  }
  int port() const { return port_; }
  std::string url(const std::string &path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

  std::string fill = "        return a + b;";
  int fail_next = 0;
  std::atomic<int> requests{0};

private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

} // namespace

TEST(Rng, BelowStaysInRangeAndIsSeeded) {
  corpus::Rng a(5), b(5);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 7000; ++i) {
    auto v = a.below(7);
    ASSERT_LT(v, 7u);
    ++hist[v];
    EXPECT_EQ(v, b.below(7));
  }
  for (int h : hist) EXPECT_GT(h, 800);
  EXPECT_NE(corpus::method_seed(42, "A#f:1"), corpus::method_seed(42, "A#f:2"));
}

TEST(Masking, MaskBodyAndFill) {
  auto m = method_with(4);
  std::string masked = corpus::mask_body(m, 1, 2);
  EXPECT_EQ(masked, "  void f() {\n    x0();\n<extra_id_0>\n    x3();\n  }");
  EXPECT_EQ(corpus::fill_mask(masked, "    x1();\n    x2();"), m.stripped_text());
}

TEST(Masking, ShortBodiesRejected) {
  EXPECT_THROW(corpus::build_samples(method_with(2), 1), std::invalid_argument);
  EXPECT_NO_THROW(corpus::build_samples(method_with(3), 1));
}

TEST(Masking, DeterministicPerSeed) {
  auto m = method_with(12);
  auto a = corpus::build_samples(m, 9);
  auto b = corpus::build_samples(m, 9);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].masked_text, b[i].masked_text);
    EXPECT_EQ(a[i].method_id, "A.java#f:3");
  }
}

TEST(Corpus, RebuildsCommittedFixture) {
  DirectorySource repo(kMini / "repo");
  auto out = fs::temp_directory_path() / "repairkit-corpus-test.jsonl";
  auto stats = corpus::build_corpus(repo, "", out, 42);
  EXPECT_EQ(stats.methods_seen, 20u);
  EXPECT_EQ(stats.methods_excluded_short, 9u);
  EXPECT_EQ(stats.samples_emitted, 29u);
  EXPECT_EQ(stats.files_failed, 0u);
  EXPECT_TRUE(stats.coverage_complete);
  EXPECT_EQ(read_file(out), read_file(kMini / "corpus.jsonl"));
  auto records = corpus::load_corpus(out);
  EXPECT_EQ(records.size(), 29u);
  for (const auto &r : records) {
    EXPECT_EQ(r.method_id.find("src/test/"), std::string::npos);
  }
  fs::remove(out);
}

TEST(Corpus, MalformedRecordNamesLine) {
  auto p = fs::temp_directory_path() / "repairkit-bad-corpus.jsonl";
  write_file_atomic(p, "{\"method_id\":\"a\",\"masked_text\":\"x\",\"target_text\":\"y\"}\n[1]\n");
  try {
    corpus::load_corpus(p);
    FAIL();
  } catch (const std::runtime_error &e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
  fs::remove(p);
}

TEST(Reference, MaskDefectiveSpan) {
  std::string fn = "int f() {\n  a();\n  b();\n  return 1;\n}";
  auto q = refpatch::mask_defective_span(fn, {2, 3}, "T-1");
  EXPECT_EQ(q.function_text_masked, "int f() {\n<extra_id_0>\n  return 1;\n}");
  EXPECT_THROW(refpatch::mask_defective_span(fn, {0, 1}), refpatch::SpanOutOfRange);
  EXPECT_THROW(refpatch::mask_defective_span(fn, {3, 2}), refpatch::SpanOutOfRange);
  EXPECT_THROW(refpatch::mask_defective_span(fn, {5, 6}), refpatch::SpanOutOfRange);
}

TEST(Reference, RetrievalPicksMostSimilarAndBreaksTies) {
  std::vector<corpus::CorpusRecord> recs = {
      {"b", "int g() {\n<extra_id_0>\n}", "  return 2;"},
      {"a", "int g() {\n<extra_id_0>\n}", "  return 1;"},
      {"c", "void other(String s) {\n<extra_id_0>\n  s.trim();\n}", "  s = null;"},
  };
  refpatch::MaskedQuery q{"int g() {\n<extra_id_0>\n}", {2, 2}, ""};
  auto r = refpatch::retrieval_infill(q, recs);
  EXPECT_EQ(r.text, "  return 1;");
  EXPECT_EQ(r.provider_id, refpatch::ProviderId::Retrieval);
  EXPECT_DOUBLE_EQ(r.score, 1.0);
  EXPECT_THROW(refpatch::retrieval_infill(q, {}), refpatch::EmptyCorpus);

  refpatch::RetrievalProvider empty({});
  EXPECT_FALSE(refpatch::generate_reference(q, empty).has_value());
}

TEST(RemoteInfill, HealthAndRoundTrip) {
  InfillStub stub;
  httplib::Client client("127.0.0.1", stub.port());
  auto health = client.Get("/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);

  refpatch::RemoteInfillProvider provider(stub.url("/infill"));
  auto q = refpatch::mask_defective_span("int add(int a, int b) {\n  return a - b;\n}", {2, 2});
  auto r = provider.infill(q);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->text, stub.fill);
  EXPECT_EQ(r->provider_id, refpatch::ProviderId::RemoteModel);
  EXPECT_DOUBLE_EQ(r->score, 0.75);
}

TEST(RemoteInfill, DoubleSentinelIsRejected) {
  InfillStub stub;
  refpatch::RemoteInfillProvider provider(stub.url("/infill"));
  refpatch::MaskedQuery q{"f() {\n<extra_id_0>\n<extra_id_0>\n}", {2, 2}, ""};
  EXPECT_THROW(provider.infill(q), refpatch::ProviderUnavailable);
  EXPECT_FALSE(refpatch::generate_reference(q, provider).has_value());
}

TEST(RemoteInfill, RetriesOnceOnServerError) {
  InfillStub stub;
  refpatch::RemoteInfillProvider provider(stub.url("/infill"));
  auto q = refpatch::mask_defective_span("f() {\n  x();\n}", {2, 2});
  stub.fail_next = 1;
  EXPECT_TRUE(provider.infill(q).has_value());
  EXPECT_EQ(stub.requests, 2);
  stub.fail_next = 2;
  EXPECT_THROW(provider.infill(q), refpatch::ProviderUnavailable);
}

TEST(RemoteInfill, EmptyFillDeclinesAndDeadServiceIsUnavailable) {
  refpatch::MaskedQuery q = refpatch::mask_defective_span("f() {\n  x();\n}", {2, 2});
  std::string dead_url;
  {
    InfillStub stub;
    stub.fill = "";
    refpatch::RemoteInfillProvider provider(stub.url("/infill"));
    EXPECT_FALSE(provider.infill(q).has_value());
    dead_url = stub.url("/infill");
  }
  refpatch::RemoteInfillProvider gone(dead_url, nullptr, std::chrono::milliseconds(500), 1);
  EXPECT_THROW(gone.infill(q), refpatch::ProviderUnavailable);
  EXPECT_FALSE(refpatch::generate_reference(q, gone).has_value());
}
