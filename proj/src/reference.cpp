#include "repairkit/reference.hpp"

#include "repairkit/codebleu.hpp"
#include "repairkit/java_lexer.hpp"
#include "repairkit/text.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>

namespace repairkit::refpatch {

using nlohmann::json;

std::string_view to_string(ProviderId id) {
  return id == ProviderId::RemoteModel ? "remote_model" : "retrieval";
}

MaskedQuery mask_defective_span(const std::string &function_text, analysis::LineSpan span,
                                std::string task_id) {
  auto lines = split_lines(function_text);
  if (span.start < 1 || span.end < span.start || span.end > static_cast<int>(lines.size())) {
    throw SpanOutOfRange(fmt::format("span ({},{}) outside a {}-line function", span.start,
                                     span.end, lines.size()));
  }
  std::vector<std::string> out(lines.begin(), lines.begin() + (span.start - 1));
  out.emplace_back(analysis::kMaskSentinel);
  out.insert(out.end(), lines.begin() + span.end, lines.end());
  return {join_lines(out), span, std::move(task_id)};
}

namespace {

ReferencePatch best_match(const std::vector<std::string> &query,
                          const std::vector<corpus::CorpusRecord> &records,
                          const std::vector<std::vector<std::string>> &tokens) {
  if (records.empty()) {
    throw EmptyCorpus("retrieval corpus is empty");
  }
  std::size_t best = 0;
  double best_score = -1;
  for (std::size_t i = 0; i < records.size(); ++i) {
    double s = codebleu::ngram_bleu(query, tokens[i]);
    if (s > best_score || (s == best_score && records[i].method_id < records[best].method_id)) {
      best = i;
      best_score = s;
    }
  }
  return {records[best].target_text, ProviderId::Retrieval, best_score};
}

} // namespace

ReferencePatch retrieval_infill(const MaskedQuery &query,
                                const std::vector<corpus::CorpusRecord> &records) {
  std::vector<std::vector<std::string>> tokens;
  tokens.reserve(records.size());
  for (const auto &r : records) {
    tokens.push_back(analysis::token_texts(r.masked_text));
  }
  return best_match(analysis::token_texts(query.function_text_masked), records, tokens);
}

RetrievalProvider::RetrievalProvider(std::vector<corpus::CorpusRecord> records)
    : records_(std::move(records)) {
  tokens_.reserve(records_.size());
  for (const auto &r : records_) {
    tokens_.push_back(analysis::token_texts(r.masked_text));
  }
}

std::optional<ReferencePatch> RetrievalProvider::infill(const MaskedQuery &query) {
  return best_match(analysis::token_texts(query.function_text_masked), records_, tokens_);
}

RemoteInfillProvider::RemoteInfillProvider(std::string infill_url,
                                           std::unique_ptr<gateway::Transport> transport,
                                           std::chrono::milliseconds timeout, int retries)
    : url_(std::move(infill_url)),
      transport_(transport ? std::move(transport) : gateway::make_http_transport()),
      timeout_(timeout), retries_(retries) {}

std::optional<ReferencePatch> RemoteInfillProvider::infill(const MaskedQuery &query) {
  gateway::HttpRequest req;
  req.url = url_;
  req.headers["Content-Type"] = "application/json";
  req.body = json{{"masked_text", query.function_text_masked}}.dump();
  req.timeout = timeout_;
  gateway::HttpResponse resp;
  for (int attempt = 0;; ++attempt) {
    try {
      resp = transport_->post(req);
      if (resp.status < 500) {
        break;
      }
    } catch (const gateway::TransportError &e) {
      if (attempt >= retries_) {
        throw ProviderUnavailable(e.what());
      }
      continue;
    }
    if (attempt >= retries_) {
      break;
    }
  }
  if (resp.status < 200 || resp.status >= 300) {
    throw ProviderUnavailable(fmt::format("infill service answered {}: {}", resp.status, resp.body));
  }
  json body;
  try {
    body = json::parse(resp.body);
  } catch (const json::parse_error &e) {
    throw ProviderUnavailable(std::string("infill response is not JSON: ") + e.what());
  }
  std::string fill = body.value("fill_text", "");
  if (is_blank(fill)) {
    return std::nullopt;
  }
  double score = 1.0;
  if (body.contains("score") && body["score"].is_number()) {
    score = std::clamp(body["score"].get<double>(), 0.0, 1.0);
  }
  return ReferencePatch{fill, ProviderId::RemoteModel, score};
}

std::optional<ReferencePatch> generate_reference(const MaskedQuery &query, Provider &provider) {
  try {
    auto ref = provider.infill(query);
    if (ref && is_blank(ref->text)) {
      return std::nullopt;
    }
    return ref;
  } catch (const std::exception &e) {
    spdlog::warn("{}: no reference patch: {}", query.task_id, e.what());
    return std::nullopt;
  }
}

} // namespace repairkit::refpatch
