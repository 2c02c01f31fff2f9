#pragma once

#include "repairkit/code_analysis.hpp"
#include "repairkit/corpus.hpp"
#include "repairkit/gateway.hpp"

#include <chrono>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace repairkit::refpatch {

struct MaskedQuery {
  std::string function_text_masked;
  analysis::LineSpan defective_span;
  std::string task_id;
};

enum class ProviderId { RemoteModel, Retrieval };

std::string_view to_string(ProviderId id);

struct ReferencePatch {
  std::string text;
  ProviderId provider_id = ProviderId::Retrieval;
  double score = 0;
};

class SpanOutOfRange : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class EmptyCorpus : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ProviderUnavailable : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Replaces lines span.start..span.end (1-based, inclusive) of the function
/// with one bare sentinel line.
MaskedQuery mask_defective_span(const std::string &function_text, analysis::LineSpan span,
                                std::string task_id = {});

class Provider {
public:
  virtual ~Provider() = default;
  /// nullopt when the provider declines. May throw.
  virtual std::optional<ReferencePatch> infill(const MaskedQuery &query) = 0;
};

/// Target text of the corpus record whose masked text is most similar to
/// the query by token 4-gram BLEU; ties go to the smallest method_id.
/// Throws EmptyCorpus.
ReferencePatch retrieval_infill(const MaskedQuery &query,
                                const std::vector<corpus::CorpusRecord> &records);

class RetrievalProvider : public Provider {
public:
  explicit RetrievalProvider(std::vector<corpus::CorpusRecord> records);
  std::optional<ReferencePatch> infill(const MaskedQuery &query) override;

private:
  std::vector<corpus::CorpusRecord> records_;
  std::vector<std::vector<std::string>> tokens_;
};

/// Speaks POST <endpoint> {"masked_text"} -> {"fill_text"[, "score"]} to the
/// fine-tuned infill service. An empty fill is a decline.
class RemoteInfillProvider : public Provider {
public:
  explicit RemoteInfillProvider(std::string infill_url,
                                std::unique_ptr<gateway::Transport> transport = nullptr,
                                std::chrono::milliseconds timeout = std::chrono::seconds(10),
                                int retries = 1);
  std::optional<ReferencePatch> infill(const MaskedQuery &query) override;

private:
  std::string url_;
  std::unique_ptr<gateway::Transport> transport_;
  std::chrono::milliseconds timeout_;
  int retries_;
};

/// Never throws: provider failures are logged and give nullopt.
std::optional<ReferencePatch> generate_reference(const MaskedQuery &query, Provider &provider);

} // namespace repairkit::refpatch
