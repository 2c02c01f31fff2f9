#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace repairkit::gateway {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);
Role role_from_string(std::string_view s);

struct ChatMessage {
  Role role = Role::User;
  std::string content;
};

inline constexpr const char *kDefaultModel = "gpt-4-1106-preview";

struct PromptRequest {
  std::vector<ChatMessage> messages;
  std::string model_id = kDefaultModel;
  double temperature = 0.0;
  int max_tokens = 2048;
  /// Pipeline stage label. Metadata only; not part of the replay key.
  std::string request_tag;

  /// Throws std::invalid_argument when a message is empty, the list is
  /// empty, a system message appears anywhere but first, or the sampling
  /// fields are out of range.
  void validate() const;
};

enum class ProviderKind { Http, Replay };

struct GatewayConfig {
  ProviderKind provider_kind = ProviderKind::Replay;
  std::string endpoint;
  std::string api_key_env = "OPENAI_API_KEY";
  std::chrono::milliseconds timeout{120000};
  int max_retries = 2;
  std::filesystem::path cache_dir;
  int max_concurrency = 4;

  /// Throws ConfigError.
  void validate() const;
};

class GatewayError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ConfigError : public GatewayError {
  using GatewayError::GatewayError;
};

/// Network failure or timeout after all retries.
class TransportError : public GatewayError {
  using GatewayError::GatewayError;
};

/// Replay mode found no cached response. Signals a fixture gap.
class ReplayMiss : public GatewayError {
public:
  explicit ReplayMiss(const std::string &key);
  std::string key;
};

/// Non-2xx response from the provider.
class ProviderError : public GatewayError {
public:
  ProviderError(int status, std::string body);
  int status;
  std::string body;
};

struct HttpRequest {
  std::string url;
  std::map<std::string, std::string> headers;
  std::string body;
  std::chrono::milliseconds timeout{120000};
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Blocking HTTP POST. Implementations throw TransportError when no
/// response was received.
class Transport {
public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const HttpRequest &request) = 0;
};

std::unique_ptr<Transport> make_http_transport();

/// Canonical serialization hashed by replay_key: messages in order,
/// model id, temperature at fixed precision, max_tokens.
std::string canonical_form(const PromptRequest &req);

/// 64 hex chars, SHA-256 of canonical_form.
std::string replay_key(const PromptRequest &req);

/// One JSON file per digest holding the request and the response text.
class ResponseCache {
public:
  explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::optional<std::string> load(const std::string &key) const;
  void store(const std::string &key, const PromptRequest &req, const std::string &response) const;
  std::filesystem::path path_for(const std::string &key) const;
  const std::filesystem::path &dir() const { return dir_; }

private:
  std::filesystem::path dir_;
};

/// Chat completion with content-addressed caching.
///
/// Replay mode never touches the transport. Http mode serves warm cache
/// hits without network access, and concurrent identical requests share a
/// single network call.
class Gateway {
public:
  /// Throws ConfigError for an invalid config or, in http mode, when the
  /// API key variable is unset.
  explicit Gateway(GatewayConfig cfg, std::unique_ptr<Transport> transport = nullptr);
  ~Gateway();

  std::string complete(const PromptRequest &req);

  const GatewayConfig &config() const { return cfg_; }
  std::size_t network_calls() const { return network_calls_.load(); }

private:
  std::string fetch(const PromptRequest &req);

  GatewayConfig cfg_;
  ResponseCache cache_;
  std::unique_ptr<Transport> transport_;
  std::string api_key_;
  std::atomic<std::size_t> network_calls_{0};

  struct Throttle;
  std::unique_ptr<Throttle> throttle_;
  std::mutex inflight_mu_;
  std::map<std::string, std::shared_ptr<std::mutex>> inflight_;
};

} // namespace repairkit::gateway
