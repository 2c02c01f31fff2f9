#include "repairkit/gateway.hpp"

#include "repairkit/text.hpp"

#include <condition_variable>
#include <cstdlib>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

namespace repairkit::gateway {

using nlohmann::json;

std::string_view to_string(Role role) {
  switch (role) {
  case Role::System:
    return "system";
  case Role::User:
    return "user";
  case Role::Assistant:
    return "assistant";
  }
  return "user";
}

Role role_from_string(std::string_view s) {
  if (s == "system") {
    return Role::System;
  }
  if (s == "user") {
    return Role::User;
  }
  if (s == "assistant") {
    return Role::Assistant;
  }
  throw std::invalid_argument(fmt::format("unknown chat role '{}'", s));
}

void PromptRequest::validate() const {
  if (messages.empty()) {
    throw std::invalid_argument("prompt request has no messages");
  }
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (messages[i].content.empty()) {
      throw std::invalid_argument(fmt::format("message {} has empty content", i));
    }
    if (messages[i].role == Role::System && i != 0) {
      throw std::invalid_argument("a system message may only appear first");
    }
  }
  if (!(temperature >= 0.0)) {
    throw std::invalid_argument("temperature must be >= 0");
  }
  if (max_tokens <= 0) {
    throw std::invalid_argument("max_tokens must be positive");
  }
  if (model_id.empty()) {
    throw std::invalid_argument("model_id is empty");
  }
}

void GatewayConfig::validate() const {
  if (cache_dir.empty()) {
    throw ConfigError("gateway cache_dir is not set");
  }
  if (provider_kind == ProviderKind::Replay && !std::filesystem::is_directory(cache_dir)) {
    throw ConfigError("replay mode requires an existing cache directory: " + cache_dir.string());
  }
  if (provider_kind == ProviderKind::Http && endpoint.empty()) {
    throw ConfigError("http mode requires an endpoint");
  }
  if (max_retries < 0 || max_concurrency < 1) {
    throw ConfigError("max_retries must be >= 0 and max_concurrency >= 1");
  }
}

ReplayMiss::ReplayMiss(const std::string &k)
    : GatewayError("replay cache has no entry for " + k), key(k) {}

ProviderError::ProviderError(int s, std::string b)
    : GatewayError(fmt::format("provider returned HTTP {}: {}", s, b.substr(0, 500))), status(s),
      body(std::move(b)) {}

namespace {

std::string render_temperature(double t) { return fmt::format("{:.6f}", t); }

json request_json(const PromptRequest &req) {
  json messages = json::array();
  for (const auto &m : req.messages) {
    messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  return {{"model_id", req.model_id},
          {"temperature", render_temperature(req.temperature)},
          {"max_tokens", req.max_tokens},
          {"messages", messages},
          {"request_tag", req.request_tag}};
}

} // namespace

std::string canonical_form(const PromptRequest &req) {
  json messages = json::array();
  for (const auto &m : req.messages) {
    messages.push_back(json::array({to_string(m.role), m.content}));
  }
  json canon = json::array(
      {req.model_id, render_temperature(req.temperature), req.max_tokens, messages});
  return canon.dump();
}

std::string replay_key(const PromptRequest &req) { return sha256_hex(canonical_form(req)); }

std::filesystem::path ResponseCache::path_for(const std::string &key) const {
  return dir_ / (key + ".json");
}

std::optional<std::string> ResponseCache::load(const std::string &key) const {
  auto path = path_for(key);
  if (!std::filesystem::exists(path)) {
    return std::nullopt;
  }
  json entry = json::parse(read_file(path));
  return entry.at("response").get<std::string>();
}

void ResponseCache::store(const std::string &key, const PromptRequest &req,
                          const std::string &response) const {
  std::filesystem::create_directories(dir_);
  json entry = {{"key", key}, {"request", request_json(req)}, {"response", response}};
  write_file_atomic(path_for(key), entry.dump(2) + "\n");
}

struct Gateway::Throttle {
  explicit Throttle(int n) : free(n) {}
  void acquire() {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return free > 0; });
    --free;
  }
  void release() {
    {
      std::lock_guard lock(mu);
      ++free;
    }
    cv.notify_one();
  }
  std::mutex mu;
  std::condition_variable cv;
  int free;
};

Gateway::Gateway(GatewayConfig cfg, std::unique_ptr<Transport> transport)
    : cfg_(std::move(cfg)), cache_(cfg_.cache_dir), transport_(std::move(transport)) {
  cfg_.validate();
  throttle_ = std::make_unique<Throttle>(cfg_.max_concurrency);
  if (cfg_.provider_kind == ProviderKind::Http) {
    const char *key = std::getenv(cfg_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw ConfigError("environment variable " + cfg_.api_key_env + " is not set");
    }
    api_key_ = key;
    if (!transport_) {
      transport_ = make_http_transport();
    }
  }
}

Gateway::~Gateway() = default;

std::string Gateway::complete(const PromptRequest &req) {
  req.validate();
  const std::string key = replay_key(req);
  if (auto hit = cache_.load(key)) {
    return *hit;
  }
  if (cfg_.provider_kind == ProviderKind::Replay) {
    throw ReplayMiss(key);
  }

  std::shared_ptr<std::mutex> key_mu;
  {
    std::lock_guard lock(inflight_mu_);
    auto &slot = inflight_[key];
    if (!slot) {
      slot = std::make_shared<std::mutex>();
    }
    key_mu = slot;
  }
  std::lock_guard key_lock(*key_mu);
  if (auto hit = cache_.load(key)) {
    return *hit;
  }
  std::string text = fetch(req);
  cache_.store(key, req, text);
  return text;
}

std::string Gateway::fetch(const PromptRequest &req) {
  json messages = json::array();
  for (const auto &m : req.messages) {
    messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  json body = {{"model", req.model_id},
               {"messages", messages},
               {"temperature", req.temperature},
               {"max_tokens", req.max_tokens}};
  HttpRequest http{cfg_.endpoint,
                   {{"Authorization", "Bearer " + api_key_}, {"Content-Type", "application/json"}},
                   body.dump(),
                   cfg_.timeout};

  std::string last_error;
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(250) * (1 << (attempt - 1)));
    }
    HttpResponse resp;
    throttle_->acquire();
    try {
      ++network_calls_;
      resp = transport_->post(http);
    } catch (const TransportError &e) {
      throttle_->release();
      last_error = e.what();
      spdlog::warn("gateway: {} (attempt {}/{})", e.what(), attempt + 1, cfg_.max_retries + 1);
      continue;
    }
    throttle_->release();
    if (resp.status == 429 || resp.status >= 500) {
      if (attempt == cfg_.max_retries) {
        throw ProviderError(resp.status, resp.body);
      }
      spdlog::warn("gateway: HTTP {} (attempt {}/{})", resp.status, attempt + 1,
                   cfg_.max_retries + 1);
      continue;
    }
    if (resp.status < 200 || resp.status >= 300) {
      throw ProviderError(resp.status, resp.body);
    }
    try {
      json parsed = json::parse(resp.body);
      return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception &e) {
      throw ProviderError(resp.status, "unexpected response shape: " + std::string(e.what()));
    }
  }
  throw TransportError(last_error.empty() ? "request failed" : last_error);
}

} // namespace repairkit::gateway
