#include <httplib.h>

#include "repairkit/gateway.hpp"

#include <fmt/format.h>

#include <regex>

namespace repairkit::gateway {

namespace {

struct Url {
  std::string scheme_host_port;
  std::string path;
};

Url split_url(const std::string &url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) {
    throw ConfigError("malformed endpoint URL: " + url);
  }
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

class HttplibTransport : public Transport {
public:
  HttpResponse post(const HttpRequest &request) override {
    Url url = split_url(request.url);
    httplib::Client client(url.scheme_host_port);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(request.timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(request.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    std::string content_type = "application/json";
    for (const auto &[k, v] : request.headers) {
      if (k == "Content-Type") {
        content_type = v;
      } else {
        headers.emplace(k, v);
      }
    }
    auto res = client.Post(url.path, headers, request.body, content_type);
    if (!res) {
      throw TransportError(
          fmt::format("POST {} failed: {}", request.url, httplib::to_string(res.error())));
    }
    return {res->status, res->body};
  }
};

} // namespace

std::unique_ptr<Transport> make_http_transport() { return std::make_unique<HttplibTransport>(); }

} // namespace repairkit::gateway
