#include "celerlog/http_backend.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cstdlib>

namespace celerlog {

namespace {

using json = nlohmann::json;

// Splits "scheme://host[:port]/path" into origin and path.
std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint must be an http(s) URL: " + url);
  std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https")
    throw ConfigError("unsupported endpoint scheme: " + scheme);
  auto path_start = url.find('/', scheme_end + 3);
  std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (origin.size() <= scheme_end + 3) throw ConfigError("endpoint has no host: " + url);
  return {origin, path};
}

}  // namespace

std::string api_key_from_env() {
  const char* key = std::getenv(kApiKeyEnv);
  return key ? std::string(key) : std::string();
}

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
  if (options_.endpoint.empty()) throw ConfigError("http backend needs --endpoint");
  if (options_.model.empty()) throw ConfigError("http backend needs --model");
  if (options_.api_key.empty())
    throw ConfigError(std::string("http backend needs a credential in ") + kApiKeyEnv);
  std::tie(origin_, path_) = split_url(options_.endpoint);
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::request_body(const PromptEnvelope& envelope) const {
  json body = {
      {"model", options_.model},
      {"temperature", 0},
      {"messages",
       json::array({{{"role", "system"}, {"content", envelope.instructions()}},
                    {{"role", "user"}, {"content", envelope.payload}}})},
  };
  return body.dump();
}

InferenceReply HttpBackend::infer(const PromptEnvelope& envelope) {
  // One client per call keeps concurrent requests independent.
  httplib::Client client(origin_);
  const auto secs = static_cast<time_t>(options_.timeout.count());
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);
  httplib::Headers headers = {{"Authorization", "Bearer " + options_.api_key}};

  auto res = client.Post(path_, headers, request_body(envelope), "application/json");
  if (!res) throw TransportError("request failed: " + httplib::to_string(res.error()));
  if (res->status == 429 || res->status >= 500)
    throw TransportError("server returned status " + std::to_string(res->status));
  if (res->status == 401 || res->status == 403 || res->status == 404)
    throw ConfigError("endpoint rejected the request with status " + std::to_string(res->status));
  if (res->status != 200)
    throw TransportError("unexpected status " + std::to_string(res->status));

  json doc = json::parse(res->body, nullptr, false);
  if (doc.is_discarded()) throw TransportError("response body is not JSON");

  InferenceReply reply;
  try {
    reply.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    reply.text.clear();
  }
  if (doc.contains("usage") && doc["usage"].is_object()) {
    reply.prompt_tokens = doc["usage"].value("prompt_tokens", std::uint64_t{0});
    reply.completion_tokens = doc["usage"].value("completion_tokens", std::uint64_t{0});
  }
  return reply;
}

}  // namespace celerlog
