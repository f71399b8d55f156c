#include <doctest.h>

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <thread>

#include "celerlog/http_backend.hpp"

using namespace celerlog;
using json = nlohmann::json;

namespace {

class LocalServer {
 public:
  LocalServer() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      hits.fetch_add(1);
      last_body = req.body;
      last_auth = req.get_header_value("Authorization");
      if (status != 200) {
        res.status = status;
        return;
      }
      json reply = {{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})},
                    {"usage", {{"prompt_tokens", 120}, {"completion_tokens", 8}}}};
      res.set_content(reply.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

  std::atomic<int> hits{0};
  int status = 200;
  std::string content = "<variables>\n[1] /etc/zoo.cfg\n</variables>";
  std::string last_body;
  std::string last_auth;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_CASE("http backend round trip") {
  LocalServer server;
  HttpBackend backend({server.url(), "test-model", "secret", std::chrono::seconds(5)});
  std::vector<std::string> msgs{"Reading configuration from: /etc/zoo.cfg"};
  auto env = build_prompt(msgs);
  auto reply = backend.infer(env);
  CHECK(reply.text == server.content);
  CHECK(reply.prompt_tokens == 120);
  CHECK(reply.completion_tokens == 8);
  CHECK(server.last_auth == "Bearer secret");

  auto body = json::parse(server.last_body);
  CHECK(body["model"] == "test-model");
  CHECK(body["temperature"] == 0);
  REQUIRE(body["messages"].size() == 2);
  CHECK(body["messages"][0]["role"] == "system");
  CHECK(body["messages"][0]["content"] == env.instructions());
  CHECK(body["messages"][1]["content"] == env.payload);
  CHECK(backend.name() == "http");
}

TEST_CASE("http backend status mapping") {
  LocalServer server;
  HttpBackend backend({server.url(), "m", "k", std::chrono::seconds(5)});
  std::vector<std::string> msgs{"x 1"};
  auto env = build_prompt(msgs);
  server.status = 429;
  CHECK_THROWS_AS(backend.infer(env), TransportError);
  server.status = 503;
  CHECK_THROWS_AS(backend.infer(env), TransportError);
  server.status = 401;
  CHECK_THROWS_AS(backend.infer(env), ConfigError);
  server.status = 404;
  CHECK_THROWS_AS(backend.infer(env), ConfigError);
}

TEST_CASE("http backend retries through process_sparse") {
  LocalServer server;
  server.status = 500;
  HttpBackend backend({server.url(), "m", "k", std::chrono::seconds(5)});
  SkeletonGroup g;
  g.key = "only message";
  g.key_tokens = {"only", "message"};
  g.members = {"only message"};
  g.record_ids = {0};
  std::vector<SparseGroup> groups{{g}};
  CostLedger ledger;
  LlmOptions opts;
  opts.initial_backoff = std::chrono::milliseconds(1);
  opts.max_retries = 2;
  auto out = process_sparse(groups, backend, opts, ledger);
  CHECK(server.hits == 3);
  CHECK(ledger.llm_invocations() == 3);
  CHECK(ledger.tokens_consumed() == 0);
  CHECK(out.by_content[0].second.source == TemplateSource::rollback);
}

TEST_CASE("http backend configuration errors") {
  CHECK_THROWS_AS(HttpBackend({"", "m", "k"}), ConfigError);
  CHECK_THROWS_AS(HttpBackend({"http://localhost/x", "", "k"}), ConfigError);
  CHECK_THROWS_AS(HttpBackend({"http://localhost/x", "m", ""}), ConfigError);
  CHECK_THROWS_AS(HttpBackend({"ftp://localhost/x", "m", "k"}), ConfigError);
  CHECK_THROWS_AS(HttpBackend({"localhost/x", "m", "k"}), ConfigError);
}

TEST_CASE("unreachable endpoint is a transport error") {
  HttpBackend backend({"http://127.0.0.1:1/v1/chat/completions", "m", "k", std::chrono::seconds(2)});
  std::vector<std::string> msgs{"x 1"};
  CHECK_THROWS_AS(backend.infer(build_prompt(msgs)), TransportError);
}
