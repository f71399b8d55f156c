#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "celerlog/llm_processor.hpp"

namespace celerlog {

inline constexpr const char* kApiKeyEnv = "CELERLOG_API_KEY";

struct HttpBackendOptions {
  // Full chat-completions URL, e.g. https://api.openai.com/v1/chat/completions
  std::string endpoint;
  std::string model;
  std::string api_key;
  std::chrono::seconds timeout{60};
};

// Chat-completions client. Sends the fixed instructions as the system message
// and the payload as the user message, always at temperature 0.
class HttpBackend : public InferenceBackend {
 public:
  // Throws ConfigError for a malformed endpoint or a missing model or key.
  explicit HttpBackend(HttpBackendOptions options);
  ~HttpBackend() override;

  InferenceReply infer(const PromptEnvelope& envelope) override;
  std::string name() const override { return "http"; }

  // The JSON request body for an envelope.
  std::string request_body(const PromptEnvelope& envelope) const;

 private:
  HttpBackendOptions options_;
  std::string origin_;
  std::string path_;
};

// Reads the credential from CELERLOG_API_KEY; empty when unset.
std::string api_key_from_env();

}  // namespace celerlog
