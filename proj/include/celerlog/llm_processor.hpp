#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "celerlog/masker.hpp"
#include "celerlog/model.hpp"

namespace celerlog {

// The backend's answer could not be aligned with the request.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Network failure, timeout or a retryable server status.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Fixed parts of the prompt, read from data/prompt.txt.
struct PromptTemplate {
  std::string task_description;
  std::string constraints;
  std::string examples;

  static const PromptTemplate& defaults();
  // Sections are introduced by [task], [constraints] and [examples] lines.
  static PromptTemplate parse(std::string_view text);
  static PromptTemplate load(const std::string& path);
};

struct PromptEnvelope {
  std::string task_description;
  std::string constraints;
  std::string examples;
  std::string payload;
  std::size_t message_count = 0;

  // Task, constraints and examples; identical for every request in a run.
  std::string instructions() const;
  std::string render() const;
  std::size_t char_count() const;
};

// Numbers the messages from 1. Requires 1 <= messages.size() <= max_batch.
PromptEnvelope build_prompt(std::span<const std::string> messages,
                            const PromptTemplate& prompt = PromptTemplate::defaults(),
                            std::size_t max_batch = SIZE_MAX);

inline constexpr std::string_view kVariableSeparator = " ||| ";

// One variable list per message, or FormatError for the whole batch.
std::vector<std::vector<std::string>> parse_response(std::string_view raw,
                                                     std::size_t message_count);

// Renders the response block parse_response expects.
std::string format_response(const std::vector<std::vector<std::string>>& variables);

// Keeps variables that occur verbatim in content, masks them longest first,
// widens every partially covered token to a whole parameter and
// post-processes. Falls back to the untouched content when nothing survives.
TemplateResult validate_and_mask(std::string_view content, const std::vector<std::string>& variables,
                                 const MaskRuleSet& rules = MaskRuleSet::defaults());

struct InferenceReply {
  std::string text;
  std::uint64_t prompt_tokens = 0;
  std::uint64_t completion_tokens = 0;
};

class InferenceBackend {
 public:
  virtual ~InferenceBackend() = default;
  // One call is one invocation. Throws TransportError on retryable failures
  // and ConfigError when the backend cannot be used at all.
  virtual InferenceReply infer(const PromptEnvelope& envelope) = 0;
  virtual std::string name() const = 0;
};

// Offline backend: every token containing a digit or matching a mask rule is
// reported as a variable. Tokens are counted as characters / 4.
class MockBackend : public InferenceBackend {
 public:
  explicit MockBackend(const MaskRuleSet& rules = MaskRuleSet::defaults()) : rules_(rules) {}

  InferenceReply infer(const PromptEnvelope& envelope) override;
  std::string name() const override { return "mock"; }

  // The variables the mock reports for one message.
  std::vector<std::string> variables_for(std::string_view message) const;
  std::uint64_t calls() const { return calls_.load(); }

 private:
  const MaskRuleSet& rules_;
  std::atomic<std::uint64_t> calls_{0};
};

InferenceReply mock_infer(const PromptEnvelope& envelope);

// Messages recovered from an envelope payload, in order.
std::vector<std::string> payload_messages(const PromptEnvelope& envelope);

struct LlmOptions {
  std::size_t batch_size = 1;
  std::size_t jobs = 8;
  std::size_t max_retries = 3;
  std::chrono::milliseconds initial_backoff{200};
};

struct SparseOutcome {
  // One entry per distinct content across the sparse groups, sorted.
  std::vector<std::pair<std::string, TemplateResult>> by_content;
  std::size_t request_count = 0;
  std::size_t rolled_back_requests = 0;
};

SparseOutcome process_sparse(std::span<const SparseGroup> groups, InferenceBackend& backend,
                             const LlmOptions& options, CostLedger& ledger,
                             const PromptTemplate& prompt = PromptTemplate::defaults(),
                             const MaskRuleSet& rules = MaskRuleSet::defaults());

}  // namespace celerlog
