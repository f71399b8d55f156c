#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace celerlog {

inline constexpr std::string_view kWildcard = "<*>";

// Errors. Everything the library throws derives from Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid flag values, malformed fixtures or patterns. Reported at startup.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class EmptyMessage : public Error {
 public:
  EmptyMessage() : Error("empty log message") {}
};

// A broken internal contract, e.g. comparing keys from different buckets.
class InternalInvariant : public Error {
 public:
  using Error::Error;
};

using LineId = std::size_t;

std::vector<std::string> split_tokens(std::string_view text);
std::string join_tokens(const std::vector<std::string>& tokens);

struct LogRecord {
  LineId line_id = 0;
  std::string content;
  std::vector<std::string> tokens;

  LogRecord() = default;
  LogRecord(LineId id, std::string text);
};

struct SkeletonGroup {
  std::string key;
  std::vector<std::string> key_tokens;
  // Distinct raw contents, sorted.
  std::vector<std::string> members;
  // Every line mapped to this group, ascending.
  std::vector<LineId> record_ids;

  std::size_t unique_count() const { return members.size(); }
  std::size_t length() const { return key_tokens.size(); }
};

struct LogBucket {
  std::size_t length = 0;
  std::vector<SkeletonGroup> groups;
};

struct DenseGroup {
  std::vector<SkeletonGroup> member_groups;
  // Absent when the bucket bypassed merging.
  std::optional<std::string> anchor_key;

  std::size_t record_count() const;
};

struct SparseGroup {
  SkeletonGroup group;
};

struct RouterConfig {
  double alpha = 0.5;
  double p_quantile = 0.95;
  double tau_min = 0.5;
  double tau_max = 0.95;
  double tau_step = 0.01;
  std::size_t bypass_length = 3;
  std::size_t bypass_group_count = 2;
  std::size_t jobs = 8;
  std::size_t llm_batch_size = 1;

  // Throws ConfigError naming the first offending field.
  void validate() const;
};

enum class TemplateSource { statistical, llm, rollback };

std::string_view to_string(TemplateSource source);

struct TemplateResult {
  std::string template_text;
  std::vector<std::string> parameters;
  TemplateSource source = TemplateSource::statistical;

  bool operator==(const TemplateResult&) const = default;
};

// Substitutes parameters into the placeholders of template_text, in order.
// Returns nullopt when the placeholder count and parameter count differ.
std::optional<std::string> reconstruct(const TemplateResult& result);

// True when reconstruct(result) tokenizes to exactly `tokens`.
bool round_trips(const TemplateResult& result,
                 const std::vector<std::string>& tokens);

std::size_t count_wildcards(std::string_view template_text);

struct CostSummary {
  double wall_time_seconds = 0.0;
  std::uint64_t tokens_consumed = 0;
  std::uint64_t llm_invocations = 0;
  std::uint64_t dense_record_count = 0;
  std::uint64_t sparse_record_count = 0;

  bool operator==(const CostSummary&) const = default;
};

// Shared by concurrent workers; counters only ever grow.
class CostLedger {
 public:
  void add_tokens(std::uint64_t n) { tokens_.fetch_add(n, std::memory_order_relaxed); }
  void add_invocations(std::uint64_t n) { invocations_.fetch_add(n, std::memory_order_relaxed); }
  void add_dense_records(std::uint64_t n) { dense_.fetch_add(n, std::memory_order_relaxed); }
  void add_sparse_records(std::uint64_t n) { sparse_.fetch_add(n, std::memory_order_relaxed); }
  void set_wall_time(double seconds) { wall_seconds_.store(seconds); }

  std::uint64_t tokens_consumed() const { return tokens_.load(); }
  std::uint64_t llm_invocations() const { return invocations_.load(); }
  std::uint64_t dense_record_count() const { return dense_.load(); }
  std::uint64_t sparse_record_count() const { return sparse_.load(); }
  double wall_time_seconds() const { return wall_seconds_.load(); }

  CostSummary snapshot() const;

 private:
  std::atomic<std::uint64_t> tokens_{0};
  std::atomic<std::uint64_t> invocations_{0};
  std::atomic<std::uint64_t> dense_{0};
  std::atomic<std::uint64_t> sparse_{0};
  std::atomic<double> wall_seconds_{0.0};
};

}  // namespace celerlog
