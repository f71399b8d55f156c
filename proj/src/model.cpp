#include "celerlog/model.hpp"

#include <cmath>

namespace celerlog {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

}  // namespace

std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  std::size_t total = tokens.empty() ? 0 : tokens.size() - 1;
  for (const auto& t : tokens) total += t.size();
  out.reserve(total);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

LogRecord::LogRecord(LineId id, std::string text)
    : line_id(id), content(std::move(text)), tokens(split_tokens(content)) {}

std::size_t DenseGroup::record_count() const {
  std::size_t n = 0;
  for (const auto& g : member_groups) n += g.record_ids.size();
  return n;
}

void RouterConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(alpha > 0.0 && alpha <= 1.0)) fail("alpha must be in (0, 1]");
  if (!(p_quantile > 0.0 && p_quantile <= 1.0)) fail("p-quantile must be in (0, 1]");
  if (!(tau_min >= 0.0 && tau_min < tau_max && tau_max <= 1.0))
    fail("similarity sweep bounds must satisfy 0 <= tau_min < tau_max <= 1");
  if (!(tau_step > 0.0) || !std::isfinite(tau_step)) fail("tau-step must be positive");
  if (jobs < 1) fail("jobs must be at least 1");
  if (llm_batch_size < 1) fail("batch-size must be at least 1");
}

std::string_view to_string(TemplateSource source) {
  switch (source) {
    case TemplateSource::statistical: return "statistical";
    case TemplateSource::llm: return "llm";
    case TemplateSource::rollback: return "rollback";
  }
  return "unknown";
}

std::size_t count_wildcards(std::string_view template_text) {
  std::size_t n = 0;
  for (std::size_t pos = template_text.find(kWildcard); pos != std::string_view::npos;
       pos = template_text.find(kWildcard, pos + kWildcard.size()))
    ++n;
  return n;
}

std::optional<std::string> reconstruct(const TemplateResult& result) {
  const std::string_view text = result.template_text;
  if (result.source == TemplateSource::rollback && result.parameters.empty())
    return std::string(text);
  std::string out;
  out.reserve(text.size() + 16 * result.parameters.size());
  std::size_t next_param = 0;
  std::size_t pos = 0;
  while (true) {
    std::size_t hit = text.find(kWildcard, pos);
    if (hit == std::string_view::npos) break;
    if (next_param == result.parameters.size()) return std::nullopt;
    out.append(text.substr(pos, hit - pos));
    out += result.parameters[next_param++];
    pos = hit + kWildcard.size();
  }
  if (next_param != result.parameters.size()) return std::nullopt;
  out.append(text.substr(pos));
  return out;
}

bool round_trips(const TemplateResult& result, const std::vector<std::string>& tokens) {
  auto text = reconstruct(result);
  return text && split_tokens(*text) == tokens;
}

CostSummary CostLedger::snapshot() const {
  return CostSummary{wall_time_seconds(), tokens_consumed(), llm_invocations(),
                     dense_record_count(), sparse_record_count()};
}

}  // namespace celerlog
