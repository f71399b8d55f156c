#include "celerlog/llm_processor.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "celerlog/fixtures.hpp"
#include "celerlog/parallel.hpp"
#include "celerlog/stat_processor.hpp"

namespace celerlog {

namespace {

constexpr std::string_view kBlockOpen = "<variables>";
constexpr std::string_view kBlockClose = "</variables>";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

// "[12] rest" -> (12, "rest")
std::optional<std::pair<std::size_t, std::string_view>> split_index(std::string_view line) {
  if (line.size() < 3 || line.front() != '[') return std::nullopt;
  std::size_t close = line.find(']');
  if (close == std::string_view::npos || close == 1) return std::nullopt;
  std::size_t index = 0;
  for (std::size_t i = 1; i < close; ++i) {
    if (line[i] < '0' || line[i] > '9') return std::nullopt;
    index = index * 10 + static_cast<std::size_t>(line[i] - '0');
  }
  return std::pair{index, line.substr(close + 1)};
}

std::string single_line(std::string_view s) {
  std::string out(s);
  std::replace(out.begin(), out.end(), '\n', ' ');
  std::replace(out.begin(), out.end(), '\r', ' ');
  return out;
}

}  // namespace

const PromptTemplate& PromptTemplate::defaults() {
  static const PromptTemplate prompt = parse(fixtures::default_prompt());
  return prompt;
}

PromptTemplate PromptTemplate::parse(std::string_view text) {
  PromptTemplate out;
  std::string* section = nullptr;
  for (auto line : split_lines(text)) {
    if (section == nullptr && (line.empty() || line.front() == '#')) continue;
    if (line == "[task]") {
      section = &out.task_description;
    } else if (line == "[constraints]") {
      section = &out.constraints;
    } else if (line == "[examples]") {
      section = &out.examples;
    } else if (section != nullptr) {
      section->append(line);
      section->push_back('\n');
    } else {
      throw ConfigError("prompt fixture: text before the first section");
    }
  }
  for (auto* s : {&out.task_description, &out.constraints, &out.examples}) {
    while (!s->empty() && (s->back() == '\n' || s->back() == ' ')) s->pop_back();
    if (s->empty()) throw ConfigError("prompt fixture: missing or empty section");
  }
  return out;
}

PromptTemplate PromptTemplate::load(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open prompt fixture: " + path);
  std::stringstream buf;
  buf << file.rdbuf();
  return parse(buf.str());
}

std::string PromptEnvelope::instructions() const {
  return task_description + "\n\n" + constraints + "\n\nExamples:\n" + examples;
}

std::string PromptEnvelope::render() const { return instructions() + "\n\n" + payload; }

std::size_t PromptEnvelope::char_count() const { return render().size(); }

PromptEnvelope build_prompt(std::span<const std::string> messages, const PromptTemplate& prompt,
                            std::size_t max_batch) {
  if (messages.empty()) throw std::invalid_argument("build_prompt: no messages");
  if (messages.size() > max_batch)
    throw std::invalid_argument("build_prompt: batch larger than " + std::to_string(max_batch));
  PromptEnvelope env{prompt.task_description, prompt.constraints, prompt.examples, {},
                     messages.size()};
  env.payload = "Input:\n";
  for (std::size_t i = 0; i < messages.size(); ++i)
    env.payload += "[" + std::to_string(i + 1) + "] " + single_line(messages[i]) + "\n";
  env.payload += "Output:\n";
  return env;
}

std::vector<std::string> payload_messages(const PromptEnvelope& envelope) {
  std::vector<std::string> out;
  for (auto line : split_lines(envelope.payload)) {
    auto parsed = split_index(line);
    if (!parsed || parsed->first != out.size() + 1) continue;
    std::string_view rest = parsed->second;
    if (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
    out.emplace_back(rest);
  }
  return out;
}

std::vector<std::vector<std::string>> parse_response(std::string_view raw,
                                                     std::size_t message_count) {
  std::size_t open = raw.find(kBlockOpen);
  if (open == std::string_view::npos) throw FormatError("no <variables> block in response");
  std::size_t body_start = open + kBlockOpen.size();
  std::size_t close = raw.find(kBlockClose, body_start);
  if (close == std::string_view::npos) throw FormatError("unterminated <variables> block");

  std::vector<std::vector<std::string>> lists;
  for (auto line : split_lines(raw.substr(body_start, close - body_start))) {
    line = trim(line);
    if (line.empty()) continue;
    auto parsed = split_index(line);
    if (!parsed) throw FormatError("unindexed line in <variables> block");
    if (parsed->first != lists.size() + 1)
      throw FormatError("out-of-order index [" + std::to_string(parsed->first) + "]");
    std::vector<std::string> vars;
    std::string_view rest = trim(parsed->second);
    while (!rest.empty()) {
      std::size_t sep = rest.find("|||");
      std::string_view item = trim(rest.substr(0, sep));
      if (!item.empty()) vars.emplace_back(item);
      if (sep == std::string_view::npos) break;
      rest = rest.substr(sep + 3);
    }
    lists.push_back(std::move(vars));
  }
  if (lists.size() != message_count)
    throw FormatError("expected " + std::to_string(message_count) + " variable lists, got " +
                      std::to_string(lists.size()));
  return lists;
}

std::string format_response(const std::vector<std::vector<std::string>>& variables) {
  std::string out(kBlockOpen);
  out.push_back('\n');
  for (std::size_t i = 0; i < variables.size(); ++i) {
    out += "[" + std::to_string(i + 1) + "]";
    for (std::size_t j = 0; j < variables[i].size(); ++j) {
      out += j == 0 ? std::string(" ") : std::string(kVariableSeparator);
      out += variables[i][j];
    }
    out.push_back('\n');
  }
  out += kBlockClose;
  out.push_back('\n');
  return out;
}

TemplateResult validate_and_mask(std::string_view content, const std::vector<std::string>& variables,
                                 const MaskRuleSet& rules) {
  std::vector<std::string> kept;
  for (const auto& v : variables) {
    if (trim(v).empty()) continue;
    if (content.find(v) == std::string_view::npos) continue;
    kept.push_back(v);
  }
  std::sort(kept.begin(), kept.end(), [](const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
  });
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  if (kept.empty()) return TemplateResult{std::string(content), {}, TemplateSource::rollback};

  std::vector<bool> covered(content.size(), false);
  for (const auto& v : kept) {
    std::size_t pos = content.find(v);
    while (pos != std::string_view::npos) {
      bool free = std::none_of(covered.begin() + static_cast<std::ptrdiff_t>(pos),
                               covered.begin() + static_cast<std::ptrdiff_t>(pos + v.size()),
                               [](bool b) { return b; });
      if (free) {
        std::fill(covered.begin() + static_cast<std::ptrdiff_t>(pos),
                  covered.begin() + static_cast<std::ptrdiff_t>(pos + v.size()), true);
        pos = content.find(v, pos + v.size());
      } else {
        pos = content.find(v, pos + 1);
      }
    }
  }

  std::vector<std::string> tokens;
  std::vector<bool> mask;
  std::size_t i = 0;
  while (i < content.size()) {
    while (i < content.size() && std::isspace(static_cast<unsigned char>(content[i]))) ++i;
    std::size_t start = i;
    bool hit = false;
    while (i < content.size() && !std::isspace(static_cast<unsigned char>(content[i]))) {
      hit = hit || covered[i];
      ++i;
    }
    if (i > start) {
      tokens.emplace_back(content.substr(start, i - start));
      mask.push_back(hit);
    }
  }
  return refine(tokens, std::move(mask), TemplateSource::llm, rules);
}

std::vector<std::string> MockBackend::variables_for(std::string_view message) const {
  std::vector<std::string> vars;
  for (auto& token : split_tokens(message)) {
    bool digit = std::any_of(token.begin(), token.end(),
                             [](char c) { return c >= '0' && c <= '9'; });
    if (digit || rules_.classify(token)) vars.push_back(std::move(token));
  }
  return vars;
}

InferenceReply MockBackend::infer(const PromptEnvelope& envelope) {
  calls_.fetch_add(1);
  std::vector<std::vector<std::string>> lists;
  for (const auto& m : payload_messages(envelope)) lists.push_back(variables_for(m));
  InferenceReply reply;
  reply.text = format_response(lists);
  reply.prompt_tokens = envelope.char_count() / 4;
  reply.completion_tokens = reply.text.size() / 4;
  return reply;
}

InferenceReply mock_infer(const PromptEnvelope& envelope) {
  MockBackend backend;
  return backend.infer(envelope);
}

SparseOutcome process_sparse(std::span<const SparseGroup> groups, InferenceBackend& backend,
                             const LlmOptions& options, CostLedger& ledger,
                             const PromptTemplate& prompt, const MaskRuleSet& rules) {
  SparseOutcome out;
  std::vector<std::string> contents;
  for (const auto& g : groups)
    for (const auto& m : g.group.members) contents.push_back(m);
  std::sort(contents.begin(), contents.end());
  contents.erase(std::unique(contents.begin(), contents.end()), contents.end());
  if (contents.empty()) return out;

  const std::size_t batch = std::max<std::size_t>(1, options.batch_size);
  const std::size_t batches = (contents.size() + batch - 1) / batch;
  std::atomic<std::size_t> rolled_back{0};

  auto run_batch = [&](std::size_t b) {
    const std::size_t begin = b * batch;
    const std::size_t end = std::min(contents.size(), begin + batch);
    std::span<const std::string> messages(contents.data() + begin, end - begin);
    auto envelope = build_prompt(messages, prompt, batch);

    std::vector<std::pair<std::string, TemplateResult>> results;
    auto rollback_all = [&] {
      rolled_back.fetch_add(1);
      for (const auto& m : messages)
        results.emplace_back(m, TemplateResult{m, {}, TemplateSource::rollback});
      return results;
    };

    auto backoff = options.initial_backoff;
    for (std::size_t attempt = 0; attempt <= options.max_retries; ++attempt) {
      InferenceReply reply;
      ledger.add_invocations(1);
      try {
        reply = backend.infer(envelope);
      } catch (const TransportError&) {
        if (attempt == options.max_retries) break;
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
        continue;
      }
      ledger.add_tokens(reply.prompt_tokens + reply.completion_tokens);
      try {
        auto lists = parse_response(reply.text, messages.size());
        for (std::size_t i = 0; i < messages.size(); ++i)
          results.emplace_back(messages[i], validate_and_mask(messages[i], lists[i], rules));
        return results;
      } catch (const FormatError&) {
        return rollback_all();
      }
    }
    return rollback_all();
  };

  auto per_batch = parallel_map(batches, options.jobs, run_batch, [&](std::size_t b) {
    return "LLM request for \"" + contents[b * batch] + "\"";
  });

  out.request_count = batches;
  out.rolled_back_requests = rolled_back.load();
  out.by_content.reserve(contents.size());
  for (auto& batch_results : per_batch)
    for (auto& r : batch_results) out.by_content.push_back(std::move(r));
  return out;
}

}  // namespace celerlog
