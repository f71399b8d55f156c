#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "celerlog/llm_processor.hpp"
#include "celerlog/masker.hpp"
#include "celerlog/model.hpp"
#include "celerlog/parallel.hpp"
#include "celerlog/router.hpp"
#include "celerlog/verbs.hpp"

namespace celerlog {

enum class InputFormat { raw, csv };

struct IngestStats {
  std::size_t lines_read = 0;
  std::size_t blank_lines = 0;
  std::size_t invalid_utf8_bytes = 0;

  bool operator==(const IngestStats&) const = default;
};

struct IngestResult {
  std::vector<LogRecord> records;
  IngestStats stats;
};

// Replaces every invalid UTF-8 byte with U+FFFD; returns the replacement count.
std::size_t sanitize_utf8(std::string& text);

// raw: one record per non-blank line after header stripping. csv: the
// "Content" column of a file with a header row. Throws IoError for a missing
// file or column.
IngestResult ingest(const std::filesystem::path& path, InputFormat format,
                    const HeaderPattern* header = nullptr);

// Lookup tables shared by every stage.
struct Resources {
  const MaskRuleSet* rules = &MaskRuleSet::defaults();
  const VerbLexicon* verbs = &VerbLexicon::defaults();
  const PromptTemplate* prompt = &PromptTemplate::defaults();
};

struct RunConfig {
  RouterConfig router;
  std::size_t max_retries = 3;
  std::chrono::milliseconds initial_backoff{200};

  std::filesystem::path input;
  InputFormat format = InputFormat::raw;
  std::optional<std::string> header_pattern;
  std::filesystem::path output_dir;
};

struct CatalogEntry {
  std::string template_text;
  std::size_t occurrences = 0;

  bool operator==(const CatalogEntry&) const = default;
};

struct ParseOutput {
  std::vector<LogRecord> records;
  // results[i] belongs to records[i].
  std::vector<TemplateResult> results;
  // Sorted by descending occurrences, then template text.
  std::vector<CatalogEntry> catalog;
  RoutingStats routing;
  IngestStats ingest;
  CostSummary cost;
  std::string backend;
  std::size_t llm_requests = 0;
  std::size_t llm_rolled_back_requests = 0;
};

// Routes the records, parses dense groups statistically and sparse groups
// through the backend concurrently, and merges the results by line.
ParseOutput parse_records(std::vector<LogRecord> records, const RunConfig& config,
                          InferenceBackend& backend, const Resources& resources = {},
                          CostLedger* ledger = nullptr);

std::vector<CatalogEntry> build_catalog(const std::vector<TemplateResult>& results);

// ingest -> parse_records -> write_output; wall time covers all of it.
ParseOutput run(const RunConfig& config, InferenceBackend& backend, const Resources& resources = {});

// structured.csv, templates.csv and run.json under out_dir.
void write_output(const ParseOutput& output, const RunConfig& config,
                  const std::filesystem::path& out_dir);

// Individual writers, exposed for tests.
void write_structured_csv(const ParseOutput& output, const std::filesystem::path& path);
void write_templates_csv(const std::vector<CatalogEntry>& catalog, const std::filesystem::path& path);
void write_run_json(const ParseOutput& output, const RunConfig& config,
                    const std::filesystem::path& path);

}  // namespace celerlog

