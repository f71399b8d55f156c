#include "celerlog/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <future>
#include <sstream>
#include <unordered_map>

#include "celerlog/csv.hpp"
#include "celerlog/stat_processor.hpp"

namespace celerlog {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
  });
}

std::string read_file(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open input file: " + path.string());
  std::stringstream buf;
  buf << file.rdbuf();
  return buf.str();
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

const TemplateResult* find_result(const std::vector<std::pair<std::string, TemplateResult>>& sorted,
                                  std::string_view content) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), content,
                             [](const auto& entry, std::string_view c) { return entry.first < c; });
  return it != sorted.end() && it->first == content ? &it->second : nullptr;
}

}  // namespace

std::size_t sanitize_utf8(std::string& text) {
  static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
  std::size_t i = 0;
  std::size_t replaced = 0;
  // Fast path for the common all-valid case.
  auto valid_len = [&](std::size_t pos) -> std::size_t {
    auto b = [&](std::size_t k) { return static_cast<unsigned char>(text[pos + k]); };
    const std::size_t left = text.size() - pos;
    unsigned char c = b(0);
    if (c < 0x80) return 1;
    auto cont = [&](std::size_t k) { return k < left && (b(k) & 0xC0) == 0x80; };
    if (c >= 0xC2 && c <= 0xDF) return cont(1) ? 2 : 0;
    if (c >= 0xE0 && c <= 0xEF) {
      if (!cont(1) || !cont(2)) return 0;
      if (c == 0xE0 && b(1) < 0xA0) return 0;
      if (c == 0xED && b(1) > 0x9F) return 0;
      return 3;
    }
    if (c >= 0xF0 && c <= 0xF4) {
      if (!cont(1) || !cont(2) || !cont(3)) return 0;
      if (c == 0xF0 && b(1) < 0x90) return 0;
      if (c == 0xF4 && b(1) > 0x8F) return 0;
      return 4;
    }
    return 0;
  };
  while (i < text.size()) {
    std::size_t n = valid_len(i);
    if (n == 0) break;
    i += n;
  }
  if (i == text.size()) return 0;

  std::string out(text.substr(0, i));
  while (i < text.size()) {
    std::size_t n = valid_len(i);
    if (n == 0) {
      out += kReplacement;
      ++replaced;
      ++i;
    } else {
      out.append(text, i, n);
      i += n;
    }
  }
  text = std::move(out);
  return replaced;
}

IngestResult ingest(const fs::path& path, InputFormat format, const HeaderPattern* header) {
  IngestResult result;
  auto add = [&](std::string content) {
    result.stats.invalid_utf8_bytes += sanitize_utf8(content);
    if (is_blank(content)) {
      ++result.stats.blank_lines;
      return;
    }
    const LineId id = result.records.size();
    result.records.emplace_back(id, std::move(content));
  };

  if (format == InputFormat::raw) {
    const std::string text = read_file(path);
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string::npos) end = text.size();
      std::string_view line(text.data() + start, end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      ++result.stats.lines_read;
      add(strip_header(line, header));
      start = end + 1;
    }
    return result;
  }

  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open input file: " + path.string());
  CsvReader reader(file);
  auto head = reader.next();
  if (!head) throw IoError("CSV input has no header row: " + path.string());
  auto content_col = column_index(*head, "Content");
  if (!content_col) throw IoError("CSV input has no Content column: " + path.string());
  while (auto row = reader.next()) {
    ++result.stats.lines_read;
    if (*content_col >= row->size()) {
      ++result.stats.blank_lines;
      continue;
    }
    add(std::move((*row)[*content_col]));
  }
  return result;
}

std::vector<CatalogEntry> build_catalog(const std::vector<TemplateResult>& results) {
  std::unordered_map<std::string_view, std::size_t> counts;
  for (const auto& r : results) ++counts[r.template_text];
  std::vector<CatalogEntry> catalog;
  catalog.reserve(counts.size());
  for (const auto& [text, n] : counts) catalog.push_back({std::string(text), n});
  std::sort(catalog.begin(), catalog.end(), [](const CatalogEntry& a, const CatalogEntry& b) {
    if (a.occurrences != b.occurrences) return a.occurrences > b.occurrences;
    return a.template_text < b.template_text;
  });
  return catalog;
}

ParseOutput parse_records(std::vector<LogRecord> records, const RunConfig& config,
                          InferenceBackend& backend, const Resources& resources,
                          CostLedger* external_ledger) {
  config.router.validate();
  CostLedger local_ledger;
  CostLedger& ledger = external_ledger ? *external_ledger : local_ledger;

  ParseOutput out;
  out.backend = backend.name();

  std::unordered_map<LineId, std::size_t> slot;
  slot.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i)
    if (!slot.emplace(records[i].line_id, i).second)
      throw InternalInvariant("duplicate line id " + std::to_string(records[i].line_id));

  RoutingResult routing =
      route(records, config.router, *resources.verbs, *resources.rules);
  out.routing = routing.stats;
  ledger.add_dense_records(routing.stats.dense_record_count);
  ledger.add_sparse_records(routing.stats.sparse_record_count);

  LlmOptions llm;
  llm.batch_size = config.router.llm_batch_size;
  llm.jobs = config.router.jobs;
  llm.max_retries = config.max_retries;
  llm.initial_backoff = config.initial_backoff;

  // Network-bound sparse work overlaps the compute-bound dense work.
  auto sparse_future = std::async(std::launch::async, [&] {
    return process_sparse(routing.sparse, backend, llm, ledger, *resources.prompt, *resources.rules);
  });

  std::vector<StatExtraction> dense;
  try {
    dense = parallel_map(
        routing.dense.size(), config.router.jobs,
        [&](std::size_t i) { return extract_template(routing.dense[i], *resources.rules); },
        [&](std::size_t i) {
          const auto& d = routing.dense[i];
          return "dense group " + (d.anchor_key ? *d.anchor_key : d.member_groups.front().key);
        });
  } catch (...) {
    sparse_future.wait();
    throw;
  }
  SparseOutcome sparse = sparse_future.get();
  out.llm_requests = sparse.request_count;
  out.llm_rolled_back_requests = sparse.rolled_back_requests;

  out.results.resize(records.size());
  std::vector<bool> assigned(records.size(), false);
  auto assign = [&](const SkeletonGroup& group, auto&& lookup) {
    for (LineId id : group.record_ids) {
      std::size_t idx = slot.at(id);
      const TemplateResult* r = lookup(records[idx].content);
      if (!r || assigned[idx])
        throw InternalInvariant("line " + std::to_string(id) + " was not assigned exactly once");
      out.results[idx] = *r;
      assigned[idx] = true;
    }
  };
  for (std::size_t i = 0; i < routing.dense.size(); ++i)
    for (const auto& g : routing.dense[i].member_groups)
      assign(g, [&](std::string_view c) { return find_result(dense[i].by_content, c); });
  for (const auto& s : routing.sparse)
    assign(s.group, [&](std::string_view c) { return find_result(sparse.by_content, c); });
  if (std::find(assigned.begin(), assigned.end(), false) != assigned.end())
    throw InternalInvariant("routing did not cover every record");

  out.catalog = build_catalog(out.results);
  out.records = std::move(records);
  out.cost = ledger.snapshot();
  return out;
}

void write_structured_csv(const ParseOutput& output, const fs::path& path) {
  auto out = open_output(path);
  std::vector<std::size_t> order(output.records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return output.records[a].line_id < output.records[b].line_id;
  });
  const std::vector<std::string> header = {"LineId", "Content", "EventTemplate", "Parameters"};
  write_csv_row(out, header);
  std::vector<std::string> row(4);
  for (std::size_t i : order) {
    row[0] = std::to_string(output.records[i].line_id);
    row[1] = output.records[i].content;
    row[2] = output.results[i].template_text;
    row[3] = join_parameters(output.results[i].parameters);
    write_csv_row(out, row);
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void write_templates_csv(const std::vector<CatalogEntry>& catalog, const fs::path& path) {
  auto out = open_output(path);
  const std::vector<std::string> header = {"EventTemplate", "Occurrences"};
  write_csv_row(out, header);
  std::vector<std::string> row(2);
  for (const auto& e : catalog) {
    row[0] = e.template_text;
    row[1] = std::to_string(e.occurrences);
    write_csv_row(out, row);
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void write_run_json(const ParseOutput& output, const RunConfig& config, const fs::path& path) {
  const auto& r = config.router;
  json doc;
  doc["cost"] = {
      {"wall_time_seconds", output.cost.wall_time_seconds},
      {"tokens_consumed", output.cost.tokens_consumed},
      {"llm_invocations", output.cost.llm_invocations},
      {"dense_record_count", output.cost.dense_record_count},
      {"sparse_record_count", output.cost.sparse_record_count},
  };
  doc["config"] = {
      {"alpha", r.alpha},
      {"p_quantile", r.p_quantile},
      {"tau_min", r.tau_min},
      {"tau_max", r.tau_max},
      {"tau_step", r.tau_step},
      {"bypass_length", r.bypass_length},
      {"bypass_group_count", r.bypass_group_count},
      {"jobs", r.jobs},
      {"llm_batch_size", r.llm_batch_size},
      {"max_retries", config.max_retries},
      {"backend", output.backend},
      {"input", config.input.string()},
      {"format", config.format == InputFormat::raw ? "raw" : "csv"},
      {"header_pattern", config.header_pattern ? json(*config.header_pattern) : json(nullptr)},
  };
  const auto& s = output.routing;
  doc["routing"] = {
      {"record_count", s.record_count},
      {"skeleton_group_count", s.skeleton_group_count},
      {"bucket_count", s.bucket_count},
      {"bypassed_bucket_count", s.bypassed_bucket_count},
      {"dense_group_count", s.dense_group_count},
      {"sparse_group_count", s.sparse_group_count},
      {"dense_record_count", s.dense_record_count},
      {"sparse_record_count", s.sparse_record_count},
      {"llm_requests", output.llm_requests},
      {"llm_rolled_back_requests", output.llm_rolled_back_requests},
  };
  doc["ingest"] = {
      {"lines_read", output.ingest.lines_read},
      {"blank_lines", output.ingest.blank_lines},
      {"invalid_utf8_bytes", output.ingest.invalid_utf8_bytes},
  };
  doc["template_count"] = output.catalog.size();
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

void write_output(const ParseOutput& output, const RunConfig& config, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir))
    throw IoError("cannot create output directory " + out_dir.string());
  write_structured_csv(output, out_dir / "structured.csv");
  write_templates_csv(output.catalog, out_dir / "templates.csv");
  write_run_json(output, config, out_dir / "run.json");
}

ParseOutput run(const RunConfig& config, InferenceBackend& backend, const Resources& resources) {
  const auto start = std::chrono::steady_clock::now();
  config.router.validate();
  std::optional<HeaderPattern> header;
  if (config.header_pattern) header.emplace(*config.header_pattern);

  CostLedger ledger;
  auto ingested = ingest(config.input, config.format, header ? &*header : nullptr);
  ParseOutput out = parse_records(std::move(ingested.records), config, backend, resources, &ledger);
  out.ingest = ingested.stats;

  if (!config.output_dir.empty()) {
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec || !fs::is_directory(config.output_dir))
      throw IoError("cannot create output directory " + config.output_dir.string());
    write_structured_csv(out, config.output_dir / "structured.csv");
    write_templates_csv(out.catalog, config.output_dir / "templates.csv");
  }
  ledger.set_wall_time(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  out.cost = ledger.snapshot();
  if (!config.output_dir.empty()) write_run_json(out, config, config.output_dir / "run.json");
  return out;
}

}  // namespace celerlog
