#include "celerlog/evalkit.hpp"

#include <json.hpp>

#include <fstream>
#include <algorithm>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "celerlog/csv.hpp"

namespace celerlog {

namespace {

using json = nlohmann::ordered_json;

void check_inputs(std::span<const std::string> predicted, std::span<const std::string> truth) {
  if (predicted.size() != truth.size())
    throw Error("predicted and ground-truth sets differ in size");
  if (predicted.empty()) throw Error("empty evaluation set");
}

struct Clustering {
  // cluster id per record, clusters numbered in first-appearance order
  std::vector<std::size_t> label;
  std::vector<std::size_t> size;
  std::vector<std::size_t> first;
};

Clustering cluster(std::span<const std::string> templates) {
  Clustering c;
  std::unordered_map<std::string_view, std::size_t> ids;
  c.label.reserve(templates.size());
  for (std::size_t i = 0; i < templates.size(); ++i) {
    auto [it, inserted] = ids.try_emplace(templates[i], c.size.size());
    if (inserted) {
      c.size.push_back(0);
      c.first.push_back(i);
    }
    ++c.size[it->second];
    c.label.push_back(it->second);
  }
  return c;
}

// exact[p] is true when predicted cluster p has exactly the records of one
// ground-truth cluster.
std::vector<bool> exact_clusters(const Clustering& pred, const Clustering& truth) {
  std::vector<bool> exact(pred.size.size(), true);
  std::vector<std::size_t> truth_of(pred.size.size(), SIZE_MAX);
  for (std::size_t i = 0; i < pred.label.size(); ++i) {
    const std::size_t p = pred.label[i];
    const std::size_t t = truth.label[i];
    if (truth_of[p] == SIZE_MAX) truth_of[p] = t;
    else if (truth_of[p] != t) exact[p] = false;
  }
  for (std::size_t p = 0; p < exact.size(); ++p)
    if (exact[p] && truth.size[truth_of[p]] != pred.size[p]) exact[p] = false;
  return exact;
}

double f1(double correct, double predicted, double truth) {
  const double precision = correct / predicted;
  const double recall = correct / truth;
  return precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

}  // namespace

std::string normalize_template(std::string_view template_text) {
  auto tokens = split_tokens(template_text);
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (auto& t : tokens) {
    if (t == kWildcard && !out.empty() && out.back() == kWildcard) continue;
    out.push_back(std::move(t));
  }
  return join_tokens(out);
}

double grouping_accuracy(std::span<const std::string> predicted, std::span<const std::string> truth) {
  check_inputs(predicted, truth);
  auto pred = cluster(predicted);
  auto gt = cluster(truth);
  auto exact = exact_clusters(pred, gt);
  std::size_t correct = 0;
  for (std::size_t p = 0; p < exact.size(); ++p)
    if (exact[p]) correct += pred.size[p];
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

double parsing_accuracy(std::span<const std::string> predicted, std::span<const std::string> truth) {
  check_inputs(predicted, truth);
  std::unordered_map<std::string_view, std::string> cache;
  auto norm = [&](const std::string& s) -> const std::string& {
    auto it = cache.find(s);
    if (it == cache.end()) it = cache.emplace(s, normalize_template(s)).first;
    return it->second;
  };
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    correct += norm(predicted[i]) == norm(truth[i]);
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

double f1_grouping_accuracy(std::span<const std::string> predicted, std::span<const std::string> truth) {
  check_inputs(predicted, truth);
  auto pred = cluster(predicted);
  auto gt = cluster(truth);
  auto exact = exact_clusters(pred, gt);
  const auto correct = static_cast<double>(std::count(exact.begin(), exact.end(), true));
  return f1(correct, static_cast<double>(pred.size.size()), static_cast<double>(gt.size.size()));
}

double f1_template_accuracy(std::span<const std::string> predicted, std::span<const std::string> truth) {
  check_inputs(predicted, truth);
  auto pred = cluster(predicted);
  auto gt = cluster(truth);
  auto exact = exact_clusters(pred, gt);
  std::size_t correct = 0;
  for (std::size_t p = 0; p < exact.size(); ++p) {
    if (!exact[p]) continue;
    const std::size_t i = pred.first[p];
    correct += normalize_template(predicted[i]) == normalize_template(truth[i]);
  }
  return f1(static_cast<double>(correct), static_cast<double>(pred.size.size()),
            static_cast<double>(gt.size.size()));
}

Metrics evaluate(std::span<const std::string> predicted, std::span<const std::string> truth) {
  Metrics m;
  m.ga = grouping_accuracy(predicted, truth);
  m.pa = parsing_accuracy(predicted, truth);
  m.fga = f1_grouping_accuracy(predicted, truth);
  m.fta = f1_template_accuracy(predicted, truth);
  m.record_count = predicted.size();
  m.predicted_template_count = cluster(predicted).size.size();
  m.truth_template_count = cluster(truth).size.size();
  return m;
}

std::map<LineId, std::string> load_templates(const std::filesystem::path& csv_path) {
  std::ifstream file(csv_path, std::ios::binary);
  if (!file) throw IoError("cannot open " + csv_path.string());
  CsvReader reader(file);
  auto header = reader.next();
  if (!header) throw IoError(csv_path.string() + " is empty");
  auto id_col = column_index(*header, "LineId");
  auto tpl_col = column_index(*header, "EventTemplate");
  if (!id_col || !tpl_col)
    throw IoError(csv_path.string() + " needs LineId and EventTemplate columns");

  std::map<LineId, std::string> out;
  while (auto row = reader.next()) {
    if (row->size() == 1 && row->front().empty()) continue;
    if (row->size() <= std::max(*id_col, *tpl_col))
      throw IoError(csv_path.string() + ": short row " + std::to_string(reader.rows_read()));
    const std::string& id_text = (*row)[*id_col];
    std::size_t used = 0;
    unsigned long long id = 0;
    try {
      id = std::stoull(id_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != id_text.size())
      throw IoError(csv_path.string() + ": bad LineId '" + id_text + "'");
    if (!out.emplace(static_cast<LineId>(id), (*row)[*tpl_col]).second)
      throw IoError(csv_path.string() + ": duplicate LineId " + id_text);
  }
  return out;
}

AlignedTemplates align(const std::map<LineId, std::string>& predicted,
                       const std::map<LineId, std::string>& truth) {
  if (predicted.size() != truth.size())
    throw Error("line id sets differ: " + std::to_string(predicted.size()) + " predicted vs " +
                std::to_string(truth.size()) + " ground-truth lines");
  AlignedTemplates out;
  out.predicted.reserve(predicted.size());
  out.truth.reserve(truth.size());
  auto t = truth.begin();
  for (auto p = predicted.begin(); p != predicted.end(); ++p, ++t) {
    if (p->first != t->first)
      throw Error("line id " + std::to_string(p->first) + " has no ground-truth entry");
    out.predicted.push_back(p->second);
    out.truth.push_back(t->second);
  }
  return out;
}

void report(const Metrics& metrics, const std::filesystem::path& out_path,
            const std::optional<std::filesystem::path>& run_json_path, std::ostream& table) {
  json doc;
  doc["GA"] = metrics.ga;
  doc["PA"] = metrics.pa;
  doc["FGA"] = metrics.fga;
  doc["FTA"] = metrics.fta;
  doc["record_count"] = metrics.record_count;
  doc["predicted_template_count"] = metrics.predicted_template_count;
  doc["ground_truth_template_count"] = metrics.truth_template_count;

  json run;
  if (run_json_path && std::filesystem::exists(*run_json_path)) {
    std::ifstream in(*run_json_path, std::ios::binary);
    run = json::parse(in, nullptr, false);
    if (run.is_discarded()) throw IoError("cannot parse " + run_json_path->string());
    if (run.contains("cost")) doc["cost"] = run["cost"];
    if (run.contains("routing")) doc["routing"] = run["routing"];
  }

  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write report " + out_path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing report " + out_path.string());

  auto row = [&](std::string_view name, const std::string& value) {
    table << std::left << std::setw(24) << name << std::right << std::setw(14) << value << '\n';
  };
  auto fixed = [](double v, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
  };
  row("GA", fixed(metrics.ga, 4));
  row("PA", fixed(metrics.pa, 4));
  row("FGA", fixed(metrics.fga, 4));
  row("FTA", fixed(metrics.fta, 4));
  row("records", std::to_string(metrics.record_count));
  row("predicted templates", std::to_string(metrics.predicted_template_count));
  row("ground-truth templates", std::to_string(metrics.truth_template_count));
  if (doc.contains("cost")) {
    const auto& c = doc["cost"];
    if (c.contains("wall_time_seconds")) row("wall time (s)", fixed(c["wall_time_seconds"].get<double>(), 3));
    if (c.contains("tokens_consumed")) row("tokens", std::to_string(c["tokens_consumed"].get<std::uint64_t>()));
    if (c.contains("llm_invocations")) row("LLM invocations", std::to_string(c["llm_invocations"].get<std::uint64_t>()));
  }
}

}  // namespace celerlog
