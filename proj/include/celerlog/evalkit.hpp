#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "celerlog/model.hpp"

namespace celerlog {

// Template text with whitespace normalized and runs of "<*>" collapsed.
std::string normalize_template(std::string_view template_text);

// Inputs are aligned by index: predicted[i] and truth[i] describe one line.
// Each function throws Error for an empty set or mismatched sizes.
double grouping_accuracy(std::span<const std::string> predicted, std::span<const std::string> truth);
double parsing_accuracy(std::span<const std::string> predicted, std::span<const std::string> truth);
double f1_grouping_accuracy(std::span<const std::string> predicted, std::span<const std::string> truth);
double f1_template_accuracy(std::span<const std::string> predicted, std::span<const std::string> truth);

struct Metrics {
  double ga = 0.0;
  double pa = 0.0;
  double fga = 0.0;
  double fta = 0.0;
  std::size_t record_count = 0;
  std::size_t predicted_template_count = 0;
  std::size_t truth_template_count = 0;
};

Metrics evaluate(std::span<const std::string> predicted, std::span<const std::string> truth);

// LineId -> template. Structured files carry LineId and EventTemplate columns
// (the parse output), ground truth files LineId and EventTemplate.
std::map<LineId, std::string> load_templates(const std::filesystem::path& csv_path);

struct AlignedTemplates {
  std::vector<std::string> predicted;
  std::vector<std::string> truth;
};

// Throws Error unless both sides cover exactly the same line ids.
AlignedTemplates align(const std::map<LineId, std::string>& predicted,
                       const std::map<LineId, std::string>& truth);

// Writes the JSON report and prints a table to `table`. `run_json_path`,
// when it exists, contributes cost and routing fields.
void report(const Metrics& metrics, const std::filesystem::path& out_path,
            const std::optional<std::filesystem::path>& run_json_path, std::ostream& table);

}  // namespace celerlog
