#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "celerlog/masker.hpp"
#include "celerlog/model.hpp"

namespace celerlog {

// Positions holding more than one distinct value across `rows`. All rows
// must have the same token count.
std::vector<bool> column_variance(std::span<const std::vector<std::string>> rows);

// Positions where any key of the given length carries a mask token.
std::vector<bool> forced_positions(std::span<const std::vector<std::string>> key_tokens,
                                   std::size_t length);

// Builds a template from a token sequence and a parameter mask, then applies
// the post-processing rules: constant tokens the NUM / CL / UCL rules would
// mask become parameters, tokens built from "<*>" become parameters, and
// adjacent parameter positions merge into one placeholder whose parameter is
// the space-joined original tokens.
TemplateResult refine(const std::vector<std::string>& tokens, std::vector<bool> param_mask,
                      TemplateSource source,
                      const MaskRuleSet& rules = MaskRuleSet::defaults());

// String-level form of the same rules for an already rendered template.
std::string post_process(std::string_view template_text,
                         const MaskRuleSet& rules = MaskRuleSet::defaults());

struct StatExtraction {
  // Template per raw token count; normally exactly one entry.
  std::map<std::size_t, std::string> templates;
  // One entry per distinct member content, sorted by content.
  std::vector<std::pair<std::string, TemplateResult>> by_content;
};

StatExtraction extract_template(const DenseGroup& group,
                                const MaskRuleSet& rules = MaskRuleSet::defaults());

}  // namespace celerlog
