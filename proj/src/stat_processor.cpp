#include "celerlog/stat_processor.hpp"

#include <algorithm>

namespace celerlog {

namespace {

bool is_variable_shape(std::string_view token, const MaskRuleSet& rules) {
  auto kind = rules.classify(token);
  return kind == MaskKind::num || kind == MaskKind::cl || kind == MaskKind::ucl;
}

// "<*>", "<*>:<*>", "<*>=<*>/<*>", ...
bool is_composite_wildcard(std::string_view token) {
  if (!token.starts_with(kWildcard)) return false;
  token.remove_prefix(kWildcard.size());
  while (!token.empty()) {
    if (token.size() < 1 + kWildcard.size()) return false;
    char sep = token.front();
    if (sep != ':' && sep != '=' && sep != '/') return false;
    token.remove_prefix(1);
    if (!token.starts_with(kWildcard)) return false;
    token.remove_prefix(kWildcard.size());
  }
  return true;
}

}  // namespace

std::vector<bool> column_variance(std::span<const std::vector<std::string>> rows) {
  if (rows.empty()) return {};
  const auto& first = rows.front();
  std::vector<bool> varies(first.size(), false);
  for (const auto& row : rows.subspan(1)) {
    if (row.size() != first.size())
      throw InternalInvariant("column_variance on rows of different lengths");
    for (std::size_t p = 0; p < first.size(); ++p)
      if (!varies[p] && row[p] != first[p]) varies[p] = true;
  }
  return varies;
}

std::vector<bool> forced_positions(std::span<const std::vector<std::string>> key_tokens,
                                   std::size_t length) {
  std::vector<bool> forced(length, false);
  for (const auto& key : key_tokens) {
    if (key.size() != length) continue;
    for (std::size_t p = 0; p < length; ++p)
      if (!forced[p] && is_mask_token(key[p])) forced[p] = true;
  }
  return forced;
}

TemplateResult refine(const std::vector<std::string>& tokens, std::vector<bool> param_mask,
                      TemplateSource source, const MaskRuleSet& rules) {
  param_mask.resize(tokens.size(), false);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (param_mask[i]) continue;
    // A literal "<*>" inside a constant would break the placeholder count.
    if (is_variable_shape(tokens[i], rules) ||
        tokens[i].find(kWildcard) != std::string::npos)
      param_mask[i] = true;
  }

  TemplateResult out;
  out.source = source;
  std::vector<std::string> parts;
  parts.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size();) {
    if (!param_mask[i]) {
      parts.push_back(tokens[i]);
      ++i;
      continue;
    }
    std::string param = tokens[i];
    std::size_t j = i + 1;
    for (; j < tokens.size() && param_mask[j]; ++j) {
      param.push_back(' ');
      param += tokens[j];
    }
    parts.emplace_back(kWildcard);
    out.parameters.push_back(std::move(param));
    i = j;
  }
  out.template_text = join_tokens(parts);
  return out;
}

std::string post_process(std::string_view template_text, const MaskRuleSet& rules) {
  auto tokens = split_tokens(template_text);
  for (auto& t : tokens)
    if (is_variable_shape(t, rules)) t = kWildcard;

  auto collapse = [](std::vector<std::string>& ts) {
    std::vector<std::string> out;
    out.reserve(ts.size());
    for (auto& t : ts) {
      if (t == kWildcard && !out.empty() && out.back() == kWildcard) continue;
      out.push_back(std::move(t));
    }
    ts = std::move(out);
  };
  collapse(tokens);
  for (auto& t : tokens)
    if (is_composite_wildcard(t)) t = kWildcard;
  collapse(tokens);
  return join_tokens(tokens);
}

StatExtraction extract_template(const DenseGroup& group, const MaskRuleSet& rules) {
  std::vector<std::string_view> contents;
  std::vector<std::vector<std::string>> keys;
  for (const auto& g : group.member_groups) {
    keys.push_back(g.key_tokens);
    for (const auto& m : g.members) contents.push_back(m);
  }
  std::sort(contents.begin(), contents.end());
  contents.erase(std::unique(contents.begin(), contents.end()), contents.end());

  std::map<std::size_t, std::vector<std::vector<std::string>>> partitions;
  std::map<std::size_t, std::vector<std::string_view>> partition_contents;
  for (auto c : contents) {
    auto tokens = split_tokens(c);
    partition_contents[tokens.size()].push_back(c);
    partitions[tokens.size()].push_back(std::move(tokens));
  }

  StatExtraction out;
  out.by_content.reserve(contents.size());
  for (auto& [length, rows] : partitions) {
    auto mask = column_variance(rows);
    auto forced = forced_positions(keys, length);
    for (std::size_t p = 0; p < length; ++p) mask[p] = mask[p] || forced[p];

    const auto& texts = partition_contents[length];
    for (std::size_t r = 0; r < rows.size(); ++r) {
      auto result = refine(rows[r], mask, TemplateSource::statistical, rules);
      if (r == 0) out.templates.emplace(length, result.template_text);
      out.by_content.emplace_back(std::string(texts[r]), std::move(result));
    }
  }
  std::sort(out.by_content.begin(), out.by_content.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

}  // namespace celerlog
