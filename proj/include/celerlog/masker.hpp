#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace celerlog {

enum class MaskKind { num, cl, ucl, bl, sl };

inline constexpr std::array<MaskKind, 5> kMaskOrder = {MaskKind::num, MaskKind::cl, MaskKind::ucl,
                                                      MaskKind::bl, MaskKind::sl};

// "NUM", "CL", ...
std::string_view mask_name(MaskKind kind);
// "<NUM>", "<CL>", ...
std::string_view mask_replacement(MaskKind kind);
std::optional<MaskKind> parse_mask_name(std::string_view name);

// A token split around its core. Prefix is the longest leading run of
// ( [ < { " ' and suffix the longest trailing run of ) ] > } " ' , ; : . ! ?
struct TokenFrame {
  std::string_view prefix;
  std::string_view core;
  std::string_view suffix;
};

TokenFrame frame_token(std::string_view token);

// True if the token is, or wraps, one of the designated mask tokens or the
// template wildcard, e.g. "<NUM>", "(<CL>)", "<*>".
bool is_mask_token(std::string_view token);

// The ordered NUM, CL, UCL, BL, SL rule table. The default table uses
// compiled predicates; a table parsed from a fixture uses regular expressions.
class MaskRuleSet {
 public:
  // Built-in rules, equivalent to data/mask_rules.tsv.
  static const MaskRuleSet& defaults();
  // Parses "NAME<TAB>PATTERN" lines; '#' starts a comment line.
  static MaskRuleSet parse(std::string_view text);
  static MaskRuleSet load(const std::string& path);

  std::optional<MaskKind> classify(std::string_view token) const;
  std::string mask_token(std::string_view token) const;

  bool uses_patterns() const { return impl_ != nullptr; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

std::string mask_token(std::string_view token);

struct MaskedMessage {
  std::string skeleton;
  std::vector<std::string> key_tokens;
};

// Token-for-token masking; throws EmptyMessage for blank content.
MaskedMessage mask_message(std::string_view content,
                           const MaskRuleSet& rules = MaskRuleSet::defaults());
MaskedMessage mask_tokens(const std::vector<std::string>& tokens,
                          const MaskRuleSet& rules = MaskRuleSet::defaults());

// Extracts the body of a raw line using a pattern with a named "content"
// group. Lines that do not match pass through unchanged.
class HeaderPattern {
 public:
  // Throws ConfigError for invalid patterns or a missing "content" group.
  explicit HeaderPattern(const std::string& pattern);

  std::string strip(std::string_view raw_line) const;
  const std::string& pattern() const { return pattern_; }

 private:
  struct Impl;
  std::string pattern_;
  std::shared_ptr<const Impl> impl_;
};

std::string strip_header(std::string_view raw_line, const HeaderPattern* header = nullptr);

}  // namespace celerlog
