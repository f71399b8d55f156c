#include "celerlog/masker.hpp"

#include <boost/regex.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "celerlog/model.hpp"

namespace celerlog {

namespace {

constexpr std::string_view kPrefixChars = "([<{\"'";
constexpr std::string_view kSuffixChars = ")]>}\"',;:.!?";
constexpr std::string_view kDelimiters = "/\\=:.-_";

bool in(std::string_view set, char c) { return set.find(c) != std::string_view::npos; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_letter(char c) { return is_upper(c) || (c >= 'a' && c <= 'z'); }
bool is_hex(char c) { return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F'); }

bool is_num(std::string_view c) {
  std::size_t i = 0;
  if (i < c.size() && (c[i] == '+' || c[i] == '-')) ++i;
  if (c.size() > i + 2 && c[i] == '0' && (c[i + 1] == 'x' || c[i + 1] == 'X')) {
    for (std::size_t j = i + 2; j < c.size(); ++j)
      if (!is_hex(c[j])) return false;
    return true;
  }
  std::size_t start = i;
  while (i < c.size() && is_digit(c[i])) ++i;
  if (i == start) return false;
  if (i == c.size()) return true;
  if (c[i] != '.') return false;
  std::size_t frac = ++i;
  while (i < c.size() && is_digit(c[i])) ++i;
  return i > frac && i == c.size();
}

// Letters joined by single '-' or '_', e.g. "read-only", "non_blocking".
bool is_word_compound(std::string_view c) {
  if (c.empty() || !is_letter(c.front()) || !is_letter(c.back())) return false;
  bool separator = false;
  for (std::size_t i = 0; i < c.size(); ++i) {
    char ch = c[i];
    if (is_letter(ch)) continue;
    if (ch != '-' && ch != '_') return false;
    if (!is_letter(c[i - 1])) return false;
    separator = true;
  }
  return separator;
}

bool is_cl(std::string_view c) {
  bool delim = false;
  std::size_t alnum = 0;
  for (char ch : c) {
    if (in(kDelimiters, ch)) delim = true;
    if (is_letter(ch) || is_digit(ch)) ++alnum;
  }
  return delim && alnum >= 2 && !is_word_compound(c);
}

bool is_ucl(std::string_view c) {
  bool letter = false, digit = false;
  for (char ch : c) {
    if (in(kDelimiters, ch)) return false;
    letter |= is_letter(ch);
    digit |= is_digit(ch);
  }
  return letter && digit;
}

bool is_bl(std::string_view c) {
  return c.size() >= 2 && c.size() <= 5 && std::all_of(c.begin(), c.end(), is_upper);
}

// Single letter attached to a delimiter or bracket. `framed` is the core with
// the nearest prefix and suffix characters around it.
bool is_sl(std::string_view framed) {
  const std::size_t n = framed.size();
  if ((n == 2 || n == 3) && in(kPrefixChars, framed[0]) && is_letter(framed[1]) &&
      (n == 2 || in(kSuffixChars, framed[2])))
    return true;
  if (n == 2 && is_letter(framed[0]) && in(")]>}\"':.", framed[1])) return true;

  std::string_view body = framed;
  if (!body.empty() && in(kPrefixChars, body.front())) body.remove_prefix(1);
  auto delims_only = [](std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) { return in(kDelimiters, ch); });
  };
  auto matches = [&](std::string_view b) {
    if (b.size() < 2) return false;
    if (is_letter(b.front()) && delims_only(b.substr(1))) return true;
    if (is_letter(b.back()) && delims_only(b.substr(0, b.size() - 1))) return true;
    return false;
  };
  if (matches(body)) return true;
  if (!body.empty() && in(kSuffixChars, body.back())) return matches(body.substr(0, body.size() - 1));
  return false;
}

std::string framed_core(const TokenFrame& f) {
  std::string out;
  out.reserve(f.core.size() + 2);
  if (!f.prefix.empty()) out.push_back(f.prefix.back());
  out.append(f.core);
  if (!f.suffix.empty()) out.push_back(f.suffix.front());
  return out;
}

bool wraps_mask_token(const TokenFrame& f) {
  if (f.prefix.empty() || f.suffix.empty()) return false;
  if (f.prefix.back() != '<' || f.suffix.front() != '>') return false;
  if (f.core == "*") return true;
  return parse_mask_name(f.core).has_value();
}

std::optional<MaskKind> classify_native(const TokenFrame& f) {
  const std::string_view c = f.core;
  if (is_num(c)) return MaskKind::num;
  if (is_cl(c)) return MaskKind::cl;
  if (is_ucl(c)) return MaskKind::ucl;
  if (is_bl(c)) return MaskKind::bl;
  if (is_sl(framed_core(f))) return MaskKind::sl;
  return std::nullopt;
}

std::string rebuild(const TokenFrame& f, MaskKind kind) {
  std::string out;
  auto repl = mask_replacement(kind);
  out.reserve(f.prefix.size() + repl.size() + f.suffix.size());
  out.append(f.prefix);
  out.append(repl);
  out.append(f.suffix);
  return out;
}

}  // namespace

std::string_view mask_name(MaskKind kind) {
  switch (kind) {
    case MaskKind::num: return "NUM";
    case MaskKind::cl: return "CL";
    case MaskKind::ucl: return "UCL";
    case MaskKind::bl: return "BL";
    case MaskKind::sl: return "SL";
  }
  return "";
}

std::string_view mask_replacement(MaskKind kind) {
  switch (kind) {
    case MaskKind::num: return "<NUM>";
    case MaskKind::cl: return "<CL>";
    case MaskKind::ucl: return "<UCL>";
    case MaskKind::bl: return "<BL>";
    case MaskKind::sl: return "<SL>";
  }
  return "";
}

std::optional<MaskKind> parse_mask_name(std::string_view name) {
  for (auto kind : kMaskOrder)
    if (mask_name(kind) == name) return kind;
  return std::nullopt;
}

TokenFrame frame_token(std::string_view token) {
  std::size_t begin = 0;
  while (begin < token.size() && in(kPrefixChars, token[begin])) ++begin;
  std::size_t end = token.size();
  while (end > begin && in(kSuffixChars, token[end - 1])) --end;
  return {token.substr(0, begin), token.substr(begin, end - begin), token.substr(end)};
}

bool is_mask_token(std::string_view token) {
  if (token.find('<') == std::string_view::npos) return false;
  return wraps_mask_token(frame_token(token));
}

struct MaskRuleSet::Impl {
  struct Rule {
    MaskKind kind;
    boost::regex pattern;
  };
  std::vector<Rule> rules;
};

const MaskRuleSet& MaskRuleSet::defaults() {
  static const MaskRuleSet rules;
  return rules;
}

MaskRuleSet MaskRuleSet::parse(std::string_view text) {
  auto impl = std::make_shared<Impl>();
  std::istringstream in_stream{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in_stream, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ConfigError("mask rules line " + std::to_string(line_no) + ": expected NAME<TAB>PATTERN");
    auto kind = parse_mask_name(line.substr(0, tab));
    if (!kind)
      throw ConfigError("mask rules line " + std::to_string(line_no) + ": unknown rule '" +
                        line.substr(0, tab) + "'");
    for (const auto& r : impl->rules)
      if (r.kind == *kind)
        throw ConfigError("mask rules line " + std::to_string(line_no) + ": duplicate rule " +
                          std::string(mask_name(*kind)));
    try {
      impl->rules.push_back({*kind, boost::regex(line.substr(tab + 1), boost::regex::perl)});
    } catch (const boost::regex_error& e) {
      throw ConfigError("mask rules line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  std::sort(impl->rules.begin(), impl->rules.end(),
            [](const auto& a, const auto& b) { return a.kind < b.kind; });
  MaskRuleSet out;
  out.impl_ = std::move(impl);
  return out;
}

MaskRuleSet MaskRuleSet::load(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open mask rules file: " + path);
  std::stringstream buf;
  buf << file.rdbuf();
  return parse(buf.str());
}

std::optional<MaskKind> MaskRuleSet::classify(std::string_view token) const {
  TokenFrame f = frame_token(token);
  if (f.core.empty() || wraps_mask_token(f)) return std::nullopt;
  if (!impl_) return classify_native(f);
  for (const auto& rule : impl_->rules) {
    std::string subject = rule.kind == MaskKind::sl ? framed_core(f) : std::string(f.core);
    if (boost::regex_match(subject, rule.pattern)) return rule.kind;
  }
  return std::nullopt;
}

std::string MaskRuleSet::mask_token(std::string_view token) const {
  TokenFrame f = frame_token(token);
  if (f.core.empty() || wraps_mask_token(f)) return std::string(token);
  auto kind = classify(token);
  return kind ? rebuild(f, *kind) : std::string(token);
}

std::string mask_token(std::string_view token) { return MaskRuleSet::defaults().mask_token(token); }

MaskedMessage mask_tokens(const std::vector<std::string>& tokens, const MaskRuleSet& rules) {
  if (tokens.empty()) throw EmptyMessage();
  MaskedMessage out;
  out.key_tokens.reserve(tokens.size());
  for (const auto& t : tokens) out.key_tokens.push_back(rules.mask_token(t));
  out.skeleton = join_tokens(out.key_tokens);
  return out;
}

MaskedMessage mask_message(std::string_view content, const MaskRuleSet& rules) {
  return mask_tokens(split_tokens(content), rules);
}

struct HeaderPattern::Impl {
  boost::regex re;
};

HeaderPattern::HeaderPattern(const std::string& pattern) : pattern_(pattern) {
  if (pattern.find("(?<content>") == std::string::npos &&
      pattern.find("(?P<content>") == std::string::npos)
    throw ConfigError("header pattern needs a named capture group 'content'");
  // Boost spells named groups (?<name>...); accept the Python (?P<name>...) form too.
  std::string translated = pattern;
  for (std::size_t at = translated.find("(?P<"); at != std::string::npos;
       at = translated.find("(?P<", at + 3))
    translated.erase(at + 2, 1);
  auto impl = std::make_shared<Impl>();
  try {
    impl->re = boost::regex(translated, boost::regex::perl);
  } catch (const boost::regex_error& e) {
    throw ConfigError("invalid header pattern: " + std::string(e.what()));
  }
  impl_ = std::move(impl);
}

std::string HeaderPattern::strip(std::string_view raw_line) const {
  boost::match_results<std::string_view::const_iterator> m;
  if (boost::regex_search(raw_line.begin(), raw_line.end(), m, impl_->re,
                          boost::match_continuous)) {
    const auto& body = m["content"];
    if (body.matched) return body.str();
  }
  return std::string(raw_line);
}

std::string strip_header(std::string_view raw_line, const HeaderPattern* header) {
  return header ? header->strip(raw_line) : std::string(raw_line);
}

}  // namespace celerlog
