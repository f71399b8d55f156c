#include "celerlog/verbs.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "celerlog/fixtures.hpp"
#include "celerlog/masker.hpp"
#include "celerlog/model.hpp"

namespace celerlog {

namespace {

bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_alpha(char c) { return is_lower(c) || (c >= 'A' && c <= 'Z'); }
bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

}  // namespace

const VerbLexicon& VerbLexicon::defaults() {
  static const VerbLexicon lexicon = parse(fixtures::default_verb_lexicon());
  return lexicon;
}

VerbLexicon VerbLexicon::parse(std::string_view text) {
  VerbLexicon out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = split_tokens(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    std::string lemma = tokens.front();
    std::transform(lemma.begin(), lemma.end(), lemma.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    out.lemmas_.insert(std::move(lemma));
  }
  return out;
}

VerbLexicon VerbLexicon::load(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open verb lexicon: " + path);
  std::stringstream buf;
  buf << file.rdbuf();
  return parse(buf.str());
}

bool VerbLexicon::contains(std::string_view lemma) const {
  return lemmas_.find(std::string(lemma)) != lemmas_.end();
}

std::optional<std::string> VerbLexicon::lemmatize(std::string_view word) const {
  if (word.empty()) return std::nullopt;
  if (contains(word)) return std::string(word);

  auto try_stem = [&](std::string_view stem) -> std::optional<std::string> {
    if (stem.size() < 2) return std::nullopt;
    std::string s(stem);
    if (contains(s)) return s;
    if (contains(s + "e")) return s + "e";
    // stopped -> stop, running -> run
    if (s.size() >= 3 && s[s.size() - 1] == s[s.size() - 2] && !is_vowel(s.back())) {
      s.pop_back();
      if (contains(s)) return s;
    }
    return std::nullopt;
  };
  auto ends_with = [&](std::string_view suffix) {
    return word.size() > suffix.size() && word.substr(word.size() - suffix.size()) == suffix;
  };

  if (ends_with("ing")) return try_stem(word.substr(0, word.size() - 3));
  if (ends_with("ied")) {
    std::string s(word.substr(0, word.size() - 3));
    s += 'y';
    if (contains(s)) return s;
  }
  if (ends_with("ed")) return try_stem(word.substr(0, word.size() - 2));
  if (ends_with("ies")) {
    std::string s(word.substr(0, word.size() - 3));
    s += 'y';
    if (contains(s)) return s;
  }
  if (ends_with("es")) {
    std::string s(word.substr(0, word.size() - 2));
    if (contains(s)) return s;
  }
  if (ends_with("s")) {
    std::string s(word.substr(0, word.size() - 1));
    if (contains(s)) return s;
  }
  return std::nullopt;
}

std::set<std::string> extract_verbs(std::string_view key, const VerbLexicon& lexicon) {
  std::set<std::string> verbs;
  for (const auto& token : split_tokens(key)) {
    if (is_mask_token(token)) continue;
    std::string_view t = token;
    while (!t.empty() && !is_alpha(t.front())) t.remove_prefix(1);
    while (!t.empty() && !is_alpha(t.back())) t.remove_suffix(1);
    if (t.empty() || !std::all_of(t.begin(), t.end(), is_alpha)) continue;
    std::string word(t);
    std::transform(word.begin(), word.end(), word.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (auto lemma = lexicon.lemmatize(word)) verbs.insert(std::move(*lemma));
  }
  return verbs;
}

}  // namespace celerlog
