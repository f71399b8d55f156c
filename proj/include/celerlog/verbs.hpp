#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>

namespace celerlog {

// Set of English verb lemmas with a suffix-stripping lemmatizer for
// -ing / -ed / -s forms.
class VerbLexicon {
 public:
  // The bundled list from data/verbs.txt.
  static const VerbLexicon& defaults();
  // One lowercase lemma per line; blank lines and '#' comments ignored.
  static VerbLexicon parse(std::string_view text);
  static VerbLexicon load(const std::string& path);

  bool contains(std::string_view lemma) const;
  // Lemma of `word` if it is a known verb form. `word` must already be
  // lowercase letters only.
  std::optional<std::string> lemmatize(std::string_view word) const;
  std::size_t size() const { return lemmas_.size(); }

 private:
  std::unordered_set<std::string> lemmas_;
};

// Verb lemmas present in a skeleton key. Mask tokens never count.
std::set<std::string> extract_verbs(std::string_view key,
                                    const VerbLexicon& lexicon = VerbLexicon::defaults());

}  // namespace celerlog
