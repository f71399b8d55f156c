#include "celerlog/synth.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

namespace celerlog::synth {

namespace {

enum class Slot { constant, integer, hex, path, endpoint, block, node };

class WordSource {
 public:
  explicit WordSource(std::mt19937_64& rng) : rng_(rng) {}

  // A fresh lowercase pseudo-word never returned before.
  std::string fresh() {
    static constexpr std::string_view consonants = "bcdfghklmnprstvz";
    static constexpr std::string_view vowels = "aeiou";
    while (true) {
      std::string w;
      const int syllables = 2 + static_cast<int>(rng_() % 2);
      for (int s = 0; s < syllables; ++s) {
        w.push_back(consonants[rng_() % consonants.size()]);
        w.push_back(vowels[rng_() % vowels.size()]);
      }
      if (rng_() % 2) w.push_back(consonants[rng_() % consonants.size()]);
      if (used_.insert(w).second) return w;
    }
  }

 private:
  std::mt19937_64& rng_;
  std::set<std::string> used_;
};

std::string render_slot(Slot slot, const std::string& word, std::mt19937_64& rng) {
  std::ostringstream s;
  switch (slot) {
    case Slot::constant: return word;
    case Slot::integer: s << rng() % 1000000; break;
    case Slot::hex: s << "0x" << std::hex << rng() % 0xFFFFFFFFull; break;
    case Slot::path: s << "/var/" << word << "/part-" << rng() % 100000 << ".dat"; break;
    case Slot::endpoint:
      s << "10." << rng() % 256 << '.' << rng() % 256 << '.' << rng() % 256 << ':' << 1024 + rng() % 60000;
      break;
    case Slot::block: s << "blk_" << rng() % 100000000; break;
    case Slot::node: s << word << rng() % 100000; break;
  }
  return s.str();
}

}  // namespace

Corpus make_corpus(const CorpusSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  WordSource words(rng);
  const std::size_t span = spec.max_length - spec.min_length + 1;

  struct Template {
    std::vector<Slot> slots;
    std::vector<std::string> words;
    std::string truth;
  };
  auto pick_length = [&](std::size_t i) {
    return spec.min_length + (spec.spread_lengths ? i % span : rng() % span);
  };

  std::vector<Template> templates(spec.template_count);
  for (std::size_t k = 0; k < templates.size(); ++k) {
    auto& t = templates[k];
    const std::size_t len = pick_length(k);
    const std::size_t params = 1 + rng() % std::min<std::size_t>(3, len - 1);
    t.slots.assign(len, Slot::constant);
    // Position 0 stays constant so every template starts with a word.
    std::vector<std::size_t> positions(len - 1);
    for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i + 1;
    std::shuffle(positions.begin(), positions.end(), rng);
    for (std::size_t p = 0; p < params; ++p)
      t.slots[positions[p]] = static_cast<Slot>(1 + rng() % 6);
    std::vector<std::string> truth_tokens;
    for (auto slot : t.slots) {
      t.words.push_back(words.fresh());
      truth_tokens.push_back(slot == Slot::constant ? t.words.back() : "<*>");
    }
    std::ostringstream joined;
    for (std::size_t i = 0; i < truth_tokens.size(); ++i) joined << (i ? " " : "") << truth_tokens[i];
    t.truth = joined.str();
  }

  Corpus corpus;
  for (std::size_t i = 0; i < spec.templated_lines && !templates.empty(); ++i) {
    const std::size_t k = i % templates.size();
    const auto& t = templates[k];
    std::string line;
    for (std::size_t p = 0; p < t.slots.size(); ++p) {
      if (p) line.push_back(' ');
      line += render_slot(t.slots[p], t.words[p], rng);
    }
    corpus.lines.push_back(std::move(line));
    corpus.truth.push_back(t.truth);
    corpus.template_of.push_back(k);
  }
  for (std::size_t i = 0; i < spec.isolated_lines; ++i) {
    const std::size_t len = pick_length(i);
    std::string line;
    for (std::size_t p = 0; p < len; ++p) {
      if (p) line.push_back(' ');
      line += words.fresh();
    }
    corpus.truth.push_back(line);
    corpus.lines.push_back(std::move(line));
    corpus.template_of.push_back(SIZE_MAX);
  }

  if (spec.shuffle) {
    std::vector<std::size_t> order(corpus.lines.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    Corpus shuffled;
    for (std::size_t i : order) {
      shuffled.lines.push_back(std::move(corpus.lines[i]));
      shuffled.truth.push_back(std::move(corpus.truth[i]));
      shuffled.template_of.push_back(corpus.template_of[i]);
    }
    corpus = std::move(shuffled);
  }
  return corpus;
}

std::vector<std::string> snapshot_corpus() {
  return {
      "Snapshotting: 0x0 to /data/version-2/snapshot.0",
      "Snapshotting: 0x100001546 to /data/version-2/snapshot.100001546",
      "Snapshotting: 0x200000b1c to /data/version-2/snapshot.200000b1c",
      "Snapshotting: 0x30000001f to /data/version-2/snapshot.30000001f",
      "Snapshotting: 0x400000a07 to /data/version-2/snapshot.400000a07",
  };
}

std::vector<std::string> anchor_bucket_corpus() {
  return {
      "Failed password for user1",
      "Failed password for user2",
      "Failed password for admin7",
      "Failed password for root",
      "Accepted publickey from 10.0.0.1:22",
      "Accepted publickey from 10.0.0.2:22",
  };
}

}  // namespace celerlog::synth
