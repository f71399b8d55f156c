#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace celerlog::synth {

struct CorpusSpec {
  std::size_t template_count = 50;
  // Lines produced from templates, spread evenly over the templates.
  std::size_t templated_lines = 9900;
  // One-off lines made only of constant words, each with a distinct skeleton.
  std::size_t isolated_lines = 100;
  std::size_t min_length = 4;
  std::size_t max_length = 12;
  std::uint64_t seed = 42;
  // Cycle token counts through [min_length, max_length] instead of drawing
  // them at random, so no length holds a disproportionate share of templates.
  bool spread_lengths = true;
  bool shuffle = true;
};

struct Corpus {
  std::vector<std::string> lines;
  // Ground-truth template per line, with "<*>" at parameter slots.
  std::vector<std::string> truth;
  // Index of the template behind each line, or SIZE_MAX for isolated lines.
  std::vector<std::size_t> template_of;
};

// Deterministic for a given spec.
Corpus make_corpus(const CorpusSpec& spec);

// The five "Snapshotting: <hex> to <path>" messages.
std::vector<std::string> snapshot_corpus();

// Three skeleton groups of length 4: an anchor with three distinct messages,
// a one-token variant of it, and an unrelated action.
std::vector<std::string> anchor_bucket_corpus();

}  // namespace celerlog::synth
