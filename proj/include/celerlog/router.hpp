#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "celerlog/masker.hpp"
#include "celerlog/model.hpp"
#include "celerlog/verbs.hpp"

namespace celerlog {

// Two scores closer than this are treated as equal when compared against a
// threshold, so 3/5 meets a threshold of 0.60.
inline constexpr double kSimilarityEpsilon = 1e-9;

// One anchor round of the merging loop.
struct MergeState {
  std::string anchor;
  std::size_t anchor_unique_count = 0;
  // Candidate key -> position-aware Jaccard score, in candidate order.
  std::vector<std::pair<std::string, double>> similarities;
  double tau = 0.0;
  std::size_t k_limit = 0;
  std::size_t dense_emitted = 0;
  std::vector<std::string> merged;
};

struct BucketOutcome {
  std::vector<DenseGroup> dense;
  std::vector<SparseGroup> sparse;
  bool bypassed = false;
  std::size_t k_limit = 0;
  std::vector<MergeState> rounds;
};

struct RoutingStats {
  std::size_t record_count = 0;
  std::size_t skeleton_group_count = 0;
  std::size_t bucket_count = 0;
  std::size_t bypassed_bucket_count = 0;
  std::size_t dense_group_count = 0;
  std::size_t sparse_group_count = 0;
  std::size_t dense_record_count = 0;
  std::size_t sparse_record_count = 0;

  bool operator==(const RoutingStats&) const = default;
};

struct RoutingResult {
  std::vector<DenseGroup> dense;
  std::vector<SparseGroup> sparse;
  RoutingStats stats;
};

// Groups sorted by key. Masking runs on up to `jobs` threads.
std::vector<SkeletonGroup> group_by_skeleton(std::span<const LogRecord> records,
                                             const MaskRuleSet& rules = MaskRuleSet::defaults(),
                                             std::size_t jobs = 1);

// Buckets sorted by length; groups keep their input order.
std::vector<LogBucket> bucket_by_length(std::vector<SkeletonGroup> groups);

// |matching (position, token) pairs| / |union|. Keys must have equal length.
double pos_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Fraction of candidate scores strictly below tau; 0 for no candidates.
double singleton_ratio(std::span<const double> similarities, double tau);

// Sweeps tau upward over the configured grid and returns the grid value just
// before the singleton ratio first reaches p_quantile.
double select_threshold(std::span<const double> similarities, const RouterConfig& config);

// Anchor-based merging of one bucket. With keep_trace, every anchor round is
// recorded in BucketOutcome::rounds.
BucketOutcome merge_bucket(const LogBucket& bucket, const RouterConfig& config,
                           const VerbLexicon& lexicon = VerbLexicon::defaults(),
                           bool keep_trace = false);

RoutingResult route(std::span<const LogRecord> records, const RouterConfig& config,
                    const VerbLexicon& lexicon = VerbLexicon::defaults(),
                    const MaskRuleSet& rules = MaskRuleSet::defaults());

}  // namespace celerlog
