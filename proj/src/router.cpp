#include "celerlog/router.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "celerlog/parallel.hpp"

namespace celerlog {

namespace {

double snap_to_grid(double v) { return std::round(v * 1e9) / 1e9; }

bool is_subset(const std::set<std::string>& a, const std::set<std::string>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

std::vector<SkeletonGroup> group_by_skeleton(std::span<const LogRecord> records,
                                             const MaskRuleSet& rules, std::size_t jobs) {
  std::vector<std::string> skeletons(records.size());
  parallel_chunks(records.size(), jobs, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      skeletons[i] = mask_tokens(records[i].tokens, rules).skeleton;
  });

  std::unordered_map<std::string_view, std::size_t> index;
  std::vector<SkeletonGroup> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [it, inserted] = index.try_emplace(skeletons[i], groups.size());
    if (inserted) {
      SkeletonGroup g;
      g.key = skeletons[i];
      groups.push_back(std::move(g));
    }
    auto& g = groups[it->second];
    g.record_ids.push_back(records[i].line_id);
    g.members.push_back(records[i].content);
  }

  parallel_chunks(groups.size(), jobs, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto& g = groups[i];
      g.key_tokens = split_tokens(g.key);
      std::sort(g.members.begin(), g.members.end());
      g.members.erase(std::unique(g.members.begin(), g.members.end()), g.members.end());
      std::sort(g.record_ids.begin(), g.record_ids.end());
    }
  }, 64);

  std::sort(groups.begin(), groups.end(),
            [](const SkeletonGroup& a, const SkeletonGroup& b) { return a.key < b.key; });
  return groups;
}

std::vector<LogBucket> bucket_by_length(std::vector<SkeletonGroup> groups) {
  std::vector<LogBucket> buckets;
  std::unordered_map<std::size_t, std::size_t> index;
  for (auto& g : groups) {
    auto [it, inserted] = index.try_emplace(g.length(), buckets.size());
    if (inserted) buckets.push_back(LogBucket{g.length(), {}});
    buckets[it->second].groups.push_back(std::move(g));
  }
  std::sort(buckets.begin(), buckets.end(),
            [](const LogBucket& a, const LogBucket& b) { return a.length < b.length; });
  return buckets;
}

double pos_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.size() != b.size())
    throw InternalInvariant("pos_jaccard on keys of different lengths (" +
                            std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  if (a.empty()) return 1.0;
  std::size_t matches = 0;
  for (std::size_t i = 0; i < a.size(); ++i) matches += a[i] == b[i];
  const auto len = static_cast<double>(a.size());
  const auto m = static_cast<double>(matches);
  return m / (2.0 * len - m);
}

double singleton_ratio(std::span<const double> similarities, double tau) {
  if (similarities.empty()) return 0.0;
  std::size_t below = 0;
  for (double s : similarities) below += s < tau - kSimilarityEpsilon;
  return static_cast<double>(below) / static_cast<double>(similarities.size());
}

double select_threshold(std::span<const double> similarities, const RouterConfig& config) {
  std::vector<double> sorted(similarities.begin(), similarities.end());
  std::sort(sorted.begin(), sorted.end());
  auto ratio_at = [&](double tau) {
    if (sorted.empty()) return 0.0;
    auto below = std::lower_bound(sorted.begin(), sorted.end(), tau - kSimilarityEpsilon) -
                 sorted.begin();
    return static_cast<double>(below) / static_cast<double>(sorted.size());
  };

  const auto steps = static_cast<std::size_t>(
      std::floor((config.tau_max - config.tau_min) / config.tau_step + 1e-9));
  double previous = config.tau_min;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double tau = snap_to_grid(config.tau_min + static_cast<double>(i) * config.tau_step);
    if (ratio_at(tau) >= config.p_quantile - kSimilarityEpsilon)
      return i == 0 ? config.tau_min : previous;
    previous = tau;
  }
  return config.tau_max;
}

BucketOutcome merge_bucket(const LogBucket& bucket, const RouterConfig& config,
                           const VerbLexicon& lexicon, bool keep_trace) {
  BucketOutcome out;
  if (bucket.length <= config.bypass_length || bucket.groups.size() <= config.bypass_group_count) {
    out.bypassed = true;
    for (const auto& g : bucket.groups) out.dense.push_back(DenseGroup{{g}, std::nullopt});
    return out;
  }

  out.k_limit = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(config.alpha * static_cast<double>(bucket.groups.size()) + 1e-12)));

  std::vector<std::size_t> remaining(bucket.groups.size());
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;
  std::sort(remaining.begin(), remaining.end(), [&](std::size_t a, std::size_t b) {
    const auto& ga = bucket.groups[a];
    const auto& gb = bucket.groups[b];
    if (ga.unique_count() != gb.unique_count()) return ga.unique_count() > gb.unique_count();
    return ga.key < gb.key;
  });

  std::vector<std::set<std::string>> verbs(bucket.groups.size());
  for (std::size_t i = 0; i < bucket.groups.size(); ++i)
    verbs[i] = extract_verbs(bucket.groups[i].key, lexicon);

  std::vector<double> scores;
  while (!remaining.empty() && out.dense.size() < out.k_limit) {
    const std::size_t anchor = remaining.front();
    const auto& anchor_group = bucket.groups[anchor];

    MergeState state;
    state.anchor = anchor_group.key;
    state.anchor_unique_count = anchor_group.unique_count();
    state.k_limit = out.k_limit;

    scores.clear();
    for (std::size_t j = 1; j < remaining.size(); ++j) {
      const auto& cand = bucket.groups[remaining[j]];
      double s = pos_jaccard(anchor_group.key_tokens, cand.key_tokens);
      scores.push_back(s);
      if (keep_trace) state.similarities.emplace_back(cand.key, s);
    }
    state.tau = select_threshold(scores, config);

    DenseGroup dense;
    dense.anchor_key = anchor_group.key;
    dense.member_groups.push_back(anchor_group);
    std::vector<std::size_t> left;
    left.reserve(remaining.size());
    for (std::size_t j = 1; j < remaining.size(); ++j) {
      const std::size_t c = remaining[j];
      if (scores[j - 1] >= state.tau - kSimilarityEpsilon && is_subset(verbs[anchor], verbs[c])) {
        dense.member_groups.push_back(bucket.groups[c]);
        if (keep_trace) state.merged.push_back(bucket.groups[c].key);
      } else {
        left.push_back(c);
      }
    }
    out.dense.push_back(std::move(dense));
    state.dense_emitted = out.dense.size();
    if (keep_trace) out.rounds.push_back(std::move(state));
    remaining = std::move(left);
  }

  std::sort(remaining.begin(), remaining.end(),
            [&](std::size_t a, std::size_t b) { return bucket.groups[a].key < bucket.groups[b].key; });
  for (std::size_t i : remaining) out.sparse.push_back(SparseGroup{bucket.groups[i]});
  return out;
}

RoutingResult route(std::span<const LogRecord> records, const RouterConfig& config,
                    const VerbLexicon& lexicon, const MaskRuleSet& rules) {
  config.validate();
  RoutingResult result;
  result.stats.record_count = records.size();
  if (records.empty()) return result;

  auto groups = group_by_skeleton(records, rules, config.jobs);
  result.stats.skeleton_group_count = groups.size();
  auto buckets = bucket_by_length(std::move(groups));
  result.stats.bucket_count = buckets.size();

  auto outcomes = parallel_map_buckets(buckets, config.jobs, [&](const LogBucket& bucket) {
    return merge_bucket(bucket, config, lexicon);
  });

  for (auto& o : outcomes) {
    result.stats.bypassed_bucket_count += o.bypassed;
    for (auto& d : o.dense) {
      result.stats.dense_record_count += d.record_count();
      result.dense.push_back(std::move(d));
    }
    for (auto& s : o.sparse) {
      result.stats.sparse_record_count += s.group.record_ids.size();
      result.sparse.push_back(std::move(s));
    }
  }
  result.stats.dense_group_count = result.dense.size();
  result.stats.sparse_group_count = result.sparse.size();
  return result;
}

}  // namespace celerlog
