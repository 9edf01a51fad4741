#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "iscore/estimators.hpp"

namespace iscore {

struct RetentionConfig {
  int group_size = 6;
  long num_groups = 0;        // 0 = enough for >= 20 expected appearances per variable
  int rounds = 1;             // resuscitation rounds
  double top_fraction = 0.05; // share of variables treated as "good"
  int mix_count = 0;          // 0 = group_size / 2
  std::vector<int> stages;    // optional schedule of group sizes
  std::uint64_t seed = 0;
  bool keep_traces = false;
};

struct DropStep {
  int variable;
  double i_before;
  double i_after;
};

struct GroupTrace {
  std::vector<int> group;
  std::vector<DropStep> drops;
  std::vector<int> retained;
  double final_i = 0.0;
  bool weak_singleton = false;  // retained a single variable with I <= 1
};

struct RetainedModule {
  std::vector<int> variables;
  double i_score = 0.0;
  long count = 0;  // how many groups reduced to this module
};

struct RetentionResult {
  std::vector<long> appearances;
  std::vector<long> survivals;
  std::vector<double> i_sum;  // sum of final-module I over groups the variable survived
  std::vector<double> retention_frequency;
  std::vector<std::uint8_t> evaluated;
  std::vector<RetainedModule> modules;  // deduped, sorted by I descending
  std::vector<GroupTrace> traces;       // only when keep_traces
};

/// Iteratively drops the group member whose removal most increases I until no
/// removal increases it. Exact ties drop the lowest variable index. A final
/// singleton is retained when its I is positive.
GroupTrace backward_drop(const LabeledSample& sample, std::vector<int> group);

/// B uniformly sampled k-subsets of {0..m-1}; group g is drawn from the
/// stream forked at (seed, g), so the sequence is independent of evaluation
/// order.
std::vector<std::vector<int>> random_groups(int m, int k, long B, std::uint64_t seed);

/// Backward dropping over many random groups; frequencies normalize survivals
/// by appearances. Honors ISCORE_THREADS for group evaluation (results are
/// identical for any worker count).
RetentionResult retention_scores(const LabeledSample& sample, const RetentionConfig& config);

/// config.rounds extra passes whose groups mix `mix_count` highly ranked
/// variables with draws from the remainder; counts merge with `prior`.
RetentionResult resuscitate(const LabeledSample& sample, const RetentionResult& prior,
                            const RetentionConfig& config);

/// Runs the stage schedule (group sizes) with each stage restricted to the
/// top-ranked survivor pool of the previous one; the last stage runs at
/// config.group_size.
RetentionResult staged_selection(const LabeledSample& sample, const RetentionConfig& config);

/// Evaluated variables ranked by retention frequency, then mean retained
/// module I, then index. The I tiebreak is what makes size-1 stages rankable
/// (nearly every singleton is retained, so frequencies alone tie at 1).
std::vector<int> ranked_variables(const RetentionResult& result);

}  // namespace iscore
