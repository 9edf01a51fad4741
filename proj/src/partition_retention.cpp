#include "iscore/partition_retention.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

#include "iscore/rng.hpp"

namespace iscore {

namespace {

struct CellEntry {
  CellKey key;
  double sum_z;
};

double i_of(const std::vector<CellEntry>& entries, double n0) {
  double s = 0.0;
  for (const auto& e : entries) s += e.sum_z * e.sum_z;
  return s / n0;
}

std::vector<CellEntry> marginalize(const std::vector<CellEntry>& entries, std::size_t pos) {
  std::map<CellKey, double> merged;
  CellKey reduced;
  for (const auto& e : entries) {
    reduced.assign(e.key.begin(), e.key.end());
    reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(pos));
    merged[reduced] += e.sum_z;
  }
  std::vector<CellEntry> out;
  out.reserve(merged.size());
  for (auto& [key, sum_z] : merged) out.push_back({key, sum_z});
  return out;
}

std::vector<CellEntry> build_table(const LabeledSample& sample, std::span<const int> group) {
  const std::size_t n0 = sample.n_rows();
  double mean = 0.0;
  for (double v : sample.y) mean += v;
  mean /= static_cast<double>(n0);
  double var = 0.0;
  for (double v : sample.y) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n0);
  if (var <= 0.0) throw std::domain_error("outcome is constant; I score undefined");
  const double sd = std::sqrt(var);

  std::unordered_map<CellKey, double, CellKeyHash> cells;
  CellKey key(group.size());
  for (std::size_t row = 0; row < n0; ++row) {
    for (std::size_t j = 0; j < group.size(); ++j)
      key[j] = sample.value(row, static_cast<std::size_t>(group[j]));
    const auto it = cells.find(key);
    const double z = (sample.y[row] - mean) / sd;
    if (it == cells.end())
      cells.emplace(key, z);
    else
      it->second += z;
  }
  std::vector<CellEntry> out;
  out.reserve(cells.size());
  for (auto& [k, sum_z] : cells) out.push_back({k, sum_z});
  return out;
}

int num_threads() {
  if (const char* env = std::getenv("ISCORE_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return 1;
}

}  // namespace

GroupTrace backward_drop(const LabeledSample& sample, std::vector<int> group) {
  if (group.empty()) throw std::invalid_argument("backward_drop: empty group");
  std::sort(group.begin(), group.end());
  for (int v : group)
    if (v < 0 || static_cast<std::size_t>(v) >= sample.n_vars)
      throw std::invalid_argument("backward_drop: variable index out of range");

  GroupTrace trace;
  trace.group = group;
  const double n0 = static_cast<double>(sample.n_rows());
  auto entries = build_table(sample, group);
  std::vector<int> cols = group;

  for (;;) {
    const double i_cur = i_of(entries, n0);
    if (cols.size() == 1) {
      trace.final_i = i_cur;
      if (i_cur > 0.0) {
        trace.retained = cols;
        trace.weak_singleton = i_cur <= 1.0;
      }
      return trace;
    }
    double best_i = i_cur;
    std::size_t best_pos = static_cast<std::size_t>(-1);
    std::vector<CellEntry> best_entries;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      auto reduced = marginalize(entries, j);
      const double i_j = i_of(reduced, n0);
      if (i_j > best_i) {  // strict: exact ties keep the lowest index
        best_i = i_j;
        best_pos = j;
        best_entries = std::move(reduced);
      }
    }
    if (best_pos == static_cast<std::size_t>(-1)) {
      trace.retained = cols;
      trace.final_i = i_cur;
      trace.weak_singleton = cols.size() == 1 && i_cur <= 1.0;
      return trace;
    }
    trace.drops.push_back({cols[best_pos], i_cur, best_i});
    cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(best_pos));
    entries = std::move(best_entries);
  }
}

std::vector<std::vector<int>> random_groups(int m, int k, long B, std::uint64_t seed) {
  if (k < 1 || k > m) throw std::invalid_argument("group size must satisfy 1 <= k <= m");
  if (B < 1) throw std::invalid_argument("need at least one group");
  const Rng root(seed);
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(B));
  for (long g = 0; g < B; ++g) {
    Rng rng = root.fork(static_cast<std::uint64_t>(g));
    // Floyd's subset sampling
    std::set<int> chosen;
    for (int j = m - k; j < m; ++j) {
      const int t = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(j) + 1));
      if (!chosen.insert(t).second) chosen.insert(j);
    }
    groups[static_cast<std::size_t>(g)].assign(chosen.begin(), chosen.end());
  }
  return groups;
}

namespace {

void ensure_result_size(RetentionResult& r, std::size_t m) {
  if (r.appearances.size() < m) {
    r.appearances.resize(m, 0);
    r.survivals.resize(m, 0);
    r.i_sum.resize(m, 0.0);
    r.retention_frequency.resize(m, 0.0);
    r.evaluated.resize(m, 0);
  }
}

void refresh_frequencies(RetentionResult& r) {
  for (std::size_t v = 0; v < r.appearances.size(); ++v)
    r.retention_frequency[v] =
        r.appearances[v] > 0
            ? static_cast<double>(r.survivals[v]) / static_cast<double>(r.appearances[v])
            : 0.0;
}

void merge_modules(RetentionResult& r, const GroupTrace& trace) {
  if (trace.retained.empty()) return;
  for (auto& mod : r.modules) {
    if (mod.variables == trace.retained) {
      ++mod.count;
      return;
    }
  }
  r.modules.push_back({trace.retained, trace.final_i, 1});
}

void sort_modules(RetentionResult& r) {
  std::sort(r.modules.begin(), r.modules.end(), [](const auto& a, const auto& b) {
    if (a.i_score != b.i_score) return a.i_score > b.i_score;
    return a.variables < b.variables;
  });
}

// Evaluates groups (possibly in parallel) and folds the outcomes into the
// result in group order, so any worker count gives identical output.
void evaluate_groups(const LabeledSample& sample, const std::vector<std::vector<int>>& groups,
                     bool keep_traces, RetentionResult& result) {
  std::vector<GroupTrace> outcomes(groups.size());
  const int threads = std::min<int>(num_threads(), static_cast<int>(groups.size()));
  if (threads <= 1) {
    for (std::size_t g = 0; g < groups.size(); ++g)
      outcomes[g] = backward_drop(sample, groups[g]);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    std::size_t chunk = (groups.size() + static_cast<std::size_t>(threads) - 1) /
                        static_cast<std::size_t>(threads);
    for (int t = 0; t < threads; ++t) {
      const std::size_t lo = static_cast<std::size_t>(t) * chunk;
      const std::size_t hi = std::min(groups.size(), lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi] {
        for (std::size_t g = lo; g < hi; ++g) outcomes[g] = backward_drop(sample, groups[g]);
      });
    }
    for (auto& th : pool) th.join();
  }

  ensure_result_size(result, sample.n_vars);
  for (auto& trace : outcomes) {
    for (int v : trace.group) {
      ++result.appearances[static_cast<std::size_t>(v)];
      result.evaluated[static_cast<std::size_t>(v)] = 1;
    }
    for (int v : trace.retained) {
      ++result.survivals[static_cast<std::size_t>(v)];
      result.i_sum[static_cast<std::size_t>(v)] += trace.final_i;
    }
    merge_modules(result, trace);
    if (keep_traces) result.traces.push_back(std::move(trace));
  }
  refresh_frequencies(result);
  sort_modules(result);
}

long auto_num_groups(long configured, int m, int k) {
  if (configured > 0) return configured;
  return (20L * m + k - 1) / k;  // expected appearances per variable >= 20
}

}  // namespace

RetentionResult retention_scores(const LabeledSample& sample, const RetentionConfig& config) {
  const int m = static_cast<int>(sample.n_vars);
  const int k = config.group_size;
  if (k < 1 || k > m)
    throw std::invalid_argument("group size must satisfy 1 <= k <= number of variables");
  const long B = auto_num_groups(config.num_groups, m, k);
  const auto groups = random_groups(m, k, B, config.seed);
  RetentionResult result;
  evaluate_groups(sample, groups, config.keep_traces, result);
  return result;
}

std::vector<int> ranked_variables(const RetentionResult& result) {
  std::vector<int> vars;
  for (std::size_t v = 0; v < result.evaluated.size(); ++v)
    if (result.evaluated[v]) vars.push_back(static_cast<int>(v));
  std::sort(vars.begin(), vars.end(), [&](int a, int b) {
    const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
    if (result.retention_frequency[ua] != result.retention_frequency[ub])
      return result.retention_frequency[ua] > result.retention_frequency[ub];
    const double ia = result.survivals[ua] > 0
                          ? result.i_sum[ua] / static_cast<double>(result.survivals[ua])
                          : 0.0;
    const double ib = result.survivals[ub] > 0
                          ? result.i_sum[ub] / static_cast<double>(result.survivals[ub])
                          : 0.0;
    if (ia != ib) return ia > ib;
    return a < b;
  });
  return vars;
}

RetentionResult resuscitate(const LabeledSample& sample, const RetentionResult& prior,
                            const RetentionConfig& config) {
  if (config.rounds <= 0) return prior;
  const int m = static_cast<int>(sample.n_vars);
  const int k = config.group_size;
  const auto ranked = ranked_variables(prior);
  if (ranked.empty()) throw std::invalid_argument("resuscitate: no evaluated variables yet");
  const std::size_t good_size = std::min<std::size_t>(
      ranked.size(),
      std::max<std::size_t>(1, static_cast<std::size_t>(
                                   std::ceil(config.top_fraction * static_cast<double>(m)))));
  std::vector<int> good(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(good_size));
  std::sort(good.begin(), good.end());
  std::vector<std::uint8_t> is_good(static_cast<std::size_t>(m), 0);
  for (int v : good) is_good[static_cast<std::size_t>(v)] = 1;
  std::vector<int> rest;
  for (int v = 0; v < m; ++v)
    if (!is_good[static_cast<std::size_t>(v)]) rest.push_back(v);

  int mix = config.mix_count > 0 ? config.mix_count : k / 2;
  mix = std::min<int>(mix, static_cast<int>(good.size()));
  mix = std::max(mix, k - static_cast<int>(rest.size()));
  if (mix < 1) mix = 1;

  RetentionResult result = prior;
  const Rng root(config.seed);
  const long B = auto_num_groups(config.num_groups, m, k);
  for (int round = 1; round <= config.rounds; ++round) {
    std::vector<std::vector<int>> groups;
    groups.reserve(static_cast<std::size_t>(B));
    for (long g = 0; g < B; ++g) {
      Rng rng = root.fork(0x5e5c0000ULL + static_cast<std::uint64_t>(round),
                          static_cast<std::uint64_t>(g));
      std::set<int> chosen;
      while (static_cast<int>(chosen.size()) < mix)
        chosen.insert(good[rng.uniform_int(good.size())]);
      while (static_cast<int>(chosen.size()) < k && !rest.empty())
        chosen.insert(rest[rng.uniform_int(rest.size())]);
      groups.emplace_back(chosen.begin(), chosen.end());
    }
    evaluate_groups(sample, groups, config.keep_traces, result);
  }
  return result;
}

RetentionResult staged_selection(const LabeledSample& sample, const RetentionConfig& config) {
  const int m = static_cast<int>(sample.n_vars);
  std::vector<int> schedule = config.stages;
  if (schedule.empty()) schedule = {config.group_size};
  if (schedule.back() != config.group_size) schedule.push_back(config.group_size);
  for (int k : schedule)
    if (k < 1 || k > m) throw std::invalid_argument("stage group size out of range");

  std::vector<int> pool(static_cast<std::size_t>(m));
  std::iota(pool.begin(), pool.end(), 0);
  RetentionResult result;
  ensure_result_size(result, sample.n_vars);

  const Rng root(config.seed);
  for (std::size_t stage = 0; stage < schedule.size(); ++stage) {
    const int k = schedule[stage];
    if (static_cast<int>(pool.size()) < k) break;  // pool exhausted, stop early
    const long B = auto_num_groups(config.num_groups, static_cast<int>(pool.size()), k);
    // stage 0 reuses the raw seed, so a one-stage schedule matches retention_scores
    const std::uint64_t stage_seed =
        stage == 0 ? config.seed : root.fork(0x57a6e000ULL + stage).key();
    const auto local = random_groups(static_cast<int>(pool.size()), k, B, stage_seed);
    std::vector<std::vector<int>> groups;
    groups.reserve(local.size());
    for (const auto& g : local) {
      std::vector<int> mapped;
      mapped.reserve(g.size());
      for (int idx : g) mapped.push_back(pool[static_cast<std::size_t>(idx)]);
      groups.push_back(std::move(mapped));
    }
    evaluate_groups(sample, groups, config.keep_traces, result);

    if (stage + 1 == schedule.size()) break;
    const auto ranked = ranked_variables(result);
    std::vector<int> ranked_in_pool;
    std::vector<std::uint8_t> in_pool(static_cast<std::size_t>(m), 0);
    for (int v : pool) in_pool[static_cast<std::size_t>(v)] = 1;
    for (int v : ranked)
      if (in_pool[static_cast<std::size_t>(v)]) ranked_in_pool.push_back(v);
    const std::size_t keep = std::min<std::size_t>(
        ranked_in_pool.size(),
        std::max<std::size_t>(static_cast<std::size_t>(2 * config.group_size),
                              static_cast<std::size_t>(std::ceil(
                                  config.top_fraction * static_cast<double>(pool.size())))));
    if (keep == 0) break;
    pool.assign(ranked_in_pool.begin(),
                ranked_in_pool.begin() + static_cast<std::ptrdiff_t>(keep));
    std::sort(pool.begin(), pool.end());
  }
  return result;
}

}  // namespace iscore
