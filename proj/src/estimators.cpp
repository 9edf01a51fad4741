#include "iscore/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "iscore/exact_binomial.hpp"

namespace iscore {

namespace {

void check_matrix(const std::vector<int>& x, std::size_t n_vars, std::size_t n_rows) {
  if (n_vars == 0) throw std::invalid_argument("sample needs at least one variable");
  if (x.size() != n_vars * n_rows)
    throw std::invalid_argument("x size does not match rows * variables");
}

void check_names(const std::vector<std::string>& names, std::size_t n_vars) {
  if (!names.empty() && names.size() != n_vars)
    throw std::invalid_argument("variable_names must be empty or one per variable");
}

}  // namespace

LabeledSample make_two_class_sample(std::vector<std::uint8_t> classes, std::vector<int> x,
                                    std::size_t n_vars, std::vector<std::string> names) {
  if (classes.empty()) throw std::invalid_argument("sample must be nonempty");
  check_matrix(x, n_vars, classes.size());
  check_names(names, n_vars);
  LabeledSample s;
  s.y.reserve(classes.size());
  for (auto c : classes) {
    if (c > 1) throw std::invalid_argument("class ids must be 0 or 1");
    s.y.push_back(c ? 1.0 : -1.0);
  }
  s.classes = std::move(classes);
  s.x = std::move(x);
  s.n_vars = n_vars;
  s.variable_names = std::move(names);
  return s;
}

LabeledSample make_regression_sample(std::vector<double> y, std::vector<int> x,
                                     std::size_t n_vars, std::vector<std::string> names) {
  if (y.empty()) throw std::invalid_argument("sample must be nonempty");
  check_matrix(x, n_vars, y.size());
  check_names(names, n_vars);
  LabeledSample s;
  s.y = std::move(y);
  s.x = std::move(x);
  s.n_vars = n_vars;
  s.variable_names = std::move(names);
  return s;
}

std::vector<std::pair<CellKey, CellCount>> CellCounts::sorted() const {
  std::vector<std::pair<CellKey, CellCount>> out(cells.begin(), cells.end());
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

namespace {

CellKey subset_key(const LabeledSample& s, std::size_t row, std::span<const int> subset) {
  CellKey key;
  key.reserve(subset.size());
  for (int col : subset) key.push_back(s.value(row, static_cast<std::size_t>(col)));
  return key;
}

void check_subset(const LabeledSample& s, std::span<const int> subset) {
  if (subset.empty()) throw std::invalid_argument("variable subset must be nonempty");
  for (int col : subset)
    if (col < 0 || static_cast<std::size_t>(col) >= s.n_vars)
      throw std::invalid_argument("subset index out of range");
}

}  // namespace

CellCounts cell_counts(const LabeledSample& sample, std::span<const int> subset) {
  check_subset(sample, subset);
  if (!sample.two_class())
    throw std::invalid_argument("cell_counts requires a two-class sample");
  CellCounts out;
  const auto& cls = *sample.classes;
  for (std::size_t row = 0; row < sample.n_rows(); ++row) {
    auto& cell = out.cells[subset_key(sample, row, subset)];
    if (cls[row]) {
      ++cell.n_d;
      ++out.n_d;
    } else {
      ++cell.n_h;
      ++out.n_h;
    }
  }
  return out;
}

std::size_t CellDist::find(const CellKey& key) const {
  const auto it = std::lower_bound(keys.begin(), keys.end(), key);
  if (it == keys.end() || *it != key) return npos;
  return static_cast<std::size_t>(it - keys.begin());
}

double theta_e(const CellDist& dist) {
  double s = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) s += std::min(dist.f_d[i], dist.f_h[i]);
  return 0.5 * s;
}

double theta_I(const CellDist& dist) {
  double s = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double d = dist.f_d[i] - dist.f_h[i];
    s += d * d;
  }
  return 0.5 * s;
}

namespace {

// Per-cell totals of standardized Y, the sufficient statistic for I and J.
struct CellStat {
  long count = 0;
  double sum_z = 0.0;
};

std::vector<CellStat> standardized_cells(const LabeledSample& sample,
                                         std::span<const int> subset) {
  check_subset(sample, subset);
  const std::size_t n0 = sample.n_rows();
  double mean = 0.0;
  for (double v : sample.y) mean += v;
  mean /= static_cast<double>(n0);
  double var = 0.0;
  for (double v : sample.y) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n0);
  if (var <= 0.0) throw std::domain_error("outcome is constant; I score undefined");
  const double sd = std::sqrt(var);

  std::unordered_map<CellKey, CellStat, CellKeyHash> cells;
  for (std::size_t row = 0; row < n0; ++row) {
    auto& c = cells[subset_key(sample, row, subset)];
    ++c.count;
    c.sum_z += (sample.y[row] - mean) / sd;
  }
  std::vector<CellStat> out;
  out.reserve(cells.size());
  for (const auto& [key, stat] : cells) out.push_back(stat);
  return out;
}

}  // namespace

double i_score(const LabeledSample& sample, std::span<const int> subset) {
  const auto cells = standardized_cells(sample, subset);
  const double n0 = static_cast<double>(sample.n_rows());
  double s = 0.0;
  for (const auto& c : cells) s += c.sum_z * c.sum_z;
  return s / n0;
}

double i_score(const CellCounts& counts) {
  const double n0 = static_cast<double>(counts.n_d + counts.n_h);
  if (n0 == 0.0) throw std::invalid_argument("empty cell table");
  if (counts.n_d == 0 || counts.n_h == 0)
    throw std::domain_error("outcome is constant; I score undefined");
  // standardized +1/-1 labels: z_d and z_h make each cell sum exact
  const double mean = (counts.n_d - counts.n_h) / n0;
  const double sd = std::sqrt(1.0 - mean * mean);
  const double z_d = (1.0 - mean) / sd;
  const double z_h = (-1.0 - mean) / sd;
  double s = 0.0;
  for (const auto& [key, c] : counts.cells) {
    const double sum_z = c.n_d * z_d + c.n_h * z_h;
    s += sum_z * sum_z;
  }
  return s / n0;
}

double j_score(const LabeledSample& sample, std::span<const int> subset) {
  const auto cells = standardized_cells(sample, subset);
  const double n0 = static_cast<double>(sample.n_rows());
  double s = 0.0;
  for (const auto& c : cells) s += c.sum_z * c.sum_z / static_cast<double>(c.count);
  return s / n0;
}

double theta_e_train(const CellCounts& counts) {
  if (counts.n_d != counts.n_h)
    throw std::invalid_argument(
        "training estimate requires balanced classes (n_d == n_h); subsample or "
        "reweight before calling");
  if (counts.n_d == 0) throw std::invalid_argument("empty cell table");
  long s = 0;
  for (const auto& [key, c] : counts.cells) s += std::min(c.n_d, c.n_h);
  return 0.5 * static_cast<double>(s) / static_cast<double>(counts.n_d);
}

double bias_training(const CellDist& dist, long n) {
  double s = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double mn = std::min(dist.f_d[i], dist.f_h[i]);
    if (mn <= 0.0) continue;
    const double mx = std::max(dist.f_d[i], dist.f_h[i]);
    s += mn * exact_binomial::neg_rel_bias(static_cast<int>(n),
                                           static_cast<double>(n) * mx, mx / mn);
  }
  return -0.5 * s;
}

double bias_oos(const CellDist& dist, long n) {
  double s = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double mn = std::min(dist.f_d[i], dist.f_h[i]);
    const double mx = std::max(dist.f_d[i], dist.f_h[i]);
    if (mn <= 0.0 || mx == mn) continue;
    const double r = mx / mn;
    s += mn * (r - 1.0) *
         exact_binomial::tie_half_prob(static_cast<int>(n), static_cast<double>(n) * mx, r);
  }
  return 0.5 * s;
}

CorrectedEstimate theta_e_train_corrected(const CellCounts& counts, const CellDist* dist,
                                          CorrectionMode mode, CorrectionForm form) {
  if (counts.n_d != counts.n_h)
    throw std::invalid_argument(
        "corrected training estimate requires balanced classes (n_d == n_h)");
  if (mode == CorrectionMode::oracle && dist == nullptr)
    throw std::invalid_argument("oracle correction requires the true cell distribution");
  const long n = counts.n_d;
  CorrectedEstimate out;
  double s = 0.0;
  bool any = false;
  for (const auto& [key, c] : counts.sorted()) {
    const long mn_count = std::min(c.n_d, c.n_h);
    if (mn_count == 0) continue;
    any = true;
    double lambda, r;
    if (mode == CorrectionMode::oracle) {
      const std::size_t i = dist->find(key);
      if (i == CellDist::npos)
        throw std::logic_error("observed cell missing from the true distribution");
      const double mn = std::min(dist->f_d[i], dist->f_h[i]);
      const double mx = std::max(dist->f_d[i], dist->f_h[i]);
      lambda = static_cast<double>(n) * mx;
      r = mx / mn;
    } else {
      const long mx_count = std::max(c.n_d, c.n_h);
      lambda = static_cast<double>(mx_count);
      r = static_cast<double>(mx_count) / static_cast<double>(mn_count);
    }
    const double b = exact_binomial::neg_rel_bias(static_cast<int>(n), lambda, r);
    const double term = static_cast<double>(mn_count) / static_cast<double>(n);
    if (form == CorrectionForm::literal)
      s += term * (1.0 - b);
    else
      s += term / std::max(1.0 - b, 0.05);
  }
  out.value = 0.5 * s;
  out.coverage_warning = !any;
  return out;
}

double theta_e_oos_oracle(const CellCounts& counts, const CellDist& dist) {
  double s = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    long n_d = 0, n_h = 0;
    const auto it = counts.cells.find(dist.keys[i]);
    if (it != counts.cells.end()) {
      n_d = it->second.n_d;
      n_h = it->second.n_h;
    }
    if (n_d < n_h)
      s += dist.f_d[i];
    else if (n_d > n_h)
      s += dist.f_h[i];
    else
      s += 0.5 * (dist.f_d[i] + dist.f_h[i]);
  }
  return 0.5 * s;
}

double theta_e_oos_corrected(const CellCounts& counts, const CellDist& dist, long n) {
  return theta_e_oos_oracle(counts, dist) - bias_oos(dist, n);
}

double holdout_error(const CellCounts& train, const LabeledSample& test,
                     std::span<const int> subset) {
  check_subset(test, subset);
  if (!test.two_class()) throw std::invalid_argument("holdout_error requires two-class data");
  if (test.n_rows() == 0) throw std::invalid_argument("empty test sample");
  const auto& cls = *test.classes;
  double err = 0.0;
  for (std::size_t row = 0; row < test.n_rows(); ++row) {
    const auto it = train.cells.find(subset_key(test, row, subset));
    long n_d = 0, n_h = 0;
    if (it != train.cells.end()) {
      n_d = it->second.n_d;
      n_h = it->second.n_h;
    }
    if (n_d == n_h) {
      err += 0.5;
    } else {
      const bool predict_d = n_d > n_h;
      if (predict_d != (cls[row] != 0)) err += 1.0;
    }
  }
  return err / static_cast<double>(test.n_rows());
}

double i_score_weighted(const CellCounts& counts, const CostPriorSpec& spec) {
  if (counts.n_d == 0 || counts.n_h == 0)
    throw std::invalid_argument("weighted I needs observations in both classes");
  if (std::abs(spec.pi_h + spec.pi_d - 1.0) > 1e-12)
    throw std::invalid_argument("priors pi_h + pi_d must sum to 1");
  if (spec.c_h < 0.0 || spec.c_d < 0.0)
    throw std::invalid_argument("costs must be nonnegative");
  double s = 0.0;
  for (const auto& [key, c] : counts.cells) {
    const double fd = static_cast<double>(c.n_d) / static_cast<double>(counts.n_d);
    const double fh = static_cast<double>(c.n_h) / static_cast<double>(counts.n_h);
    const double d = spec.pi_d * spec.c_d * fd - spec.pi_h * spec.c_h * fh;
    s += d * d;
  }
  return s;
}

double expected_i_score(const CellDist& dist, long n) {
  double sq = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i)
    sq += dist.f_d[i] * dist.f_d[i] + dist.f_h[i] * dist.f_h[i];
  return static_cast<double>(n) * theta_I(dist) + 1.0 - 0.5 * sq;
}

}  // namespace iscore
