#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "iscore/disease_model.hpp"

namespace iscore {

/// Joint value of a variable subset, the key of a contingency cell.
using CellKey = std::vector<int>;

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (int v : k) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

/// Observations on (Y, X): outcomes plus a row-major matrix of discrete
/// explanatory values. Two-class data additionally carries 0/1 class ids
/// (1 = d); its y is the +1/-1 encoding of those ids.
struct LabeledSample {
  std::vector<double> y;
  std::optional<std::vector<std::uint8_t>> classes;  // 1 = d, 0 = h
  std::vector<int> x;  // n_rows x n_vars, row-major
  std::size_t n_vars = 0;
  std::vector<std::string> variable_names;  // optional; empty or size n_vars

  std::size_t n_rows() const { return n_vars == 0 ? 0 : x.size() / n_vars; }
  int value(std::size_t row, std::size_t col) const { return x[row * n_vars + col]; }
  bool two_class() const { return classes.has_value(); }
};

/// Two-class sample from class ids; y becomes +1 for d, -1 for h.
LabeledSample make_two_class_sample(std::vector<std::uint8_t> classes, std::vector<int> x,
                                    std::size_t n_vars,
                                    std::vector<std::string> names = {});

/// General sample with raw real outcomes.
LabeledSample make_regression_sample(std::vector<double> y, std::vector<int> x,
                                     std::size_t n_vars,
                                     std::vector<std::string> names = {});

struct CellCount {
  long n_d = 0;
  long n_h = 0;
};

/// Sparse joint contingency table of a two-class sample on a variable subset.
struct CellCounts {
  std::unordered_map<CellKey, CellCount, CellKeyHash> cells;
  long n_d = 0;
  long n_h = 0;

  /// Cells in lexicographic key order, for deterministic iteration.
  std::vector<std::pair<CellKey, CellCount>> sorted() const;
};

CellCounts cell_counts(const LabeledSample& sample, std::span<const int> subset);

/// Model-known class-conditional cell probabilities, sorted by key.
struct CellDist {
  std::vector<CellKey> keys;
  std::vector<double> f_d;
  std::vector<double> f_h;

  std::size_t size() const { return keys.size(); }
  /// Index of a key, or npos when absent.
  std::size_t find(const CellKey& key) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// 0.5 sum_x min(f_d, f_h) over a cell distribution.
double theta_e(const CellDist& dist);
/// 0.5 sum_x (f_d - f_h)^2.
double theta_I(const CellDist& dist);

/// I = n0^{-1} sum_x (n_x ybar_x)^2 with Y standardized to sample mean 0 and
/// variance 1. Throws on constant Y.
double i_score(const LabeledSample& sample, std::span<const int> subset);

/// Same statistic straight from a two-class cell table.
double i_score(const CellCounts& counts);

/// J = n0^{-1} sum_x n_x ybar_x^2, explained over total variance.
double j_score(const LabeledSample& sample, std::span<const int> subset);

/// Training estimate 0.5 sum_x min(n_dx, n_hx)/n. Requires balanced classes.
double theta_e_train(const CellCounts& counts);

/// Expected bias of the training estimate under known cell probabilities:
/// B_e = -0.5 sum_x min(f_d, f_h) b(n, n max(f_d, f_h), max/min).
double bias_training(const CellDist& dist, long n);

/// Expected bias of the out-of-sample estimate:
/// B_eo = 0.5 sum_x min(f_d, f_h) (r(x) - 1) a(n, n max(f_d, f_h), r(x)).
double bias_oos(const CellDist& dist, long n);

enum class CorrectionMode { oracle, plugin };
enum class CorrectionForm { literal, inverse };

struct CorrectedEstimate {
  double value = 0.0;
  bool coverage_warning = false;  // every cell had a zero count
};

/// Bias-corrected training estimate over cells with min(n_dx, n_hx) > 0.
/// oracle mode reads lambda(x), r(x) from the true distribution; plugin mode
/// substitutes the observed counts. The literal form multiplies each term by
/// (1 - b); the inverse form divides by (1 - b) floored at 0.05. The default
/// (plugin, inverse) is the combination calibrated to reduce |mean bias|.
CorrectedEstimate theta_e_train_corrected(const CellCounts& counts,
                                          const CellDist* dist = nullptr,
                                          CorrectionMode mode = CorrectionMode::plugin,
                                          CorrectionForm form = CorrectionForm::inverse);

/// Expected future error of the majority rule fitted on `counts`, evaluated
/// under the true distribution (ties decided by a fair coin).
double theta_e_oos_oracle(const CellCounts& counts, const CellDist& dist);

/// Out-of-sample estimate minus its expected bias.
double theta_e_oos_corrected(const CellCounts& counts, const CellDist& dist, long n);

/// Empirical error of the majority rule on an independent test sample; ties
/// and unseen cells contribute expected error 0.5.
double holdout_error(const CellCounts& train, const LabeledSample& test,
                     std::span<const int> subset);

/// Plugin evaluation of sum_x (pi_d c_d fhat_d - pi_h c_h fhat_h)^2.
double i_score_weighted(const CellCounts& counts, const CostPriorSpec& spec);

/// E(I) under known cell probabilities: n theta_I + 1 - 0.5 sum(f_d^2 + f_h^2).
double expected_i_score(const CellDist& dist, long n);

}  // namespace iscore
