#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "iscore/estimators.hpp"
#include "iscore/rng.hpp"
#include "iscore/simulator.hpp"

using namespace iscore;

namespace {

// 2 cases at x=1, 2 controls at x=0
LabeledSample toy_sample() {
  return make_two_class_sample({1, 1, 0, 0}, {1, 1, 0, 0}, 1);
}

LabeledSample random_two_class(Rng& rng, std::size_t n_per_class, std::size_t n_vars,
                               int alphabet = 3) {
  std::vector<std::uint8_t> classes;
  std::vector<int> x;
  for (std::size_t i = 0; i < 2 * n_per_class; ++i) {
    classes.push_back(i < n_per_class ? 1 : 0);
    for (std::size_t j = 0; j < n_vars; ++j)
      x.push_back(static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(alphabet))));
  }
  return make_two_class_sample(std::move(classes), std::move(x), n_vars);
}

}  // namespace

TEST_CASE("cell_counts on the toy sample") {
  const auto counts = cell_counts(toy_sample(), std::vector<int>{0});
  REQUIRE(counts.cells.size() == 2);
  CHECK(counts.n_d == 2);
  CHECK(counts.n_h == 2);
  CHECK(counts.cells.at({1}).n_d == 2);
  CHECK(counts.cells.at({1}).n_h == 0);
  CHECK(counts.cells.at({0}).n_d == 0);
  CHECK(counts.cells.at({0}).n_h == 2);
}

TEST_CASE("cell_counts is invariant to subject order") {
  Rng rng(5);
  auto sample = random_two_class(rng, 40, 3);
  const auto before = cell_counts(sample, std::vector<int>{0, 2}).sorted();

  // permute rows
  std::vector<std::size_t> perm(sample.n_rows());
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size(); i > 1; --i)
    std::swap(perm[i - 1], perm[rng.uniform_int(i)]);
  LabeledSample shuffled = sample;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    (*shuffled.classes)[i] = (*sample.classes)[perm[i]];
    shuffled.y[i] = sample.y[perm[i]];
    for (std::size_t j = 0; j < sample.n_vars; ++j)
      shuffled.x[i * sample.n_vars + j] = sample.x[perm[i] * sample.n_vars + j];
  }
  const auto after = cell_counts(shuffled, std::vector<int>{0, 2}).sorted();
  REQUIRE(before.size() == after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(before[i].first == after[i].first);
    CHECK(before[i].second.n_d == after[i].second.n_d);
    CHECK(before[i].second.n_h == after[i].second.n_h);
  }
}

TEST_CASE("cell_counts input contracts") {
  CHECK_THROWS_AS(cell_counts(toy_sample(), std::vector<int>{}), std::invalid_argument);
  CHECK_THROWS_AS(cell_counts(toy_sample(), std::vector<int>{3}), std::invalid_argument);
  const auto reg = make_regression_sample({0.1, 0.2}, {0, 1}, 1);
  CHECK_THROWS_AS(cell_counts(reg, std::vector<int>{0}), std::invalid_argument);
}

TEST_CASE("i_score hand values") {
  CHECK(i_score(toy_sample(), std::vector<int>{0}) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(i_score(cell_counts(toy_sample(), std::vector<int>{0})) ==
        doctest::Approx(2.0).epsilon(1e-12));

  // identical per-cell counts => I = 0
  const auto sample = make_two_class_sample({1, 1, 0, 0}, {0, 1, 0, 1}, 1);
  CHECK(i_score(sample, std::vector<int>{0}) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("i_score ignores affine relabeling of the outcome") {
  Rng rng(11);
  const auto sample = random_two_class(rng, 50, 2);
  const double base = i_score(sample, std::vector<int>{0, 1});
  std::vector<double> scaled;
  for (double v : sample.y) scaled.push_back(3.0 * v + 7.0);
  const auto affine = make_regression_sample(std::move(scaled), sample.x, sample.n_vars);
  CHECK(i_score(affine, std::vector<int>{0, 1}) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("balanced two-class I equals the count formula") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto sample = random_two_class(rng, 30, 2);
    const auto counts = cell_counts(sample, std::vector<int>{0, 1});
    const double general = i_score(sample, std::vector<int>{0, 1});
    double direct = 0.0;
    for (const auto& [key, c] : counts.cells) {
      const double d = static_cast<double>(c.n_d - c.n_h);
      direct += d * d;
    }
    direct *= 0.5 / static_cast<double>(counts.n_d);
    CHECK(general == doctest::Approx(direct).epsilon(1e-12));
    CHECK(i_score(counts) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("i_score rejects a constant outcome") {
  const auto sample = make_regression_sample({1.0, 1.0, 1.0}, {0, 1, 2}, 1);
  CHECK_THROWS_AS(i_score(sample, std::vector<int>{0}), std::domain_error);
}

TEST_CASE("j_score") {
  // a single cell explains nothing
  const auto one_cell = make_two_class_sample({1, 0}, {5, 5}, 1);
  CHECK(j_score(one_cell, std::vector<int>{0}) == doctest::Approx(0.0).epsilon(1e-12));
  // fully separated cells explain everything
  CHECK(j_score(toy_sample(), std::vector<int>{0}) == doctest::Approx(1.0).epsilon(1e-12));
  Rng rng(13);
  const auto sample = random_two_class(rng, 40, 2);
  const double j = j_score(sample, std::vector<int>{0, 1});
  CHECK(j >= 0.0);
  CHECK(j <= 1.0 + 1e-12);
}

TEST_CASE("training estimate") {
  CHECK(theta_e_train(cell_counts(toy_sample(), std::vector<int>{0})) == 0.0);
  const auto tied = make_two_class_sample({1, 1, 0, 0}, {0, 1, 0, 1}, 1);
  CHECK(theta_e_train(cell_counts(tied, std::vector<int>{0})) ==
        doctest::Approx(0.5).epsilon(1e-12));
  const auto unbalanced = make_two_class_sample({1, 0, 0}, {0, 0, 1}, 1);
  CHECK_THROWS_AS(theta_e_train(cell_counts(unbalanced, std::vector<int>{0})),
                  std::invalid_argument);
}

TEST_CASE("bias formulas on equal distributions") {
  CellDist dist;
  dist.keys = {{0}, {1}, {2}};
  dist.f_d = {0.5, 0.3, 0.2};
  dist.f_h = {0.5, 0.3, 0.2};
  const long n = 50;
  // direct evaluation with r = 1 cells
  double direct = 0.0;
  for (double f : dist.f_d)
    direct += f * exact_binomial::neg_rel_bias(static_cast<int>(n), n * f, 1.0);
  CHECK(bias_training(dist, n) == doctest::Approx(-0.5 * direct).epsilon(1e-12));
  CHECK(bias_training(dist, n) < 0.0);
  CHECK(bias_oos(dist, n) == 0.0);
}

TEST_CASE("corrected estimate returns zero with a coverage warning when separated") {
  const auto counts = cell_counts(toy_sample(), std::vector<int>{0});
  const auto corrected = theta_e_train_corrected(counts);
  CHECK(corrected.value == 0.0);
  CHECK(corrected.coverage_warning);
}

TEST_CASE("corrected estimate modes and forms move in the right directions") {
  Rng rng(17);
  const auto sample = random_two_class(rng, 100, 1, 4);
  const auto counts = cell_counts(sample, std::vector<int>{0});
  const double train = theta_e_train(counts);
  const auto inv = theta_e_train_corrected(counts, nullptr, CorrectionMode::plugin,
                                           CorrectionForm::inverse);
  const auto lit = theta_e_train_corrected(counts, nullptr, CorrectionMode::plugin,
                                           CorrectionForm::literal);
  CHECK(inv.value >= train - 1e-12);   // dividing by (1-b) can only grow terms
  CHECK(lit.value <= train + 1e-12);   // multiplying can only shrink them
  CHECK_THROWS_AS(theta_e_train_corrected(counts, nullptr, CorrectionMode::oracle,
                                          CorrectionForm::inverse),
                  std::invalid_argument);
}

TEST_CASE("out-of-sample estimator equals theta_e when the rule matches the oracle rule") {
  CellDist dist;
  dist.keys = {{0}, {1}};
  dist.f_d = {0.2, 0.8};
  dist.f_h = {0.7, 0.3};
  CellCounts counts;
  counts.cells[{0}] = {1, 5};  // n_dx < n_hx exactly where f_d < f_h
  counts.cells[{1}] = {5, 1};
  counts.n_d = counts.n_h = 6;
  CHECK(theta_e_oos_oracle(counts, dist) == doctest::Approx(theta_e(dist)).epsilon(1e-12));
}

TEST_CASE("out-of-sample estimator is one half when every cell ties") {
  CellDist dist;
  dist.keys = {{0}, {1}};
  dist.f_d = {0.2, 0.8};
  dist.f_h = {0.7, 0.3};
  CellCounts counts;
  counts.cells[{0}] = {2, 2};
  counts.cells[{1}] = {3, 3};
  counts.n_d = counts.n_h = 5;
  CHECK(theta_e_oos_oracle(counts, dist) == doctest::Approx(0.5).epsilon(1e-12));
  // unseen cells count as ties too
  CellCounts empty;
  CHECK(theta_e_oos_oracle(empty, dist) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("oos corrected subtracts the analytic bias") {
  CellDist dist;
  dist.keys = {{0}, {1}};
  dist.f_d = {0.2, 0.8};
  dist.f_h = {0.7, 0.3};
  CellCounts counts;
  counts.cells[{0}] = {1, 5};
  counts.cells[{1}] = {5, 1};
  counts.n_d = counts.n_h = 6;
  CHECK(theta_e_oos_corrected(counts, dist, 6) ==
        doctest::Approx(theta_e_oos_oracle(counts, dist) - bias_oos(dist, 6)).epsilon(1e-12));
}

TEST_CASE("holdout error") {
  const auto train = cell_counts(toy_sample(), std::vector<int>{0});
  CHECK(holdout_error(train, toy_sample(), std::vector<int>{0}) == 0.0);
  // unseen cell contributes one half
  const auto unseen = make_two_class_sample({1, 0}, {7, 7}, 1);
  CHECK(holdout_error(train, unseen, std::vector<int>{0}) == doctest::Approx(0.5));
  const auto empty_test = make_two_class_sample({1}, {0}, 1);
  CHECK_THROWS_AS(holdout_error(train, make_regression_sample({0.5}, {0}, 1),
                                std::vector<int>{0}),
                  std::invalid_argument);
}

TEST_CASE("holdout error tracks the out-of-sample expectation on model data") {
  const DiseaseModel model({0.2, 0.2, 0.2}, {0}, {0.97, 0.60, 0.40});
  const auto dist = full_cell_dist(model);
  Rng rng(2024);
  Rng train_rng = rng.fork(0), test_rng = rng.fork(1);
  const auto train_sample = draw_case_control(model, 100, train_rng);
  const auto test_sample = draw_case_control(model, 20000, test_rng);
  const std::vector<int> cols = {0, 1, 2};
  const auto counts = cell_counts(train_sample, cols);
  const double oos = theta_e_oos_oracle(counts, dist);
  const double emp = holdout_error(counts, test_sample, cols);
  // binomial noise on 40000 test rows keeps this within a few thousandths
  CHECK(std::abs(emp - oos) < 0.02);
}

TEST_CASE("weighted I equals a direct re-summation and the known scaling") {
  Rng rng(19);
  const auto sample = random_two_class(rng, 60, 2);
  const auto counts = cell_counts(sample, std::vector<int>{0, 1});
  const CostPriorSpec equal{};
  const double weighted = i_score_weighted(counts, equal);
  double direct = 0.0;
  for (const auto& [key, c] : counts.cells) {
    const double fd = static_cast<double>(c.n_d) / static_cast<double>(counts.n_d);
    const double fh = static_cast<double>(c.n_h) / static_cast<double>(counts.n_h);
    direct += (0.5 * fd - 0.5 * fh) * (0.5 * fd - 0.5 * fh);
  }
  CHECK(weighted == doctest::Approx(direct).epsilon(1e-12));
  // balanced case: sum (0.5 f_d - 0.5 f_h)^2 = I / (2 n)
  const double i = i_score(counts);
  CHECK(weighted == doctest::Approx(i / (2.0 * static_cast<double>(counts.n_d)))
                        .epsilon(1e-12));

  CostPriorSpec zero_d;
  zero_d.c_d = 0.0;
  double only_h = 0.0;
  for (const auto& [key, c] : counts.cells) {
    const double fh = static_cast<double>(c.n_h) / static_cast<double>(counts.n_h);
    only_h += 0.25 * fh * fh;
  }
  CHECK(i_score_weighted(counts, zero_d) == doctest::Approx(only_h).epsilon(1e-12));
}

TEST_CASE("expected I identity on random cell distributions") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    CellDist dist;
    const int cells = 3 + static_cast<int>(rng.uniform_int(6));
    double sd = 0.0, sh = 0.0;
    for (int i = 0; i < cells; ++i) {
      dist.keys.push_back({i});
      dist.f_d.push_back(rng.next_double());
      dist.f_h.push_back(rng.next_double());
      sd += dist.f_d.back();
      sh += dist.f_h.back();
    }
    for (int i = 0; i < cells; ++i) {
      dist.f_d[static_cast<std::size_t>(i)] /= sd;
      dist.f_h[static_cast<std::size_t>(i)] /= sh;
    }
    const long n = 40;
    double sq = 0.0;
    for (int i = 0; i < cells; ++i)
      sq += dist.f_d[static_cast<std::size_t>(i)] * dist.f_d[static_cast<std::size_t>(i)] +
            dist.f_h[static_cast<std::size_t>(i)] * dist.f_h[static_cast<std::size_t>(i)];
    CHECK(expected_i_score(dist, n) ==
          doctest::Approx(n * theta_I(dist) + 1.0 - 0.5 * sq).epsilon(1e-12));
    // the plug-in target is off by less than 1/n
    CHECK(std::abs(expected_i_score(dist, n) / static_cast<double>(n) - theta_I(dist)) <
          1.0 / static_cast<double>(n));
  }
}
