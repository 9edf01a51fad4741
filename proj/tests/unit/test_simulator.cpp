#include <cmath>
#include <numeric>

#include "doctest.h"
#include "iscore/simulator.hpp"

using namespace iscore;

namespace {

DiseaseModel worked_example() {
  return DiseaseModel({0.2, 0.2, 0.2, 0.2, 0.2, 0.2}, {0}, {0.97, 0.60, 0.40});
}

}  // namespace

TEST_CASE("draw_case_control layout and determinism") {
  const auto model = worked_example();
  Rng a(42), b(42);
  const auto s1 = draw_case_control(model, 50, a);
  const auto s2 = draw_case_control(model, 50, b);
  CHECK(s1.n_rows() == 100);
  CHECK(s1.n_vars == 6);
  CHECK(s1.x == s2.x);
  CHECK(*s1.classes == *s2.classes);
  long n_d = 0;
  for (auto c : *s1.classes) n_d += c;
  CHECK(n_d == 50);
  for (int v : s1.x) {
    CHECK(v >= 0);
    CHECK(v <= 2);
  }
}

TEST_CASE("case genotype frequencies match the conditional law") {
  const auto model = worked_example();
  const auto tab = conditional_tables(model);
  Rng rng(7);
  const long n = 100000;
  const auto sample = draw_case_control(model, n, rng);
  std::array<long, 3> case_u{}, control_u{};
  for (std::size_t row = 0; row < sample.n_rows(); ++row) {
    const int u = sample.value(row, 0);
    if ((*sample.classes)[row])
      ++case_u[static_cast<std::size_t>(u)];
    else
      ++control_u[static_cast<std::size_t>(u)];
  }
  for (std::size_t u = 0; u < 3; ++u) {
    const double p_d = tab.f_u_given_d[u];
    const double se_d = std::sqrt(p_d * (1 - p_d) / n);
    CHECK(std::abs(static_cast<double>(case_u[u]) / n - p_d) < 4.0 * se_d + 1e-9);
    const double p_h = tab.f_u_given_h[u];
    const double se_h = std::sqrt(p_h * (1 - p_h) / n);
    CHECK(std::abs(static_cast<double>(control_u[u]) / n - p_h) < 4.0 * se_h + 1e-9);
  }
}

TEST_CASE("flat penetrance leaves the two arms indistinguishable") {
  const DiseaseModel flat({0.2, 0.2}, {0}, {0.5, 0.5, 0.5});
  Rng rng(9);
  const auto sample = draw_case_control(flat, 50000, rng);
  std::array<long, 3> case_u{}, control_u{};
  for (std::size_t row = 0; row < sample.n_rows(); ++row) {
    if ((*sample.classes)[row])
      ++case_u[static_cast<std::size_t>(sample.value(row, 0))];
    else
      ++control_u[static_cast<std::size_t>(sample.value(row, 0))];
  }
  double chi2 = 0.0;
  for (std::size_t u = 0; u < 3; ++u) {
    const double tot = static_cast<double>(case_u[u] + control_u[u]);
    const double exp_each = tot / 2.0;
    chi2 += (case_u[u] - exp_each) * (case_u[u] - exp_each) / exp_each;
    chi2 += (control_u[u] - exp_each) * (control_u[u] - exp_each) / exp_each;
  }
  CHECK(chi2 < 20.0);  // 2 df, generous
}

TEST_CASE("full_cell_dist is a sorted probability table") {
  const auto dist = full_cell_dist(worked_example());
  CHECK(dist.size() == 729);
  CHECK(std::is_sorted(dist.keys.begin(), dist.keys.end()));
  CHECK(std::accumulate(dist.f_d.begin(), dist.f_d.end(), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::accumulate(dist.f_h.begin(), dist.f_h.end(), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // zero-MAF SNPs collapse their dimension
  const DiseaseModel zeros({0.1, 0.1, 0.1, 0.2, 0.0, 0.0}, {0}, {0.97, 0.6, 0.4});
  CHECK(full_cell_dist(zeros).size() == 81);

  CHECK_THROWS_AS(full_cell_dist(DiseaseModel(std::vector<double>(14, 0.2), {0},
                                              {0.9, 0.5, 0.2})),
                  std::invalid_argument);
}

TEST_CASE("replicate_bias_study reproduces the first study row analytically") {
  SimConfig cfg{worked_example(), 100, 25, 1234};
  const auto s = replicate_bias_study(cfg);
  CHECK(s.theta_e == doctest::Approx(0.182).epsilon(2e-2));
  CHECK(std::abs(s.theta_e - 0.182) <= 0.002);
  CHECK(std::abs(s.b - 0.058) <= 0.002);
  CHECK(std::abs(s.b_o - 0.132) <= 0.002);
  CHECK(std::abs(s.theta_I0 - 0.343) <= 0.002);
  CHECK(std::abs(s.bound - 0.207) <= 0.002);
  // sign pattern and rough agreement with the analytic biases
  CHECK(s.mean_b < 0.0);
  CHECK(s.mean_bo > 0.0);
  CHECK(std::abs(s.mean_b + s.b) < 5.0 * s.sd_b / 5.0 + 1e-9);
  CHECK(std::abs(s.mean_bo - s.b_o) < 5.0 * s.sd_bo / 5.0 + 1e-9);
  CHECK(!s.single_rep);
}

TEST_CASE("single replication flags degenerate deviations") {
  SimConfig cfg{worked_example(), 60, 1, 5};
  const auto s = replicate_bias_study(cfg);
  CHECK(s.single_rep);
  CHECK(s.sd_b == 0.0);
  CHECK(s.sd_b1 == 0.0);
  CHECK(s.sd_bo == 0.0);
}

TEST_CASE("study catalogs have nine rows each with six SNPs") {
  REQUIRE(one_influential_study_rows().size() == 9);
  REQUIRE(two_influential_study_rows().size() == 9);
  for (const auto& row : one_influential_study_rows()) {
    CHECK(row.maf.size() == 6);
    CHECK(row.reps == 25);
    const auto model = study_row_model(row);
    CHECK(model.num_influential() == 1);
  }
  for (const auto& row : two_influential_study_rows()) {
    const auto model = study_row_model(row);
    CHECK(model.num_influential() == 2);
  }
}

TEST_CASE("reference bias tables hit published spot cells") {
  const auto t1 = reference_bias_table(1);
  REQUIRE(t1.rows.size() == 90);
  const auto cell = [&](const FigureTable& t, const std::string& n, const std::string& lam,
                        const std::string& r) -> std::string {
    for (const auto& row : t.rows)
      if (row[0] == n && row[1] == lam && row[2] == r) return row[3];
    return "missing";
  };
  CHECK(cell(t1, "100", "2.5", "1.25") == "0.2131");
  CHECK(cell(t1, "500", "0.625", "5") == "0.5453");
  CHECK(cell(t1, "2500", "40", "1.016") == "0.0646");

  const auto t2 = reference_bias_table(2);
  REQUIRE(t2.rows.size() == 90);
  CHECK(cell(t2, "100", "10", "1.25") == "0.3115");
  CHECK(cell(t2, "500", "40", "1.062") == "0.3915");
  CHECK(cell(t2, "2500", "0.039", "40") == "0.4813");

  CHECK_THROWS_AS(reference_bias_table(3), std::invalid_argument);
}

TEST_CASE("figure curves") {
  const auto fig2 = figure_curves(2);
  bool found = false;
  for (const auto& row : fig2.rows)
    if (row[0] == "1.25" && row[1] == "2.5") {
      CHECK(std::stod(row[3]) == doctest::Approx(0.4092).epsilon(5e-5));
      found = true;
    }
  CHECK(found);

  const auto fig3 = figure_curves(3);
  found = false;
  for (const auto& row : fig3.rows)
    if (row[0] == "t_3" && row[1] == "0.2") {
      CHECK(std::stod(row[2]) == doctest::Approx(0.18156).epsilon(1e-4));
      CHECK(std::stod(row[3]) == doctest::Approx(0.34325).epsilon(1e-4));
      found = true;
    }
  CHECK(found);
  // the bound curve ends at (0.5, 0)
  bool bound_end = false;
  for (const auto& row : fig3.rows)
    if (row[0] == "bound" && std::stod(row[2]) == doctest::Approx(0.5))
      bound_end = std::stod(row[3]) == doctest::Approx(0.0);
  CHECK(bound_end);

  // figure 1: b is nonincreasing along each r curve
  const auto fig1 = figure_curves(1);
  std::string cur;
  double prev = 2.0;
  for (const auto& row : fig1.rows) {
    if (row[0] != cur) {
      cur = row[0];
      prev = 2.0;
    }
    const double b = std::stod(row[3]);
    CHECK(b <= prev + 1e-12);
    prev = b;
  }

  CHECK_THROWS_AS(figure_curves(5), std::invalid_argument);
}

TEST_CASE("study table layout") {
  const auto t4 = reference_study_table(4, 99);
  REQUIRE(t4.rows.size() == 9);
  REQUIRE(t4.header.size() == 14);
  // same seed twice gives identical strings
  const auto again = reference_study_table(4, 99);
  CHECK(t4.rows == again.rows);
  CHECK_THROWS_AS(reference_study_table(5, 99), std::invalid_argument);
}
