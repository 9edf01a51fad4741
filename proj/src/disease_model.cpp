#include "iscore/disease_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace iscore {

std::array<double, 3> genotype_dist(double p) {
  if (!(p >= 0.0 && p <= 0.5))
    throw std::domain_error("minor allele frequency must lie in [0, 0.5]");
  const double q = 1.0 - p;
  return {q * q, 2.0 * p * q, p * p};
}

double genotype_sq_factor(double p) {
  const auto g = genotype_dist(p);
  return g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
}

DiseaseModel::DiseaseModel(std::vector<double> maf, std::vector<int> influential,
                           std::vector<double> penetrance)
    : maf_(std::move(maf)), influential_(std::move(influential)),
      penetrance_(std::move(penetrance)) {
  if (maf_.empty()) throw std::invalid_argument("model needs at least one SNP");
  for (double p : maf_) genotype_dist(p);  // range check
  if (influential_.empty())
    throw std::invalid_argument("model needs at least one influential SNP");
  std::unordered_set<int> seen;
  for (int idx : influential_) {
    if (idx < 0 || idx >= num_snps())
      throw std::invalid_argument("influential index out of range");
    if (!seen.insert(idx).second)
      throw std::invalid_argument("influential indices must be distinct");
  }
  std::size_t expected = 1;
  for (int i = 0; i < num_influential(); ++i) expected *= 3;
  if (penetrance_.size() != expected)
    throw std::invalid_argument("penetrance must cover all 3^k genotype tuples");
  for (double t : penetrance_)
    if (!(t >= 0.0 && t <= 1.0))
      throw std::invalid_argument("penetrance values must lie in [0, 1]");
}

bool DiseaseModel::is_influential(int snp) const {
  return std::find(influential_.begin(), influential_.end(), snp) != influential_.end();
}

std::string DiseaseModel::tuple_label(std::size_t index) const {
  std::string s(static_cast<std::size_t>(num_influential()), '0');
  for (int j = num_influential() - 1; j >= 0; --j) {
    s[static_cast<std::size_t>(j)] = static_cast<char>('0' + index % 3);
    index /= 3;
  }
  return s;
}

ConditionalTables conditional_tables(const DiseaseModel& model) {
  ConditionalTables out;
  const std::size_t cells = model.num_tuples();
  out.f_u.assign(cells, 1.0);
  for (std::size_t u = 0; u < cells; ++u) {
    std::size_t rest = u;
    for (int j = model.num_influential() - 1; j >= 0; --j) {
      const int digit = static_cast<int>(rest % 3);
      rest /= 3;
      out.f_u[u] *= genotype_dist(model.maf()[model.influential()[j]])[digit];
    }
  }
  double fyh = 0.0;
  for (std::size_t u = 0; u < cells; ++u) fyh += model.penetrance()[u] * out.f_u[u];
  out.f_y_d = 1.0 - fyh;
  if (out.f_y_d <= 0.0 || out.f_y_d >= 1.0)
    throw std::domain_error("degenerate model: one outcome class has probability zero");
  out.f_u_given_d.resize(cells);
  out.f_u_given_h.resize(cells);
  for (std::size_t u = 0; u < cells; ++u) {
    const double t = model.penetrance()[u];
    out.f_u_given_d[u] = (1.0 - t) * out.f_u[u] / out.f_y_d;
    out.f_u_given_h[u] = t * out.f_u[u] / fyh;
  }
  out.noise_factor = 1.0;
  for (int j = 0; j < model.num_snps(); ++j)
    if (!model.is_influential(j)) out.noise_factor *= genotype_sq_factor(model.maf()[j]);
  return out;
}

double theta_e(const DiseaseModel& model) {
  const auto tab = conditional_tables(model);
  double s = 0.0;
  for (std::size_t u = 0; u < tab.f_u_given_d.size(); ++u)
    s += std::min(tab.f_u_given_d[u], tab.f_u_given_h[u]);
  return 0.5 * s;
}

std::pair<double, double> theta_I_family(const DiseaseModel& model) {
  const auto tab = conditional_tables(model);
  double s = 0.0;
  for (std::size_t u = 0; u < tab.f_u_given_d.size(); ++u) {
    const double d = tab.f_u_given_d[u] - tab.f_u_given_h[u];
    s += d * d;
  }
  const double theta_I0 = 0.5 * s;
  return {theta_I0, theta_I0 * tab.noise_factor};
}

double error_bound(double theta) {
  if (theta < 0.0) throw std::domain_error("error_bound: theta must be nonnegative");
  return std::max(0.0, 0.5 - std::sqrt(theta / 4.0));
}

OracleParams oracle_params(const DiseaseModel& model) {
  const auto tab = conditional_tables(model);
  OracleParams out;
  out.f_y_d = tab.f_y_d;
  out.noise_factor = tab.noise_factor;
  double smin = 0.0, ssq = 0.0;
  for (std::size_t u = 0; u < tab.f_u_given_d.size(); ++u) {
    smin += std::min(tab.f_u_given_d[u], tab.f_u_given_h[u]);
    const double d = tab.f_u_given_d[u] - tab.f_u_given_h[u];
    ssq += d * d;
  }
  out.theta_e = 0.5 * smin;
  out.theta_c = 1.0 - out.theta_e;
  out.theta_I0 = 0.5 * ssq;
  out.theta_I = out.theta_I0 * tab.noise_factor;
  out.bound_on_theta_e = error_bound(out.theta_I0);
  return out;
}

namespace {

void check_spec(const CostPriorSpec& spec) {
  if (std::abs(spec.pi_h + spec.pi_d - 1.0) > 1e-12)
    throw std::invalid_argument("priors pi_h + pi_d must sum to 1");
  if (spec.pi_h < 0.0 || spec.pi_d < 0.0)
    throw std::invalid_argument("priors must be nonnegative");
  if (spec.c_h < 0.0 || spec.c_d < 0.0)
    throw std::invalid_argument("costs must be nonnegative");
}

}  // namespace

WeightedCostResult weighted_cost(std::span<const double> f_d, std::span<const double> f_h,
                                 const CostPriorSpec& spec) {
  check_spec(spec);
  if (f_d.size() != f_h.size())
    throw std::invalid_argument("weighted_cost: distributions differ in length");
  WeightedCostResult out;
  out.total_cost = spec.pi_d * spec.c_d + spec.pi_h * spec.c_h;
  for (std::size_t i = 0; i < f_d.size(); ++i) {
    const double wd = spec.pi_d * spec.c_d * f_d[i];
    const double wh = spec.pi_h * spec.c_h * f_h[i];
    out.theta_C += std::min(wd, wh);
    out.weighted_sq_param += (wd - wh) * (wd - wh);
  }
  return out;
}

WeightedCostResult weighted_cost(const DiseaseModel& model, const CostPriorSpec& spec) {
  const auto tab = conditional_tables(model);
  return weighted_cost(tab.f_u_given_d, tab.f_u_given_h, spec);
}

double max_sumsq_bound(double a) { return (1.0 + a * a) / 2.0; }

InequalityReport verify_inequality(std::span<const double> x) {
  double norm = 0.0;
  for (double v : x) norm += std::abs(v);
  if (norm == 0.0) throw std::domain_error("verify_inequality: zero vector");
  InequalityReport rep;
  int positives = 0, negatives = 0;
  for (double v : x) {
    const double z = v / norm;
    rep.a += z;
    rep.sum_sq += z * z;
    if (z > 0.0) ++positives;
    if (z < 0.0) ++negatives;
  }
  rep.bound = max_sumsq_bound(rep.a);
  rep.slack = rep.bound - rep.sum_sq;
  rep.equality = positives <= 1 && negatives <= 1;
  return rep;
}

namespace {

constexpr std::array<std::array<double, 3>, 12> kSingleCatalog = {{
    {0.97, 0.4, 0.2},
    {0.97, 0.5, 0.3},
    {0.97, 0.6, 0.4},
    {0.90, 0.4, 0.2},
    {0.90, 0.5, 0.3},
    {0.85, 0.4, 0.2},
    {0.90, 0.6, 0.4},
    {0.85, 0.5, 0.3},
    {0.80, 0.4, 0.2},
    {0.85, 0.6, 0.4},
    {0.80, 0.5, 0.3},
    {0.80, 0.6, 0.4},
}};

// Tuple order: 00, 10, 01, 20, 02, 11, 21, 12, 22.
constexpr std::array<std::array<double, 9>, 9> kTwoVarCatalog = {{
    {0.99, 0.20, 0.15, 0.10, 0.08, 0.02, 0.010, 0.004, 0.001},
    {0.98, 0.20, 0.15, 0.15, 0.10, 0.01, 0.005, 0.005, 0.001},
    {0.95, 0.40, 0.30, 0.20, 0.10, 0.02, 0.010, 0.005, 0.002},
    {0.90, 0.40, 0.30, 0.20, 0.10, 0.02, 0.010, 0.005, 0.002},
    {0.95, 0.60, 0.40, 0.40, 0.20, 0.02, 0.010, 0.005, 0.001},
    {0.95, 0.60, 0.50, 0.30, 0.10, 0.05, 0.020, 0.015, 0.010},
    {0.99, 0.75, 0.75, 0.70, 0.70, 0.01, 0.008, 0.008, 0.002},
    {0.90, 0.60, 0.50, 0.30, 0.10, 0.05, 0.020, 0.015, 0.010},
    {0.95, 0.75, 0.70, 0.60, 0.50, 0.40, 0.350, 0.300, 0.200},
}};

// Position of each catalog tuple in base-3 index order.
constexpr std::array<int, 9> kTwoVarIndexOf = {0, 3, 1, 6, 2, 4, 7, 5, 8};

}  // namespace

std::span<const std::array<double, 3>> single_penetrance_catalog() { return kSingleCatalog; }

std::span<const std::array<double, 9>> two_var_penetrance_catalog() { return kTwoVarCatalog; }

std::vector<double> two_var_catalog_penetrance(std::size_t index) {
  if (index >= kTwoVarCatalog.size())
    throw std::out_of_range("two_var_catalog_penetrance: index out of range");
  std::vector<double> t(9, 0.0);
  for (int j = 0; j < 9; ++j)
    t[static_cast<std::size_t>(kTwoVarIndexOf[static_cast<std::size_t>(j)])] =
        kTwoVarCatalog[index][static_cast<std::size_t>(j)];
  return t;
}

}  // namespace iscore
