#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace iscore {

/// Genotype distribution ((1-p)^2, 2p(1-p), p^2) for minor allele frequency p.
std::array<double, 3> genotype_dist(double p);

/// Per-SNP factor of the noise term sum_v f_V(v)^2: p^4 + (2p(1-p))^2 + (1-p)^4.
double genotype_sq_factor(double p);

/// Generative case-control SNP model: per-SNP minor allele frequencies, an
/// ordered subset of influential SNPs, and the penetrance t(u) = P(h | u) over
/// influential genotype tuples. Penetrance is indexed base-3 with the first
/// influential variable as the most significant digit ("00","01",...,"22").
class DiseaseModel {
 public:
  DiseaseModel(std::vector<double> maf, std::vector<int> influential,
               std::vector<double> penetrance);

  int num_snps() const { return static_cast<int>(maf_.size()); }
  int num_influential() const { return static_cast<int>(influential_.size()); }
  std::size_t num_tuples() const { return penetrance_.size(); }  // 3^k
  const std::vector<double>& maf() const { return maf_; }
  const std::vector<int>& influential() const { return influential_; }
  const std::vector<double>& penetrance() const { return penetrance_; }
  bool is_influential(int snp) const;

  /// Digit string ("021") for a base-3 tuple index.
  std::string tuple_label(std::size_t index) const;

 private:
  std::vector<double> maf_;
  std::vector<int> influential_;
  std::vector<double> penetrance_;
};

/// Conditional structure implied by a model.
struct ConditionalTables {
  double f_y_d = 0.0;                  // disease prevalence
  std::vector<double> f_u;             // marginal over influential tuples
  std::vector<double> f_u_given_d;
  std::vector<double> f_u_given_h;
  double noise_factor = 1.0;           // sum_v f_V(v)^2
};

ConditionalTables conditional_tables(const DiseaseModel& model);

struct OracleParams {
  double theta_e = 0.0;
  double theta_c = 0.0;
  double theta_I = 0.0;
  double theta_I0 = 0.0;
  double bound_on_theta_e = 0.0;  // 0.5 - sqrt(theta_I0 / 4)
  double f_y_d = 0.0;
  double noise_factor = 1.0;
};

OracleParams oracle_params(const DiseaseModel& model);

double theta_e(const DiseaseModel& model);

/// (theta_I0, theta_I = theta_I0 * noise_factor).
std::pair<double, double> theta_I_family(const DiseaseModel& model);

/// 0.5 - sqrt(theta / 4), clamped below at 0.
double error_bound(double theta);

/// Priors and error costs for the cost-weighted decision problem.
struct CostPriorSpec {
  double pi_h = 0.5;
  double pi_d = 0.5;
  double c_h = 1.0;
  double c_d = 1.0;
};

struct WeightedCostResult {
  double theta_C = 0.0;            // sum_x min(pi_d c_d f_d, pi_h c_h f_h)
  double weighted_sq_param = 0.0;  // sum_x (pi_d c_d f_d - pi_h c_h f_h)^2
  double total_cost = 0.0;         // C = pi_d c_d + pi_h c_h
};

WeightedCostResult weighted_cost(std::span<const double> f_d, std::span<const double> f_h,
                                 const CostPriorSpec& spec);
WeightedCostResult weighted_cost(const DiseaseModel& model, const CostPriorSpec& spec);

/// (1 + a^2) / 2, the maximum of sum x_i^2 over vectors with sum|x_i| = 1 and
/// sum x_i = a.
double max_sumsq_bound(double a);

struct InequalityReport {
  double a = 0.0;        // sum of components after normalization
  double sum_sq = 0.0;
  double bound = 0.0;
  double slack = 0.0;    // bound - sum_sq
  bool equality = false; // at most one positive and one negative component
};

/// Normalizes x to sum|x_i| = 1 and reports the bound check.
InequalityReport verify_inequality(std::span<const double> x);

/// Built-in penetrance catalogs used for figure data: twelve single-variable
/// choices of t(u) over u = 0,1,2 and nine two-variable choices over
/// (00, 10, 01, 20, 02, 11, 21, 12, 22).
std::span<const std::array<double, 3>> single_penetrance_catalog();
std::span<const std::array<double, 9>> two_var_penetrance_catalog();

/// Two-variable catalog entry reordered to base-3 index order (00,01,02,10,...).
std::vector<double> two_var_catalog_penetrance(std::size_t index);

}  // namespace iscore
