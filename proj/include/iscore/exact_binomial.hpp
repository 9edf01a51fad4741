#pragma once

#include <span>
#include <vector>

namespace iscore::exact_binomial {

/// A pair of independent Binomial(n, p_z), Binomial(n, p_w) counts.
struct BinomialPair {
  int n;
  double p_z;
  double p_w;
};

/// One evaluated grid cell of the bias functions.
struct BiasPoint {
  int n;
  double lambda;
  double r;
  double b;
  double a;
};

/// E[min(Z, W)] computed exactly as sum_{k>=1} Pr(Z>=k) Pr(W>=k).
double expected_min(const BinomialPair& pair);

/// Pr(Z < W) and Pr(Z = W), exact.
double prob_less(const BinomialPair& pair);
double prob_equal(const BinomialPair& pair);

/// Negative relative bias b(n, lambda, r) = (n p_W - E min(Z,W)) / (n p_W)
/// with p_Z = lambda/n and p_W = p_Z/r. Requires lambda in (0, n], r >= 1.
double neg_rel_bias(int n, double lambda, double r);

/// a(n, lambda, r) = Pr(Z < W) + 0.5 Pr(Z = W), same parameterization.
double tie_half_prob(int n, double lambda, double r);

/// Full cross product, row-major: n outermost, then lambda, then r.
/// A cell that violates the preconditions raises a domain error carrying the
/// offending (n, lambda, r).
std::vector<BiasPoint> bias_grid(std::span<const int> ns,
                                 std::span<const double> lambdas,
                                 std::span<const double> rs);

}  // namespace iscore::exact_binomial
