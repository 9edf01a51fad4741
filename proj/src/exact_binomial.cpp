#include "iscore/exact_binomial.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace iscore::exact_binomial {

namespace {

void check_pair(const BinomialPair& p) {
  if (p.n < 1) throw std::domain_error("binomial pair: n must be >= 1");
  if (!(p.p_z >= 0.0 && p.p_z <= 1.0) || !(p.p_w >= 0.0 && p.p_w <= 1.0))
    throw std::domain_error("binomial pair: probabilities must lie in [0, 1]");
}

// pmf over 0..n in long double, each term from lgamma so there is no
// cumulative drift along the support.
std::vector<long double> pmf(int n, double p) {
  std::vector<long double> f(static_cast<std::size_t>(n) + 1, 0.0L);
  if (p <= 0.0) {
    f[0] = 1.0L;
    return f;
  }
  if (p >= 1.0) {
    f.back() = 1.0L;
    return f;
  }
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  const double lgn = std::lgamma(n + 1.0);
  for (int k = 0; k <= n; ++k) {
    const double lg =
        lgn - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * lp + (n - k) * lq;
    f[static_cast<std::size_t>(k)] = std::exp(static_cast<long double>(lg));
  }
  return f;
}

// survival[k] = Pr(X >= k), k = 0..n
std::vector<long double> survival(const std::vector<long double>& f) {
  std::vector<long double> s(f.size());
  long double acc = 0.0L;
  for (std::size_t k = f.size(); k-- > 0;) {
    acc += f[k];
    s[k] = acc;
  }
  return s;
}

}  // namespace

double expected_min(const BinomialPair& pair) {
  check_pair(pair);
  if (pair.p_z == 0.0 || pair.p_w == 0.0) return 0.0;
  const auto sz = survival(pmf(pair.n, pair.p_z));
  const auto sw = survival(pmf(pair.n, pair.p_w));
  long double acc = 0.0L;
  for (std::size_t k = 1; k < sz.size(); ++k) acc += sz[k] * sw[k];
  return static_cast<double>(acc);
}

double prob_less(const BinomialPair& pair) {
  check_pair(pair);
  const auto fz = pmf(pair.n, pair.p_z);
  const auto fw = pmf(pair.n, pair.p_w);
  // Pr(Z < W) = sum_w Pr(W = w) Pr(Z <= w-1)
  long double acc = 0.0L;
  long double cdfz = 0.0L;
  for (std::size_t w = 1; w < fw.size(); ++w) {
    cdfz += fz[w - 1];
    acc += fw[w] * cdfz;
  }
  return static_cast<double>(acc);
}

double prob_equal(const BinomialPair& pair) {
  check_pair(pair);
  const auto fz = pmf(pair.n, pair.p_z);
  const auto fw = pmf(pair.n, pair.p_w);
  long double acc = 0.0L;
  for (std::size_t k = 0; k < fz.size(); ++k) acc += fz[k] * fw[k];
  return static_cast<double>(acc);
}

namespace {

BinomialPair pair_from(int n, double lambda, double r) {
  if (n < 1) throw std::domain_error("n must be >= 1");
  if (!(lambda > 0.0)) throw std::domain_error("lambda must be positive (p_W would be 0)");
  if (lambda > n) throw std::domain_error("lambda must not exceed n");
  if (!(r >= 1.0)) throw std::domain_error("r must be >= 1");
  return BinomialPair{n, lambda / n, lambda / (n * r)};
}

}  // namespace

double neg_rel_bias(int n, double lambda, double r) {
  const BinomialPair pair = pair_from(n, lambda, r);
  const double npw = n * pair.p_w;
  double b = (npw - expected_min(pair)) / npw;
  if (b < 0.0) {
    if (b < -1e-9)
      throw std::logic_error("neg_rel_bias: impossible negative value " + std::to_string(b));
    b = 0.0;
  }
  return b;
}

double tie_half_prob(int n, double lambda, double r) {
  const BinomialPair pair = pair_from(n, lambda, r);
  if (r == 1.0) return 0.5;  // Z and W exchangeable
  return prob_less(pair) + 0.5 * prob_equal(pair);
}

std::vector<BiasPoint> bias_grid(std::span<const int> ns,
                                 std::span<const double> lambdas,
                                 std::span<const double> rs) {
  std::vector<BiasPoint> out;
  out.reserve(ns.size() * lambdas.size() * rs.size());
  for (int n : ns) {
    for (double lam : lambdas) {
      for (double r : rs) {
        try {
          out.push_back({n, lam, r, neg_rel_bias(n, lam, r), tie_half_prob(n, lam, r)});
        } catch (const std::domain_error& e) {
          std::ostringstream msg;
          msg << "bias grid cell (n=" << n << ", lambda=" << lam << ", r=" << r
              << "): " << e.what();
          throw std::domain_error(msg.str());
        }
      }
    }
  }
  return out;
}

}  // namespace iscore::exact_binomial
