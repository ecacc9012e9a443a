#include "lyap/asymptotic.hpp"

#include <cmath>
#include <stdexcept>

#include "lyap/specfun.hpp"

namespace lyap::asymptotic {

double triangular_density(double lambda_star) {
  return (lambda_star >= 0.0 && lambda_star <= 1.0) ? 2.0 * lambda_star : 0.0;
}

double triangular_density_exponent(double mu_star) {
  return (mu_star <= 0.0) ? 2.0 * std::exp(2.0 * mu_star) : 0.0;
}

double triangular_cdf(double lambda_star) {
  if (lambda_star <= 0.0) return 0.0;
  if (lambda_star >= 1.0) return 1.0;
  return lambda_star * lambda_star;
}

std::vector<double> staircase_jumps(int n) {
  if (n < 1) throw std::invalid_argument("staircase_jumps: N must be >= 1");
  std::vector<double> j(n);
  const double root_n = std::sqrt(static_cast<double>(n));
  for (int b = 1; b <= n; ++b)
    j[b - 1] = std::exp(0.5 * specfun::digamma(b)) / root_n;
  return j;
}

double staircase_cdf(int n, double lambda_star) {
  const std::vector<double> jumps = staircase_jumps(n);
  int count = 0;
  for (double x : jumps)
    if (lambda_star >= x) ++count;  // right-continuous
  return static_cast<double>(count) / n;
}

double fuss_catalan_moment(long t, int n) {
  if (n < 1) throw std::invalid_argument("fuss_catalan_moment: n must be >= 1");
  return specfun::fuss_catalan(t, static_cast<double>(n) / (2.0 * t));
}

DiscreteDistribution level_spacing_finite_n(int n) {
  if (n < 2) throw std::invalid_argument("level_spacing_finite_n: N must be >= 2");
  DiscreteDistribution d;
  d.atoms.resize(n - 1);
  d.weights.assign(n - 1, 1.0 / (n - 1));
  for (int j = 1; j <= n - 1; ++j)
    d.atoms[j - 1] = std::exp(specfun::digamma(j)) * std::expm1(1.0 / j);
  return d;
}

}  // namespace lyap::asymptotic
