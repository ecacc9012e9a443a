#pragma once

#include <vector>

// Large-N laws: the triangular law for rescaled incremental singular
// values/radii, its finite-N staircase CDF, Fuss-Catalan moments along the
// N-first route, and the t-first level-spacing atoms on the local scale.

namespace lyap::asymptotic {

/// Triangular density 2*lambda on [0, 1], else 0.
double triangular_density(double lambda_star);

/// Exponent-side companion 2 e^{2 mu} for mu <= 0, else 0.
double triangular_density_exponent(double mu_star);

/// Triangular CDF: lambda^2 on [0,1], clamped outside.
double triangular_cdf(double lambda_star);

/// Counting-function CDF F_{*N} with jumps of 1/N at exp[psi(n)/2]/sqrt(N).
double staircase_cdf(int n, double lambda_star);

/// Jump locations of the staircase, ascending.
std::vector<double> staircase_jumps(int n);

/// <lambda_*^n> along the N-first route: fuss_catalan(t, k = n/(2t)).
/// Tends to 2/(n+2) as t grows.
double fuss_catalan_moment(long t, int n);

// Discrete level-spacing law of the unfolded incremental radii squared in
// the t-first order: N-1 equal-weight atoms at exp[psi(j)](exp(1/j)-1).
struct DiscreteDistribution {
  std::vector<double> atoms;
  std::vector<double> weights;
};

DiscreteDistribution level_spacing_finite_n(int n);

}  // namespace lyap::asymptotic
