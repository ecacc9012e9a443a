#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lyap/specfun.hpp"

// Analytic finite-t laws for the exponents of Ginibre products: the exact
// Meijer-G single-variable densities, their Gaussian and saddle-point
// approximations, small-N joint densities, and the radial beta=4 law. All
// evaluation is carried out in the log domain and exponentiated last.

namespace lyap::laws {

struct PeakParams {
  int b = 1, t = 1;
  double mean = 0;   // psi(b)/2
  double sigma = 0;  // sqrt(psi'(b)/(4t))
};

PeakParams peak_params(int b, int t);

/// Exact density f_ab of a single decoupled exponent:
/// f_ab(mu) = 2t G(b,..,b,a+b-1 | e^{2t mu}) / (Gamma^{t-1}(b) Gamma(a+b-1)).
double f_ab_exact(int a, int b, int t, double mu);
double log_f_ab_exact(int a, int b, int t, double mu);

/// Cumulants kappa^(1..n_max) of f_ab, n_max <= 8:
/// kappa^(n) = [psi^(n-1)(b)/2 + (psi^(n-1)(a+b-1) - psi^(n-1)(b))/(2t)] / (2t)^(n-1).
std::vector<double> cumulants_ab(int a, int b, int t, int n_max);

/// Normal pdf with mean psi(b)/2 and variance psi'(b)/(4t).
double gaussian_peak(int b, int t, double x);

/// Saddle-point approximation of f_ab (raw, normalized to 1 + O(1/t)).
double saddle_h_ab(int a, int b, int t, double mu);
double log_saddle_h_ab(int a, int b, int t, double mu);

enum class SvDensityMethod { gaussian, saddle };

/// One-point density of the singular-value exponents. The gaussian method is
/// the equal-weight peak mixture; the saddle method is the cofactor-weighted
/// saddle sum, renormalized numerically on its evaluation range.
double density_sv_lyapunov(int n, int t, double mu, SvDensityMethod method);

/// Log-normal mixture for incremental singular values; equals
/// density_sv_lyapunov(n, t, ln lambda, gaussian) / lambda.
double density_incremental_sv(int n, int t, double lambda);

/// Exact eigenvalue-side peak f~_ab(nu) = 2t G((a+b)/2,..,(a+b)/2 | e^{2t nu})
/// / Gamma^t((a+b)/2); mean psi((a+b)/2)/2, variance psi'((a+b)/2)/(4t).
double eigen_peak_exact(int a, int b, int t, double nu);
double log_eigen_peak_exact(int a, int b, int t, double nu);

/// D_ab(t) = (Gamma((a+b)/2)/sqrt(Gamma(a)Gamma(b)))^t; 1 iff a == b.
double eigen_prefactor(int a, int b, int t);

enum class JointKind { sv_exact, sv_permanent, ev_permanent, incremental_permanent, ev_exact };

/// Joint density of N exponents (or radii for incremental_permanent).
/// Exact kinds need N <= 6, permanent kinds N <= 10.
double joint_density(std::span<const double> points, int n, int t, JointKind kind);

/// beta = 4 radial exponent density: (1/N) sum_c Normal(psi(2c)/2, psi'(2c)/(4t)).
double density_beta4_radial(int n, int t, double nu);

/// Deterministic t -> infinity positions psi(beta*b/2)/2, b = 1..N, ascending.
std::vector<double> deterministic_positions(int n, int beta);

// A tagged 1-D density with pointwise pdf and cdf. Models are immutable
// after construction and safe to share across threads; kinds without a
// closed-form CDF carry a precomputed cumulative grid.
class DensityModel {
 public:
  double pdf(double x) const { return pdf_(x); }
  double cdf(double x) const { return cdf_(x); }
  const std::string& kind() const { return kind_; }
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }

  static DensityModel gaussian_mixture(int n, int t);
  static DensityModel saddle(int n, int t);
  static DensityModel lognormal_mixture(int n, int t);
  /// Density of a product of independent Gamma(a_j) variables (argument s).
  static DensityModel exact_meijer(const specfun::MeijerParams& p);
  /// Pooled exact eigenvalue-exponent density (1/N) sum_a f~_aa(nu).
  static DensityModel eigen_exact(int n, int t);
  static DensityModel beta4_radial(int n, int t);
  static DensityModel triangular();
  static DensityModel staircase(int n);
  /// Single log-normal peak in lambda = exp(mu), peak index b.
  static DensityModel lognormal_peak(int b, int t);

 private:
  DensityModel(std::string kind, double lo, double hi,
               std::function<double(double)> pdf, std::function<double(double)> cdf);

  std::string kind_;
  double lo_ = 0, hi_ = 0;
  std::function<double(double)> pdf_, cdf_;
};

}  // namespace lyap::laws
