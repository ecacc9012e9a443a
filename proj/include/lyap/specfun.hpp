#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

// Special functions and small combinatorial kernels used throughout the
// library: log-gamma, polygamma, the digamma inverse, Meijer G^{t,0}_{0,t}
// evaluated by Mellin-Barnes quadrature, Fuss-Catalan numbers, Hankel
// determinants of gamma values with their cofactors, and permanents.

namespace lyap::specfun {

/// ln Gamma(x) for x > 0. Throws std::domain_error otherwise.
double log_gamma(double x);

/// Digamma psi(x), x > 0.
double digamma(double x);

/// Polygamma psi^(n)(x) for 0 <= n <= 8, x > 0.
double polygamma(int n, double x);

/// ln Gamma(z) for Re(z) > 0 (principal branch).
std::complex<double> log_gamma_complex(std::complex<double> z);

/// Inverse digamma: the unique x > 0 with psi(x) = 2*mu.
/// Monotone increasing in mu; |psi(result) - 2*mu| <= 1e-12.
double theta0(double mu);

// Upper-index list a_1..a_t of G^{t,0}_{0,t}. All entries positive,
// 1 <= t <= 1024. Repeated indices are stored with multiplicities so the
// quadrature pays one complex log-gamma per distinct index.
class MeijerParams {
 public:
  explicit MeijerParams(std::vector<double> a);
  // convenience: value `b` repeated `mult` times, then optional extras
  static MeijerParams repeated(double b, int mult, std::vector<double> extra = {});

  int t() const { return t_; }
  double min_index() const { return min_a_; }
  double sum_indices() const { return sum_a_; }
  const std::vector<std::pair<double, int>>& groups() const { return groups_; }

 private:
  std::vector<std::pair<double, int>> groups_;  // (index value, multiplicity)
  int t_ = 0;
  double min_a_ = 0, sum_a_ = 0;
};

// G^{t,0}_{0,t}(a_1..a_t | s) under the convention
//   integral_0^inf s^(u-1) G(a|s) ds = prod_j Gamma(a_j + u),
// i.e. G(a|s) = s * p(s) * prod_j Gamma(a_j) with p the density of a product
// of independent Gamma(a_j) variables. Evaluated by trapezoidal Mellin-Barnes
// quadrature on the vertical line through the real saddle point, with all
// magnitudes kept in the log domain.
double log_meijer_g_t0(const MeijerParams& p, double s);
double meijer_g_t0(const MeijerParams& p, double s);

/// Same with the argument passed as ln(s); usable when s itself would
/// overflow a double (the density paths call this with ln s = 2 t mu).
double log_meijer_g_t0_logarg(const MeijerParams& p, double log_s);

/// Fuss-Catalan value binom((t+1)k, k)/(tk+1), extended to real k via gamma
/// functions. Exact integer arithmetic for integer k <= 20. Domain:
/// k > -1/(t+1).
double fuss_catalan(long t, double k);

/// det[Gamma(a+b-1)]_{1<=a,b<=N} = prod_{a=1}^N Gamma(a)^2, for 1 <= N <= 12.
double hankel_gamma_det(int N);
/// Log of the same determinant, any N >= 1.
double log_hankel_gamma_det(int N);

/// Cofactor C_jl of det[Gamma(a+b-1)] (1-based indices, N <= 12).
double hankel_cofactor(int N, int j, int l);

/// Cofactor divided by the full determinant; safe from overflow for N <= 12.
double hankel_cofactor_ratio(int N, int j, int l);

/// Permanent of a square real matrix, Ryser's method, size <= 12.
double permanent(const Eigen::MatrixXd& m);

/// log of the permanent of a positive matrix whose entries are given as
/// logs (row-scaled Ryser). Returns -inf for an all-zero matrix.
double log_permanent_of_logs(const Eigen::MatrixXd& log_entries);

/// Solves sum_j psi(a_j + u) = ln(s) for u > -min(a_j) (the Mellin-Barnes
/// saddle). Exposed for the saddle-form density path.
double meijer_saddle_point(const MeijerParams& p, double log_s);

}  // namespace lyap::specfun
