#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

// Stabilized spectral kernels for long matrix products. Both kernels avoid
// forming the explicit product: condition numbers beyond 1e300 (log-value
// spreads of thousands of nats) are routine here, so all scale information
// lives in per-column / per-position log ledgers and only O(1)-sized
// matrices ever touch double arithmetic.

namespace lyap::kernels {

using Matrix = Eigen::MatrixXcd;

enum class SpectrumKind { log_singular, log_modulus };

struct LogSpectrum {
  SpectrumKind kind = SpectrumKind::log_singular;
  int n = 0;
  int t = 0;
  std::vector<double> values;  // ascending; ln s_n (= 2 ln sigma_n) or ln R_n
  std::vector<double> angles;  // [0, 2pi); log_modulus only, paired with values

  /// sum of values; equals log|det Pi|^2 (singular) or log|det Pi| (modulus)
  double sum() const;
};

/// QR with R forced to a strictly positive real diagonal. Throws on a zero
/// pivot (rank deficiency).
std::pair<Matrix, Matrix> qr_positive(const Matrix& a);

// Running factorization Pi(k) = B diag(exp(l)) (unit columns  B, log scales
// l, up to a right unitary factor). After every factor multiplication the
// columns are re-orthogonalized by one-sided Jacobi sweeps acting on the
// (B, l) pairs; rotations renormalize the scales so no entry leaves double
// range. Exact zero singular values are carried as -inf sentinels.
class ProductSvdAccumulator {
 public:
  explicit ProductSvdAccumulator(int n);

  void push(const Matrix& x);
  int steps() const { return steps_; }

  /// Current spectrum {ln s_n} sorted ascending (s_n eigenvalues of Pi^H Pi).
  LogSpectrum spectrum() const;

 private:
  void orthogonalize();

  int n_;
  int steps_ = 0;
  Matrix b_;
  Eigen::VectorXd log_scale_;
};

/// {ln s_n} of S(t) = Pi(t)^H Pi(t), relative accuracy ~1e-10 in the log
/// domain regardless of spread. Factors are consumed left to right as
/// X_1, X_2, ..., X_t (the product is X_t ... X_1).
LogSpectrum log_singular_values(std::span<const Matrix> factors);

/// {ln R_n} and angles of the complex eigenvalues of Pi(t), via a periodic
/// orthogonal-iteration (cyclic Schur-style) sweep over the factor chain.
LogSpectrum log_eigenvalue_moduli(std::span<const Matrix> factors);

// Log-magnitude/phase data of the 2x2 Schur form of Pi(t):
// Pi = U [[z1, Delta],[0, z2]] U^H.
struct SchurData2x2 {
  double log_z1 = 0, log_z2 = 0;
  double phase_z1 = 0, phase_z2 = 0;
  double log_abs_delta = 0;  // -inf when Delta == 0
};

SchurData2x2 schur_chain_2x2(std::span<const Matrix> factors);

/// Largest finite-t exponent of a 2x2 product from its Schur data,
/// evaluated in the log domain. Always >= max(log_z1, log_z2)/t.
double max_exponent_2x2(const SchurData2x2& sd, int t);

}  // namespace lyap::kernels
