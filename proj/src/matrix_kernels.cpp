#include "lyap/matrix_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace lyap::kernels {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using Complex = std::complex<double>;

void check_square_finite(const Matrix& x, int n) {
  if (x.rows() != n || x.cols() != n)
    throw std::invalid_argument("matrix kernel: dimension mismatch");
  if (!x.allFinite())
    throw std::invalid_argument("matrix kernel: non-finite entries");
}

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a < 0) a += 2.0 * M_PI;
  return a;
}

// QR of w with positive real diagonal of R. Zero pivots allowed.
void qr_positive_inplace(const Matrix& w, Matrix& q, Matrix& r) {
  Eigen::HouseholderQR<Matrix> qr(w);
  q = qr.householderQ();
  r = qr.matrixQR().template triangularView<Eigen::Upper>();
  const int n = static_cast<int>(w.rows());
  for (int j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag == 0.0) continue;
    const Complex ph = d / mag;
    q.col(j) *= ph;
    r.row(j) *= std::conj(ph);
    r(j, j) = mag;  // kill the rounding residue in the imaginary part
  }
}

}  // namespace

double LogSpectrum::sum() const {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

std::pair<Matrix, Matrix> qr_positive(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("qr_positive: matrix must be square");
  if (!a.allFinite()) throw std::invalid_argument("qr_positive: non-finite entries");
  Matrix q, r;
  qr_positive_inplace(a, q, r);
  for (int j = 0; j < a.cols(); ++j)
    if (r(j, j).real() == 0.0)
      throw std::runtime_error("qr_positive: rank-deficient input (zero pivot)");
  return {std::move(q), std::move(r)};
}

ProductSvdAccumulator::ProductSvdAccumulator(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("ProductSvdAccumulator: N must be >= 1");
  b_ = Matrix::Identity(n, n);
  log_scale_ = Eigen::VectorXd::Zero(n);
}

void ProductSvdAccumulator::push(const Matrix& x) {
  check_square_finite(x, n_);
  b_ = x * b_;
  for (int i = 0; i < n_; ++i) {
    if (log_scale_(i) == -kInf) {
      b_.col(i).setZero();
      continue;
    }
    const double nrm = b_.col(i).norm();
    if (nrm == 0.0) {
      log_scale_(i) = -kInf;
    } else {
      log_scale_(i) += std::log(nrm);
      b_.col(i) /= nrm;
    }
  }
  orthogonalize();
  ++steps_;
}

void ProductSvdAccumulator::orthogonalize() {
  if (n_ == 1) return;
  constexpr double kTol = 5e-15;
  constexpr int kMaxSweeps = 64;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n_; ++p) {
      for (int r = p + 1; r < n_; ++r) {
        // Rotate in the (i, j) order with l_j >= l_i so the derived angle
        // shrinks column i.
        int i = p, j = r;
        if (log_scale_(j) < log_scale_(i)) std::swap(i, j);
        if (log_scale_(i) == -kInf) continue;  // dead column, nothing to couple
        const Complex chi = b_.col(i).dot(b_.col(j));
        double q = std::min(std::abs(chi), 1.0);
        if (q <= kTol) continue;
        off = std::max(off, q);
        const Complex phase = chi / std::abs(chi);
        const double delta = log_scale_(j) - log_scale_(i);  // >= 0
        // tan(theta) expressed through u = tan(theta) e^{delta}, computed in a
        // form that never overflows however large the scale gap is.
        const double w = 0.5 * (-std::expm1(-2.0 * delta));
        const double qe = q * std::exp(-delta);
        const double u = q / (w + std::sqrt(qe * qe + w * w));
        const double tn = u * std::exp(-delta);
        const double c = 1.0 / std::sqrt(1.0 + tn * tn);
        const double v = u * std::exp(-2.0 * delta);
        const Eigen::VectorXcd bi = b_.col(i);
        const Eigen::VectorXcd bj = b_.col(j);
        b_.col(i) = bi - (u * std::conj(phase)) * bj;
        b_.col(j) = bj + (v * phase) * bi;
        // The shrinking column i cancels to sqrt(2(1-q)) in exact arithmetic,
        // which stays above ~1e-8 for any q representable below 1. A smaller
        // computed norm means the columns were parallel at double resolution:
        // the residual is rounding noise and the column is dead.
        const double nrm_i = b_.col(i).norm();
        if (nrm_i < 1e-14) {
          log_scale_(i) = -kInf;
          b_.col(i).setZero();
        } else {
          log_scale_(i) += std::log(c * nrm_i);
          b_.col(i) /= nrm_i;
        }
        const double nrm_j = b_.col(j).norm();
        log_scale_(j) += std::log(c * nrm_j);
        b_.col(j) /= nrm_j;
      }
    }
    if (off <= kTol) return;
  }
  throw std::runtime_error("ProductSvdAccumulator: Jacobi sweeps did not converge");
}

LogSpectrum ProductSvdAccumulator::spectrum() const {
  LogSpectrum sp;
  sp.kind = SpectrumKind::log_singular;
  sp.n = n_;
  sp.t = steps_;
  sp.values.resize(n_);
  for (int i = 0; i < n_; ++i) sp.values[i] = 2.0 * log_scale_(i);
  std::sort(sp.values.begin(), sp.values.end());
  return sp;
}

LogSpectrum log_singular_values(std::span<const Matrix> factors) {
  if (factors.empty()) throw std::invalid_argument("log_singular_values: need t >= 1");
  ProductSvdAccumulator acc(static_cast<int>(factors.front().rows()));
  for (const Matrix& x : factors) acc.push(x);
  return acc.spectrum();
}

namespace {

// Shared machinery for the eigenvalue-side kernels: periodic orthogonal
// iteration over the chain. Each sweep runs V <- qr(X_j V).Q through all
// factors while only the log of every R diagonal is accumulated, so the
// working matrices stay O(1) in magnitude. At a fixed point of the sweep,
// Pi V = V Phi R_total, a genuine similarity, and the eigenvalue moduli are
// the accumulated diagonal products. Positions whose moduli stall within
// `kClusterGap` nats of a neighbour are treated as one cluster and resolved
// by a dense eigensolve of the cluster's accumulated diagonal block.

constexpr double kClusterGap = 2.0;

std::vector<int> cluster_boundaries(const Eigen::VectorXd& logd) {
  std::vector<int> bounds;  // indices where a new block starts, plus n
  const int n = static_cast<int>(logd.size());
  bounds.push_back(0);
  for (int m = 0; m + 1 < n; ++m) {
    const double a = logd(m), b = logd(m + 1);
    const bool both_dead = (a == -kInf && b == -kInf);
    const bool split = !both_dead && !(std::abs(a - b) < kClusterGap);
    if (split) bounds.push_back(m + 1);
  }
  bounds.push_back(n);
  return bounds;
}

struct PeriodicSweepResult {
  Eigen::VectorXd logd;            // per-position sums of ln R_mm
  Matrix psi;                      // V_start^H V_end (block-diagonal at convergence)
  std::vector<int> bounds;         // cluster boundaries
  std::vector<Matrix> blocks;      // per-cluster scaled products of R diagonal blocks
  std::vector<double> block_logs;  // log scale pulled out of each block product
  std::vector<Matrix> r_chain;     // R_j of the final sweep (only when requested)
};

PeriodicSweepResult periodic_sweep(std::span<const Matrix> factors, bool keep_r_chain) {
  const int n = static_cast<int>(factors.front().rows());
  for (const Matrix& x : factors) check_square_finite(x, n);

  Matrix v = Matrix::Identity(n, n);
  Matrix q(n, n), r(n, n), w(n, n);
  Eigen::VectorXd logd(n), prev_logd(n);
  std::vector<int> prev_bounds;
  int stable = 0;
  bool converged = false;
  constexpr int kMaxSweeps = 1000;

  const auto run_sweep = [&](Eigen::VectorXd& out) {
    out.setZero();
    for (const Matrix& x : factors) {
      w.noalias() = x * v;
      qr_positive_inplace(w, q, r);
      for (int m = 0; m < n; ++m) {
        const double d = r(m, m).real();
        out(m) += (d > 0.0) ? std::log(d) : -kInf;
      }
      v = q;
    }
  };

  prev_logd.setConstant(std::numeric_limits<double>::quiet_NaN());
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    run_sweep(logd);
    const std::vector<int> bounds = cluster_boundaries(logd);
    bool ok = (sweep >= 2) && (bounds == prev_bounds);
    if (ok) {
      for (size_t c = 0; c + 1 < bounds.size() && ok; ++c) {
        double s = 0, sp = 0;
        for (int m = bounds[c]; m < bounds[c + 1]; ++m) {
          s += logd(m);
          sp += prev_logd(m);
        }
        const bool dead = !std::isfinite(s) && !std::isfinite(sp);
        if (!dead && !(std::abs(s - sp) <= 1e-11 * std::max(1.0, std::abs(s)))) ok = false;
        if (bounds[c + 1] - bounds[c] == 1 && !dead) {
          const double d = std::abs(logd(bounds[c]) - prev_logd(bounds[c]));
          if (!(d <= 1e-11 * std::max(1.0, std::abs(logd(bounds[c]))))) ok = false;
        }
      }
    }
    stable = ok ? stable + 1 : 0;
    if (stable >= 2) converged = true;
    prev_bounds = bounds;
    prev_logd = logd;
  }

  PeriodicSweepResult res;
  res.bounds = converged ? prev_bounds : std::vector<int>{0, n};

  // Extraction sweep: same iteration once more, additionally accumulating the
  // diagonal block products of the R chain for every non-singleton cluster.
  const Matrix v_start = v;
  const size_t ncl = res.bounds.size() - 1;
  res.blocks.resize(ncl);
  res.block_logs.assign(ncl, 0.0);
  for (size_t c = 0; c < ncl; ++c) {
    const int k = res.bounds[c + 1] - res.bounds[c];
    if (k > 1) res.blocks[c] = Matrix::Identity(k, k);
  }
  res.logd.resize(n);
  res.logd.setZero();
  for (const Matrix& x : factors) {
    w.noalias() = x * v;
    qr_positive_inplace(w, q, r);
    for (int m = 0; m < n; ++m) {
      const double d = r(m, m).real();
      res.logd(m) += (d > 0.0) ? std::log(d) : -kInf;
    }
    for (size_t c = 0; c < ncl; ++c) {
      const int k = res.bounds[c + 1] - res.bounds[c];
      if (k <= 1) continue;
      res.blocks[c] = r.block(res.bounds[c], res.bounds[c], k, k) * res.blocks[c];
      const double scale = res.blocks[c].cwiseAbs().maxCoeff();
      if (scale > 0.0) {
        res.blocks[c] /= scale;
        res.block_logs[c] += std::log(scale);
      } else {
        res.block_logs[c] = -kInf;
        res.blocks[c].setIdentity();
      }
    }
    v = q;
    if (keep_r_chain) res.r_chain.push_back(r);
  }
  res.psi = v_start.adjoint() * v;
  return res;
}

// Eigenvalues of a small matrix; 2x2 via the det-corrected quadratic so the
// small root keeps full relative accuracy, larger blocks via Eigen.
std::vector<Complex> small_eigenvalues(const Matrix& m) {
  const int k = static_cast<int>(m.rows());
  if (k == 1) return {m(0, 0)};
  if (k == 2) {
    const Complex tr = m(0, 0) + m(1, 1);
    const Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const Complex disc = std::sqrt(tr * tr - 4.0 * det);
    const Complex cand1 = 0.5 * (tr + disc), cand2 = 0.5 * (tr - disc);
    const Complex l1 = (std::abs(cand1) >= std::abs(cand2)) ? cand1 : cand2;
    if (std::abs(l1) == 0.0) return {Complex(0, 0), Complex(0, 0)};
    return {l1, det / l1};
  }
  Eigen::ComplexEigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
  std::vector<Complex> out(k);
  for (int i = 0; i < k; ++i) out[i] = es.eigenvalues()(i);
  return out;
}

}  // namespace

LogSpectrum log_eigenvalue_moduli(std::span<const Matrix> factors) {
  if (factors.empty()) throw std::invalid_argument("log_eigenvalue_moduli: need t >= 1");
  const int n = static_cast<int>(factors.front().rows());
  PeriodicSweepResult res = periodic_sweep(factors, /*keep_r_chain=*/false);

  std::vector<std::pair<double, double>> vals;  // (log modulus, angle)
  vals.reserve(n);
  for (size_t c = 0; c + 1 < res.bounds.size(); ++c) {
    const int lo = res.bounds[c];
    const int k = res.bounds[c + 1] - lo;
    if (k == 1) {
      const Complex ph = res.psi(lo, lo);
      vals.emplace_back(res.logd(lo), std::abs(ph) > 0 ? wrap_angle(std::arg(ph)) : 0.0);
    } else {
      const Matrix block = res.psi.block(lo, lo, k, k) * res.blocks[c];
      for (const Complex& ev : small_eigenvalues(block)) {
        const double mag = std::abs(ev);
        vals.emplace_back(mag > 0 ? res.block_logs[c] + std::log(mag) : -kInf,
                          mag > 0 ? wrap_angle(std::arg(ev)) : 0.0);
      }
    }
  }
  std::sort(vals.begin(), vals.end());
  LogSpectrum sp;
  sp.kind = SpectrumKind::log_modulus;
  sp.n = n;
  sp.t = static_cast<int>(factors.size());
  for (auto& [v, a] : vals) {
    sp.values.push_back(v);
    sp.angles.push_back(a);
  }
  return sp;
}

SchurData2x2 schur_chain_2x2(std::span<const Matrix> factors) {
  if (factors.empty()) throw std::invalid_argument("schur_chain_2x2: need t >= 1");
  if (factors.front().rows() != 2 || factors.front().cols() != 2)
    throw std::invalid_argument("schur_chain_2x2: factors must be 2x2");
  PeriodicSweepResult res = periodic_sweep(factors, /*keep_r_chain=*/true);

  SchurData2x2 sd;
  if (res.bounds.size() == 3) {
    // Separated moduli: the diagonal entries telescope through the chain and
    // Delta follows the triangular-product recursion, rescaled each step.
    sd.log_z1 = res.logd(0);
    sd.log_z2 = res.logd(1);
    sd.phase_z1 = wrap_angle(std::arg(res.psi(0, 0)));
    sd.phase_z2 = wrap_angle(std::arg(res.psi(1, 1)));
    Complex d(0, 0);
    double dlog = -kInf;
    double l2_partial = 0;
    for (const Matrix& r : res.r_chain) {
      const double r00 = r(0, 0).real();
      const Complex r01 = r(0, 1);
      const double term1 = (r00 > 0 && dlog > -kInf) ? dlog + std::log(r00) : -kInf;
      const double a01 = std::abs(r01);
      const double term2 = (a01 > 0) ? l2_partial + std::log(a01) : -kInf;
      const double m = std::max(term1, term2);
      if (m == -kInf) {
        d = Complex(0, 0);
        dlog = -kInf;
      } else {
        Complex nd(0, 0);
        if (term1 > -kInf) nd += d * std::exp(term1 - m);
        if (term2 > -kInf) nd += (r01 / a01) * std::exp(term2 - m);
        const double nmag = std::abs(nd);
        if (nmag == 0.0) {
          d = Complex(0, 0);
          dlog = -kInf;
        } else {
          d = nd / nmag;
          dlog = m + std::log(nmag);
        }
      }
      l2_partial += (r(1, 1).real() > 0) ? std::log(r(1, 1).real()) : -kInf;
    }
    sd.log_abs_delta = dlog;
  } else {
    // Clustered moduli: Schur form of the accumulated 2x2 block.
    const Matrix m = res.psi * res.blocks[0];
    const auto evs = small_eigenvalues(m);
    const Complex l1 = evs[0], l2 = evs[1];
    sd.log_z1 = (std::abs(l1) > 0) ? res.block_logs[0] + std::log(std::abs(l1)) : -kInf;
    sd.log_z2 = (std::abs(l2) > 0) ? res.block_logs[0] + std::log(std::abs(l2)) : -kInf;
    sd.phase_z1 = wrap_angle(std::arg(l1));
    sd.phase_z2 = wrap_angle(std::arg(l2));
    // Schur off-diagonal: v1 the unit eigenvector of l1, u2 its complement.
    Eigen::Vector2cd v1;
    const Eigen::Vector2cd r1(m(0, 1), l1 - m(0, 0));
    const Eigen::Vector2cd r2(l1 - m(1, 1), m(1, 0));
    v1 = (r1.norm() >= r2.norm()) ? r1 : r2;
    const double vn = v1.norm();
    if (vn == 0.0) {
      sd.log_abs_delta = (m.cwiseAbs().maxCoeff() > 0)
                             ? res.block_logs[0] + std::log(m.cwiseAbs().maxCoeff())
                             : -kInf;
    } else {
      v1 /= vn;
      const Eigen::Vector2cd u2(-std::conj(v1(1)), std::conj(v1(0)));
      const Complex t01 = v1.dot(m * u2);
      sd.log_abs_delta =
          (std::abs(t01) > 0) ? res.block_logs[0] + std::log(std::abs(t01)) : -kInf;
    }
  }
  return sd;
}

double max_exponent_2x2(const SchurData2x2& sd, int t) {
  if (t < 1) throw std::invalid_argument("max_exponent_2x2: t must be >= 1");
  const double l1 = sd.log_z1, l2 = sd.log_z2, ld = sd.log_abs_delta;
  const double big = std::max(l1, l2), sml = std::min(l1, l2);
  if (big == -kInf && ld == -kInf) return -kInf;  // zero product matrix
  const double cap = std::max(2.0 * big, 2.0 * ld);
  const auto e = [&](double x) { return (x == -kInf) ? 0.0 : std::exp(x - cap); };
  const double a = e(2 * l1) + e(2 * l2) + e(2 * ld);
  // a -/+ 2|z1 z2| e^{-cap}, both written without cancellation
  const double qr = (sml == -kInf) ? 0.0 : std::exp(sml - big);
  const double gap2 = (big == -kInf) ? 0.0 : std::exp(2 * big - cap);
  const double am = gap2 * (-std::expm1(sml - big)) * (-std::expm1(sml - big)) + e(2 * ld);
  const double ap = gap2 * (1 + qr) * (1 + qr) + e(2 * ld);
  const double b = std::sqrt(am * ap);
  const double mu = (cap + std::log(0.5 * (a + b))) / (2.0 * t);
  return std::max(mu, big / t);  // the lower bound holds exactly
}

}  // namespace lyap::kernels
