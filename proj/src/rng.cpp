#include "lyap/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace lyap::rng {

namespace {

inline void philox_round(std::uint32_t c[4], const std::uint32_t k[2]) {
  const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c[0];
  const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  c[0] = hi1 ^ c[1] ^ k[0];
  c[1] = lo1;
  c[2] = hi0 ^ c[3] ^ k[1];
  c[3] = lo0;
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id) {}

void RngStream::refill() {
  std::uint32_t c[4] = {
      static_cast<std::uint32_t>(block_),
      static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(stream_id_),
      static_cast<std::uint32_t>(stream_id_ >> 32),
  };
  std::uint32_t k[2] = {
      static_cast<std::uint32_t>(master_seed_),
      static_cast<std::uint32_t>(master_seed_ >> 32),
  };
  for (int round = 0; round < 10; ++round) {
    philox_round(c, k);
    k[0] += 0x9E3779B9u;
    k[1] += 0xBB67AE85u;
  }
  buf_[0] = c[0];
  buf_[1] = c[1];
  buf_[2] = c[2];
  buf_[3] = c[3];
  pos_ = 0;
  ++block_;
}

std::uint64_t RngStream::next_u64() {
  if (pos_ >= 4) refill();
  const std::uint64_t lo = buf_[pos_];
  const std::uint64_t hi = buf_[pos_ + 1];
  pos_ += 2;
  return lo | (hi << 32);
}

double RngStream::uniform() {
  // 53-bit mantissa, offset by half an ulp so the result is never 0 or 1.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(a);
  has_cached_normal_ = true;
  return r * std::cos(a);
}

std::complex<double> RngStream::complex_normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-std::log(u1));  // |z|^2 ~ Exp(1)
  const double a = 2.0 * M_PI * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) throw std::domain_error("gamma: requires shape > 0");
  if (shape < 1.0) {
    // Boost a Gamma(shape + 1) draw down with a uniform power.
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

void EnsembleSpec::validate() const {
  if (n < 1) throw std::invalid_argument("EnsembleSpec: N must be >= 1");
  if (t < 1) throw std::invalid_argument("EnsembleSpec: t must be >= 1");
  if (samples < 1) throw std::invalid_argument("EnsembleSpec: samples must be >= 1");
  if (family == Family::isotropic_custom && !sv_sampler)
    throw std::invalid_argument("EnsembleSpec: isotropic_custom needs an sv_sampler");
}

std::string EnsembleSpec::family_name() const {
  switch (family) {
    case Family::ginibre_beta1: return "ginibre-beta1";
    case Family::ginibre_beta2: return "ginibre-beta2";
    case Family::ginibre_beta4: return "ginibre-beta4";
    case Family::isotropic_custom: return "isotropic-custom";
  }
  return "?";
}

std::string EnsembleSpec::observable_name() const {
  switch (observable) {
    case Observable::sv_lyapunov: return "sv-lyapunov";
    case Observable::ev_lyapunov: return "ev-lyapunov";
    case Observable::incremental_sv: return "incremental-sv";
    case Observable::incremental_radius: return "incremental-radius";
    case Observable::two_by_two_schur: return "two-by-two-schur";
  }
  return "?";
}

int beta_of(Family f) {
  switch (f) {
    case Family::ginibre_beta1: return 1;
    case Family::ginibre_beta2: return 2;
    case Family::ginibre_beta4: return 4;
    case Family::isotropic_custom: return 0;
  }
  return 0;
}

Eigen::MatrixXcd sample_ginibre(RngStream& rng, int beta, int n) {
  if (n < 1) throw std::domain_error("sample_ginibre: requires N >= 1");
  switch (beta) {
    case 1: {
      Eigen::MatrixXcd x(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) x(i, j) = rng.normal();
      return x;
    }
    case 2: {
      Eigen::MatrixXcd x(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) x(i, j) = rng.complex_normal();
      return x;
    }
    case 4: {
      Eigen::MatrixXcd a(n, n), b(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.complex_normal();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = rng.complex_normal();
      Eigen::MatrixXcd x(2 * n, 2 * n);
      x.topLeftCorner(n, n) = a;
      x.topRightCorner(n, n) = b;
      x.bottomLeftCorner(n, n) = -b.conjugate();
      x.bottomRightCorner(n, n) = a.conjugate();
      return x;
    }
    default:
      throw std::domain_error("sample_ginibre: beta must be 1, 2 or 4");
  }
}

Eigen::MatrixXcd sample_haar_unitary(RngStream& rng, int n) {
  const Eigen::MatrixXcd g = sample_ginibre(rng, 2, n);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Naive QR is not Haar: fix the gauge so R has positive real diagonal.
  for (int j = 0; j < n; ++j) {
    const std::complex<double> d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0) q.col(j) *= d / mag;
  }
  return q;
}

Eigen::MatrixXcd sample_isotropic_custom(RngStream& rng, int n, const SvSampler& sv_sampler) {
  if (n < 1) throw std::domain_error("sample_isotropic_custom: requires N >= 1");
  if (!sv_sampler) throw std::invalid_argument("sample_isotropic_custom: null sv_sampler");
  const Eigen::MatrixXcd u = sample_haar_unitary(rng, n);
  const Eigen::MatrixXcd v = sample_haar_unitary(rng, n);
  const std::vector<double> s = sv_sampler(rng, n);
  if (static_cast<int>(s.size()) != n)
    throw std::invalid_argument("sample_isotropic_custom: sv_sampler returned wrong length");
  for (double sv : s)
    if (!(sv > 0.0) || !std::isfinite(sv))
      throw std::invalid_argument("sample_isotropic_custom: singular values must be positive");
  Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(s.data(), n);
  return u * diag.asDiagonal() * v;
}

Eigen::MatrixXcd sample_factor(RngStream& rng, const EnsembleSpec& spec) {
  if (spec.family == Family::isotropic_custom)
    return sample_isotropic_custom(rng, spec.n, spec.sv_sampler);
  return sample_ginibre(rng, beta_of(spec.family), spec.n);
}

}  // namespace lyap::rng
