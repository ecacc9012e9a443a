#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

// Deterministic, parallel-safe sampling. Every stream is a pure function of
// (master_seed, stream_id); parallelism across samples uses distinct stream
// ids instead of shared generator state, so results never depend on thread
// count or scheduling.

namespace lyap::rng {

// Counter-based generator (Philox 4x32-10). The 128-bit counter is
// (block, stream_id), the key is the master seed.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Standard normal, Box-Muller (second value cached).
  double normal();
  /// Complex Gaussian with E|z|^2 = 1 (real and imaginary variance 1/2).
  std::complex<double> complex_normal();
  /// Gamma(shape, unit scale), shape > 0, Marsaglia-Tsang.
  double gamma(double shape);

 private:
  void refill();

  std::uint64_t master_seed_, stream_id_, block_ = 0;
  std::uint32_t buf_[4];
  int pos_ = 4;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

inline RngStream derive_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
  return RngStream(master_seed, stream_id);
}

enum class Family { ginibre_beta1, ginibre_beta2, ginibre_beta4, isotropic_custom };
enum class Observable {
  sv_lyapunov,
  ev_lyapunov,
  incremental_sv,
  incremental_radius,
  two_by_two_schur
};

// Callable producing the singular value profile of one isotropic-custom draw.
using SvSampler = std::function<std::vector<double>(RngStream&, int)>;

struct EnsembleSpec {
  Family family = Family::ginibre_beta2;
  int n = 1;              // matrix size (beta=4 realizes 2n x 2n)
  int t = 1;              // number of factors
  long samples = 1;
  std::uint64_t master_seed = 0;
  Observable observable = Observable::sv_lyapunov;
  SvSampler sv_sampler;   // required for isotropic_custom

  void validate() const;  // throws std::invalid_argument on bad fields
  /// Realized complex dimension of one factor (2n for beta=4).
  int realized_dim() const { return family == Family::ginibre_beta4 ? 2 * n : n; }
  std::string family_name() const;
  std::string observable_name() const;
};

int beta_of(Family f);

/// One Ginibre-type draw; beta in {1, 2, 4}. beta=2: N x N complex entries
/// with E|x|^2 = 1. beta=1: real N(0,1) entries embedded as complex.
/// beta=4: 2N x 2N quaternion block structure [[A, B], [-conj(B), conj(A)]]
/// with A, B complex Gaussian, E|a|^2 = 1.
Eigen::MatrixXcd sample_ginibre(RngStream& rng, int beta, int n);

/// Haar-unitary N x N matrix (QR of a Ginibre draw, R-diagonal made
/// positive real).
Eigen::MatrixXcd sample_haar_unitary(RngStream& rng, int n);

/// U diag(s) V with U, V independent Haar and s = sv_sampler(rng, n);
/// bi-unitarily invariant by construction. Rejects nonpositive s.
Eigen::MatrixXcd sample_isotropic_custom(RngStream& rng, int n, const SvSampler& sv_sampler);

/// One evolution factor according to spec.family.
Eigen::MatrixXcd sample_factor(RngStream& rng, const EnsembleSpec& spec);

}  // namespace lyap::rng
