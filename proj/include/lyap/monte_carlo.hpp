#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lyap/finite_t_laws.hpp"
#include "lyap/matrix_kernels.hpp"
#include "lyap/rng.hpp"

// Reproducible ensemble experiments. Sample i of an experiment always uses
// RNG stream i, so results are bit-identical for a fixed EnsembleSpec no
// matter how many worker threads run. A failure in any sample aborts the
// whole run; nothing is silently resampled.

namespace lyap::mc {

struct SampleSet {
  rng::EnsembleSpec spec;
  int n_cols = 0;                     // per-row component count
  long n_rows = 0;
  std::vector<double> rows;           // row-major, each row sorted ascending
  std::vector<double> angles;         // eigenvalue experiments (matrix method)
  std::vector<double> real_fraction;  // beta=1 eigenvalue runs, per sample

  double value(long i, int b) const { return rows[i * n_cols + b]; }
  std::span<const double> row(long i) const {
    return {rows.data() + i * n_cols, static_cast<size_t>(n_cols)};
  }
  /// Samples of the b-th order statistic (0-based), sorted ascending.
  std::vector<double> column_sorted(int b) const;
  std::vector<double> pooled_sorted() const;
};

enum class EvMethod { matrix, gamma_product };

/// mu rows (sv-lyapunov) or lambda = exp(mu) rows (incremental-sv).
SampleSet run_sv_experiment(const rng::EnsembleSpec& spec, int threads = 0);

/// nu rows (ev-lyapunov) or r = exp(nu) rows (incremental-radius). The
/// gamma-product method is exact in distribution for beta in {2, 4} and is
/// the default fast path; the matrix method also yields angles.
SampleSet run_ev_experiment(const rng::EnsembleSpec& spec,
                            EvMethod method = EvMethod::gamma_product, int threads = 0);

struct Bounds2x2Result {
  long samples = 0;
  long lower_bound_violations = 0;     // exact inequality: must stay 0
  double max_sum_identity_residual = 0;  // |mu1+mu2 - (nu1+nu2)| worst case
  double mean_max_exponent = 0;
  std::vector<double> max_exponents;   // per sample
};

/// Per-sample 2x2 bound checks (N = 2 isotropic families).
Bounds2x2Result run_2x2_bounds(const rng::EnsembleSpec& spec, int threads = 0);

struct NewmanEstimate {
  int n = 0, k = 0;
  long samples = 0;
  double estimate = 0;  // (1/2) < ln det P_k^H X^H X P_k > over single draws
  double std_error = 0;
  double target = 0;    // (1/2) sum_{j=N-k+1}^{N} psi(j)
};

NewmanEstimate newman_projector_average(int n, int k, long samples, std::uint64_t seed);

struct Histogram {
  double lo = 0, hi = 0;
  int n_bins = 0;
  std::vector<long> counts;
  std::vector<double> density;  // sums to 1 against bin width
  long total = 0;
  std::string provenance;

  double bin_width() const { return (hi - lo) / n_bins; }
  double center(int i) const { return lo + (i + 0.5) * bin_width(); }
};

inline constexpr int kPooled = -1;

Histogram make_histogram(std::span<const double> values, double lo, double hi, int n_bins,
                         std::string provenance = {});
/// component: kPooled mixes all N columns, otherwise 0-based index b.
Histogram histogram(const SampleSet& set, int component, double lo, double hi, int n_bins);

std::string provenance_digest(const rng::EnsembleSpec& spec);

/// sup |F_emp - F_model| for an ascending-sorted sample vector.
double ks_distance(std::span<const double> sorted_samples, const laws::DensityModel& model);
double ks_distance(const Histogram& h, const laws::DensityModel& model);
/// Two-sample KS statistic (both vectors ascending).
double ks_distance_two_sample(std::span<const double> a, std::span<const double> b);
/// Asymptotic Kolmogorov p-value for a one-sample statistic.
double ks_pvalue(double d, long n);

/// Chi-square uniformity p-value for angles on [0, 2*pi) with `bins` sectors.
double chi_square_uniform_pvalue(std::span<const double> angles, int bins);

}  // namespace lyap::mc
