#include "lyap/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <gsl/gsl_sf_gamma.h>

namespace lyap::mc {

namespace {

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Runs fn(i) for i in [0, count) on a worker pool. The first exception wins
// and aborts the run.
void parallel_for(long count, int threads, const std::function<void(long)>& fn) {
  threads = std::min<long>(resolve_threads(threads), count);
  if (threads <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const long i = next.fetch_add(1);
        if (i >= count) return;
        {
          std::lock_guard<std::mutex> lock(error_mu);
          if (error) return;
        }
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// beta = 4 spectra are doubly degenerate; collapse 2N sorted values into N
// pair representatives.
std::vector<double> collapse_pairs(const std::vector<double>& v) {
  std::vector<double> out(v.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (v[2 * i] + v[2 * i + 1]);
  return out;
}

}  // namespace

std::vector<double> SampleSet::column_sorted(int b) const {
  std::vector<double> out(n_rows);
  for (long i = 0; i < n_rows; ++i) out[i] = value(i, b);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> SampleSet::pooled_sorted() const {
  std::vector<double> out(rows);
  std::sort(out.begin(), out.end());
  return out;
}

std::string provenance_digest(const rng::EnsembleSpec& spec) {
  std::ostringstream os;
  os << "family=" << spec.family_name() << " N=" << spec.n << " t=" << spec.t
     << " samples=" << spec.samples << " seed=" << spec.master_seed
     << " observable=" << spec.observable_name();
  return os.str();
}

SampleSet run_sv_experiment(const rng::EnsembleSpec& spec, int threads) {
  spec.validate();
  if (spec.observable != rng::Observable::sv_lyapunov &&
      spec.observable != rng::Observable::incremental_sv)
    throw std::invalid_argument("run_sv_experiment: wrong observable");
  const bool incremental = spec.observable == rng::Observable::incremental_sv;
  const bool quaternion = spec.family == rng::Family::ginibre_beta4;

  SampleSet set;
  set.spec = spec;
  set.n_cols = spec.n;
  set.n_rows = spec.samples;
  set.rows.resize(spec.samples * static_cast<long>(spec.n));

  parallel_for(spec.samples, threads, [&](long i) {
    rng::RngStream stream = rng::derive_stream(spec.master_seed, static_cast<std::uint64_t>(i));
    kernels::ProductSvdAccumulator acc(spec.realized_dim());
    for (int j = 0; j < spec.t; ++j) acc.push(rng::sample_factor(stream, spec));
    std::vector<double> vals = acc.spectrum().values;
    if (quaternion) vals = collapse_pairs(vals);
    for (int b = 0; b < spec.n; ++b) {
      const double mu = vals[b] / (2.0 * spec.t);
      set.rows[i * spec.n + b] = incremental ? std::exp(mu) : mu;
    }
  });
  return set;
}

SampleSet run_ev_experiment(const rng::EnsembleSpec& spec, EvMethod method, int threads) {
  spec.validate();
  if (spec.observable != rng::Observable::ev_lyapunov &&
      spec.observable != rng::Observable::incremental_radius)
    throw std::invalid_argument("run_ev_experiment: wrong observable");
  const bool incremental = spec.observable == rng::Observable::incremental_radius;
  const int beta = rng::beta_of(spec.family);
  if (method == EvMethod::gamma_product && beta != 2 && beta != 4)
    throw std::invalid_argument("run_ev_experiment: gamma-product method needs beta in {2, 4}");

  SampleSet set;
  set.spec = spec;
  set.n_cols = spec.n;
  set.n_rows = spec.samples;
  set.rows.resize(spec.samples * static_cast<long>(spec.n));
  const bool quaternion = spec.family == rng::Family::ginibre_beta4;
  const bool real_family = spec.family == rng::Family::ginibre_beta1;
  if (method == EvMethod::matrix) {
    set.angles.resize(set.rows.size());
    if (real_family) set.real_fraction.resize(spec.samples);
  }

  parallel_for(spec.samples, threads, [&](long i) {
    rng::RngStream stream = rng::derive_stream(spec.master_seed, static_cast<std::uint64_t>(i));
    if (method == EvMethod::gamma_product) {
      // Moduli of the complex eigenvalues factorize into independent gamma
      // products: nu_n = (1/2t) sum_j ln gamma_j, shape n (beta=2) or 2n
      // (beta=4), an unordered set over n, then sorted.
      std::vector<double> nu(spec.n);
      for (int n = 1; n <= spec.n; ++n) {
        const double shape = (beta == 4) ? 2.0 * n : static_cast<double>(n);
        double acc = 0;
        for (int j = 0; j < spec.t; ++j) acc += std::log(stream.gamma(shape));
        nu[n - 1] = acc / (2.0 * spec.t);
      }
      std::sort(nu.begin(), nu.end());
      for (int b = 0; b < spec.n; ++b)
        set.rows[i * spec.n + b] = incremental ? std::exp(nu[b]) : nu[b];
      return;
    }
    std::vector<kernels::Matrix> factors;
    factors.reserve(spec.t);
    for (int j = 0; j < spec.t; ++j) factors.push_back(rng::sample_factor(stream, spec));
    const kernels::LogSpectrum sp = kernels::log_eigenvalue_moduli(factors);
    std::vector<double> vals = sp.values;
    std::vector<double> angs = sp.angles;
    if (quaternion) {
      vals = collapse_pairs(vals);
      std::vector<double> a2(angs.size() / 2);
      for (size_t k = 0; k < a2.size(); ++k) {
        const double a = angs[2 * k], b = angs[2 * k + 1];
        a2[k] = std::min(a, b);  // representative of the conjugate pair
      }
      angs = a2;
    }
    if (real_family) {
      int reals = 0;
      for (double a : angs)
        if (std::abs(std::sin(a)) < 1e-7) ++reals;
      set.real_fraction[i] = static_cast<double>(reals) / angs.size();
    }
    for (int b = 0; b < spec.n; ++b) {
      const double nu = vals[b] / spec.t;
      set.rows[i * spec.n + b] = incremental ? std::exp(nu) : nu;
      set.angles[i * spec.n + b] = angs[b];
    }
  });
  return set;
}

Bounds2x2Result run_2x2_bounds(const rng::EnsembleSpec& spec, int threads) {
  spec.validate();
  if (spec.n != 2) throw std::invalid_argument("run_2x2_bounds: needs N = 2");
  if (spec.family == rng::Family::ginibre_beta4)
    throw std::invalid_argument("run_2x2_bounds: quaternion factors are 4x4; not supported");

  Bounds2x2Result res;
  res.samples = spec.samples;
  res.max_exponents.resize(spec.samples);
  std::vector<double> residuals(spec.samples);
  std::vector<char> violated(spec.samples, 0);

  parallel_for(spec.samples, threads, [&](long i) {
    rng::RngStream stream = rng::derive_stream(spec.master_seed, static_cast<std::uint64_t>(i));
    std::vector<kernels::Matrix> factors;
    factors.reserve(spec.t);
    for (int j = 0; j < spec.t; ++j) factors.push_back(rng::sample_factor(stream, spec));
    const kernels::SchurData2x2 sd = kernels::schur_chain_2x2(factors);
    const double mu_max = kernels::max_exponent_2x2(sd, spec.t);
    res.max_exponents[i] = mu_max;
    violated[i] = mu_max < std::max(sd.log_z1, sd.log_z2) / spec.t;
    const kernels::LogSpectrum sv = kernels::log_singular_values(factors);
    const double mu_sum = sv.sum() / (2.0 * spec.t);
    const double nu_sum = (sd.log_z1 + sd.log_z2) / spec.t;
    residuals[i] = std::abs(mu_sum - nu_sum);
  });
  for (long i = 0; i < spec.samples; ++i) {
    res.lower_bound_violations += violated[i];
    res.max_sum_identity_residual = std::max(res.max_sum_identity_residual, residuals[i]);
    res.mean_max_exponent += res.max_exponents[i];
  }
  res.mean_max_exponent /= spec.samples;
  return res;
}

NewmanEstimate newman_projector_average(int n, int k, long samples, std::uint64_t seed) {
  if (n < 1 || k < 1 || k > n)
    throw std::invalid_argument("newman_projector_average: need 1 <= k <= N");
  if (samples < 2) throw std::invalid_argument("newman_projector_average: need samples >= 2");
  NewmanEstimate est;
  est.n = n;
  est.k = k;
  est.samples = samples;
  double sum = 0, sumsq = 0;
  for (long i = 0; i < samples; ++i) {
    rng::RngStream stream = rng::derive_stream(seed, static_cast<std::uint64_t>(i));
    const Eigen::MatrixXcd x = rng::sample_ginibre(stream, 2, n);
    const Eigen::MatrixXcd cols = x.leftCols(k);
    const Eigen::MatrixXcd gram = cols.adjoint() * cols;
    Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("newman_projector_average: Gram factorization failed");
    double logdet = 0;
    for (int j = 0; j < k; ++j) logdet += 2.0 * std::log(llt.matrixL()(j, j).real());
    const double v = 0.5 * logdet;
    sum += v;
    sumsq += v * v;
  }
  est.estimate = sum / samples;
  const double var = std::max(0.0, sumsq / samples - est.estimate * est.estimate);
  est.std_error = std::sqrt(var / samples);
  // P_k embeds the first k coordinates; by unitary invariance its Gram
  // determinant averages to the top-k digamma sum (checked empirically
  // against the maximizer in the tests).
  est.target = 0;
  for (int j = n - k + 1; j <= n; ++j) est.target += 0.5 * specfun::digamma(j);
  return est;
}

Histogram make_histogram(std::span<const double> values, double lo, double hi, int n_bins,
                         std::string provenance) {
  if (!(lo < hi)) throw std::invalid_argument("histogram: need lo < hi");
  if (n_bins < 1) throw std::invalid_argument("histogram: need n_bins >= 1");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.n_bins = n_bins;
  h.counts.assign(n_bins, 0);
  h.provenance = std::move(provenance);
  const double w = h.bin_width();
  for (double v : values) {
    if (v < lo || v > hi) continue;
    int bin = static_cast<int>((v - lo) / w);
    if (bin == n_bins) bin = n_bins - 1;  // right edge closed
    ++h.counts[bin];
    ++h.total;
  }
  if (h.total == 0) throw std::invalid_argument("histogram: no values in range");
  h.density.resize(n_bins);
  for (int i = 0; i < n_bins; ++i)
    h.density[i] = static_cast<double>(h.counts[i]) / (h.total * w);
  return h;
}

Histogram histogram(const SampleSet& set, int component, double lo, double hi, int n_bins) {
  std::vector<double> vals;
  if (component == kPooled) {
    vals = set.rows;
  } else {
    if (component < 0 || component >= set.n_cols)
      throw std::invalid_argument("histogram: component out of range");
    vals.reserve(set.n_rows);
    for (long i = 0; i < set.n_rows; ++i) vals.push_back(set.value(i, component));
  }
  return make_histogram(vals, lo, hi, n_bins, provenance_digest(set.spec));
}

double ks_distance(std::span<const double> sorted_samples, const laws::DensityModel& model) {
  const long n = static_cast<long>(sorted_samples.size());
  if (n == 0) throw std::invalid_argument("ks_distance: empty sample");
  double d = 0;
  for (long i = 0; i < n; ++i) {
    const double f = model.cdf(sorted_samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
  }
  return d;
}

double ks_distance(const Histogram& h, const laws::DensityModel& model) {
  double d = std::abs(model.cdf(h.lo));
  double cum = 0;
  for (int i = 0; i < h.n_bins; ++i) {
    cum += static_cast<double>(h.counts[i]) / h.total;
    d = std::max(d, std::abs(model.cdf(h.lo + (i + 1) * h.bin_width()) - cum));
  }
  return d;
}

double ks_distance_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance_two_sample: empty sample");
  size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

double ks_pvalue(double d, long n) {
  const double lam = d * (std::sqrt(static_cast<double>(n)) + 0.12 + 0.11 / std::sqrt(n));
  double p = 0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lam * lam);
    p += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

double chi_square_uniform_pvalue(std::span<const double> angles, int bins) {
  if (bins < 2) throw std::invalid_argument("chi_square_uniform_pvalue: need >= 2 bins");
  std::vector<long> counts(bins, 0);
  for (double a : angles) {
    int b = static_cast<int>(a / (2.0 * M_PI) * bins);
    b = std::clamp(b, 0, bins - 1);
    ++counts[b];
  }
  const double expected = static_cast<double>(angles.size()) / bins;
  double stat = 0;
  for (long c : counts) stat += (c - expected) * (c - expected) / expected;
  return gsl_sf_gamma_inc_Q(0.5 * (bins - 1), 0.5 * stat);
}

}  // namespace lyap::mc
