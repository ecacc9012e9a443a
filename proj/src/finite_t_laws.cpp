#include "lyap/finite_t_laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include <Eigen/Dense>

#include "lyap/asymptotic.hpp"

namespace lyap::laws {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_indices(int a, int b, int t) {
  if (a < 1 || b < 1) throw std::domain_error("law indices a, b must be >= 1");
  if (t < 1) throw std::domain_error("t must be >= 1");
}

double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * M_PI * var) + d * d / var);
}

double normal_cdf(double x, double mean, double sigma) {
  return 0.5 * std::erfc(-(x - mean) / (sigma * std::sqrt(2.0)));
}

}  // namespace

PeakParams peak_params(int b, int t) {
  check_indices(1, b, t);
  PeakParams p;
  p.b = b;
  p.t = t;
  p.mean = 0.5 * specfun::digamma(b);
  p.sigma = std::sqrt(specfun::polygamma(1, b) / (4.0 * t));
  return p;
}

double log_f_ab_exact(int a, int b, int t, double mu) {
  check_indices(a, b, t);
  const auto params = specfun::MeijerParams::repeated(
      b, t - 1, {static_cast<double>(a + b - 1)});
  return std::log(2.0 * t) + specfun::log_meijer_g_t0_logarg(params, 2.0 * t * mu) -
         (t - 1) * specfun::log_gamma(b) - specfun::log_gamma(a + b - 1);
}

double f_ab_exact(int a, int b, int t, double mu) {
  return std::exp(log_f_ab_exact(a, b, t, mu));
}

std::vector<double> cumulants_ab(int a, int b, int t, int n_max) {
  check_indices(a, b, t);
  if (n_max < 1 || n_max > 8) throw std::domain_error("cumulants_ab: n_max must be in [1, 8]");
  std::vector<double> k(n_max);
  for (int n = 1; n <= n_max; ++n) {
    const double pb = specfun::polygamma(n - 1, b);
    const double pab = specfun::polygamma(n - 1, a + b - 1);
    k[n - 1] = (0.5 * pb + (pab - pb) / (2.0 * t)) / std::pow(2.0 * t, n - 1);
  }
  return k;
}

double gaussian_peak(int b, int t, double x) {
  const PeakParams p = peak_params(b, t);
  return std::exp(log_normal_pdf(x, p.mean, p.sigma * p.sigma));
}

double log_saddle_h_ab(int a, int b, int t, double mu) {
  check_indices(a, b, t);
  const double th = specfun::theta0(mu);
  return 0.5 * (std::log(2.0 * t / M_PI) - std::log(specfun::polygamma(1, th))) +
         (t - 1) * (specfun::log_gamma(th) - specfun::log_gamma(b)) +
         specfun::log_gamma(a - 1 + th) - specfun::log_gamma(a + b - 1) -
         2.0 * t * mu * (th - b);
}

double saddle_h_ab(int a, int b, int t, double mu) {
  return std::exp(log_saddle_h_ab(a, b, t, mu));
}

namespace {

// Raw cofactor-weighted saddle mixture of Eq.-style weights
// (1/N) sum_{j,l} (C_jl / det) Gamma(j+l-1) * saddle_f_jl(mu).
double saddle_mixture_raw(int n, int t, double mu) {
  double acc = 0.0;
  for (int j = 1; j <= n; ++j) {
    for (int l = 1; l <= n; ++l) {
      const double w =
          specfun::hankel_cofactor_ratio(n, j, l) * std::exp(specfun::log_gamma(j + l - 1));
      if (w == 0.0) continue;
      acc += w * std::exp(log_saddle_h_ab(j, l, t, mu));
    }
  }
  return acc / n;
}

// Normalization of the raw saddle mixture, cached per (n, t).
double saddle_norm(int n, int t) {
  static std::map<std::pair<int, int>, double> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_pair(n, t);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const PeakParams lo = peak_params(1, t);
  const PeakParams hi = peak_params(n, t);
  const double a = lo.mean - 12.0 * lo.sigma - 0.5 / t;
  const double b = hi.mean + 12.0 * hi.sigma + 0.5 / t;
  const int grid = 4000;  // Simpson
  const double h = (b - a) / grid;
  double s = saddle_mixture_raw(n, t, a) + saddle_mixture_raw(n, t, b);
  for (int i = 1; i < grid; ++i)
    s += saddle_mixture_raw(n, t, a + i * h) * ((i % 2) ? 4.0 : 2.0);
  const double norm = s * h / 3.0;
  cache[key] = norm;
  return norm;
}

}  // namespace

double density_sv_lyapunov(int n, int t, double mu, SvDensityMethod method) {
  check_indices(1, n, t);
  if (method == SvDensityMethod::gaussian) {
    double acc = 0.0;
    for (int b = 1; b <= n; ++b) acc += gaussian_peak(b, t, mu);
    return acc / n;
  }
  if (n > 12) throw std::domain_error("density_sv_lyapunov: saddle path needs N <= 12");
  return std::max(0.0, saddle_mixture_raw(n, t, mu) / saddle_norm(n, t));
}

double density_incremental_sv(int n, int t, double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("density_incremental_sv: requires lambda > 0");
  return density_sv_lyapunov(n, t, std::log(lambda), SvDensityMethod::gaussian) / lambda;
}

double log_eigen_peak_exact(int a, int b, int t, double nu) {
  check_indices(a, b, t);
  const double idx = 0.5 * (a + b);
  const auto params = specfun::MeijerParams::repeated(idx, t);
  return std::log(2.0 * t) + specfun::log_meijer_g_t0_logarg(params, 2.0 * t * nu) -
         t * specfun::log_gamma(idx);
}

double eigen_peak_exact(int a, int b, int t, double nu) {
  return std::exp(log_eigen_peak_exact(a, b, t, nu));
}

double eigen_prefactor(int a, int b, int t) {
  check_indices(a, b, t);
  return std::exp(t * (specfun::log_gamma(0.5 * (a + b)) -
                       0.5 * (specfun::log_gamma(a) + specfun::log_gamma(b))));
}

namespace {

// log|det| and sign of a matrix given entrywise logs of positive entries.
std::pair<double, double> log_det_of_logs(const Eigen::MatrixXd& logm) {
  const int n = static_cast<int>(logm.rows());
  double shift = 0.0;
  Eigen::MatrixXd scaled(n, n);
  for (int j = 0; j < n; ++j) {
    const double cmax = logm.col(j).maxCoeff();
    if (cmax == -kInf) return {-kInf, 0.0};
    shift += cmax;
    for (int i = 0; i < n; ++i) scaled(i, j) = std::exp(logm(i, j) - cmax);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(scaled);
  double logdet = 0.0, sign = lu.permutationP().determinant();
  for (int i = 0; i < n; ++i) {
    const double u = lu.matrixLU()(i, i);
    if (u == 0.0) return {-kInf, 0.0};
    if (u < 0.0) sign = -sign;
    logdet += std::log(std::abs(u));
  }
  return {shift + logdet, sign};
}

double joint_sv_exact(std::span<const double> mu, int n, int t) {
  // (2t)^N / (N! prod_a Gamma^{t+1}(a)) det[exp(2t b mu_a)] det[G(0..0,a-1 | s_b)].
  // First determinant in closed Vandermonde form; the G determinant is
  // shifted to positive indices via s^1 G(0,..,0,a-1|s) = G(1,..,1,a|s).
  double log_vdm = 0.0, sign_vdm = 1.0;
  for (int a = 0; a < n; ++a) log_vdm += 2.0 * t * mu[a];
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const double d = mu[b] - mu[a];
      if (d == 0.0) return 0.0;
      if (d < 0.0) sign_vdm = -sign_vdm;
      log_vdm += 2.0 * t * std::max(mu[a], mu[b]) + std::log(-std::expm1(-2.0 * t * std::abs(d)));
    }
  }
  Eigen::MatrixXd logg(n, n);
  for (int a = 1; a <= n; ++a) {
    const auto params = specfun::MeijerParams::repeated(1.0, t - 1, {static_cast<double>(a)});
    for (int b = 0; b < n; ++b)
      logg(a - 1, b) = specfun::log_meijer_g_t0_logarg(params, 2.0 * t * mu[b]) - 2.0 * t * mu[b];
  }
  const auto [log_gdet, sign_gdet] = log_det_of_logs(logg);
  if (sign_gdet == 0.0) return 0.0;
  double log_norm = n * std::log(2.0 * t) - specfun::log_gamma(n + 1);
  for (int a = 1; a <= n; ++a) log_norm -= (t + 1) * specfun::log_gamma(a);
  const double val = sign_vdm * sign_gdet * std::exp(log_norm + log_vdm + log_gdet);
  return std::max(0.0, val);  // negative only through rounding
}

}  // namespace

double joint_density(std::span<const double> points, int n, int t, JointKind kind) {
  check_indices(1, n, t);
  if (static_cast<int>(points.size()) != n)
    throw std::invalid_argument("joint_density: need exactly N points");
  const bool exact = (kind == JointKind::sv_exact || kind == JointKind::ev_exact);
  if (exact && n > 6) throw std::domain_error("joint_density: exact kinds need N <= 6");
  if (!exact && n > 10) throw std::domain_error("joint_density: permanent kinds need N <= 10");

  const double log_nfact = specfun::log_gamma(n + 1);
  Eigen::MatrixXd logm(n, n);
  switch (kind) {
    case JointKind::sv_exact:
      return joint_sv_exact(points, n, t);
    case JointKind::sv_permanent:
    case JointKind::ev_permanent: {
      for (int a = 0; a < n; ++a) {
        for (int b = 1; b <= n; ++b) {
          const PeakParams p = peak_params(b, t);
          logm(a, b - 1) = log_normal_pdf(points[a], p.mean, p.sigma * p.sigma);
        }
      }
      break;
    }
    case JointKind::incremental_permanent: {
      for (int a = 0; a < n; ++a) {
        if (!(points[a] > 0.0))
          throw std::domain_error("joint_density: incremental kind needs positive radii");
        for (int b = 1; b <= n; ++b) {
          const PeakParams p = peak_params(b, t);
          logm(a, b - 1) =
              log_normal_pdf(std::log(points[a]), p.mean, p.sigma * p.sigma) - std::log(points[a]);
        }
      }
      break;
    }
    case JointKind::ev_exact: {
      for (int b = 0; b < n; ++b)
        for (int a = 1; a <= n; ++a)
          logm(b, a - 1) = log_eigen_peak_exact(a, a, t, points[b]);
      break;
    }
  }
  return std::exp(specfun::log_permanent_of_logs(logm) - log_nfact);
}

double density_beta4_radial(int n, int t, double nu) {
  check_indices(1, n, t);
  if (n > 12) throw std::domain_error("density_beta4_radial: needs N <= 12");
  double acc = 0.0;
  for (int c = 1; c <= n; ++c) {
    const double mean = 0.5 * specfun::digamma(2 * c);
    const double var = specfun::polygamma(1, 2 * c) / (4.0 * t);
    acc += std::exp(log_normal_pdf(nu, mean, var));
  }
  return acc / n;
}

std::vector<double> deterministic_positions(int n, int beta) {
  if (n < 1) throw std::domain_error("deterministic_positions: N must be >= 1");
  if (beta != 1 && beta != 2 && beta != 4)
    throw std::domain_error("deterministic_positions: beta must be 1, 2 or 4");
  std::vector<double> pos(n);
  for (int b = 1; b <= n; ++b) pos[b - 1] = 0.5 * specfun::digamma(0.5 * beta * b);
  return pos;
}

// ---------------------------------------------------------------------------
// DensityModel

DensityModel::DensityModel(std::string kind, double lo, double hi,
                           std::function<double(double)> pdf,
                           std::function<double(double)> cdf)
    : kind_(std::move(kind)), lo_(lo), hi_(hi), pdf_(std::move(pdf)), cdf_(std::move(cdf)) {}

namespace {

// Cumulative trapezoid grid over [lo, hi]; returns a cdf interpolant and
// rescales the pdf by the captured raw integral so both are normalized.
struct GridCdf {
  double lo, hi, step, total;
  std::vector<double> cum;

  double operator()(double x) const {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    const double pos = (x - lo) / step;
    const int i = std::min(static_cast<int>(pos), static_cast<int>(cum.size()) - 2);
    const double frac = pos - i;
    return std::clamp((cum[i] * (1 - frac) + cum[i + 1] * frac) / total, 0.0, 1.0);
  }
};

GridCdf build_grid_cdf(const std::function<double(double)>& pdf, double lo, double hi,
                       int points = 4001) {
  GridCdf g;
  g.lo = lo;
  g.hi = hi;
  g.step = (hi - lo) / (points - 1);
  g.cum.resize(points);
  double prev = pdf(lo), acc = 0.0;
  g.cum[0] = 0.0;
  for (int i = 1; i < points; ++i) {
    const double cur = pdf(lo + i * g.step);
    acc += 0.5 * (prev + cur) * g.step;
    g.cum[i] = acc;
    prev = cur;
  }
  g.total = acc;
  if (!(g.total > 0.0)) throw std::runtime_error("DensityModel: degenerate density grid");
  return g;
}

}  // namespace

DensityModel DensityModel::gaussian_mixture(int n, int t) {
  std::vector<PeakParams> peaks;
  for (int b = 1; b <= n; ++b) peaks.push_back(peak_params(b, t));
  const double lo = peaks.front().mean - 12 * peaks.front().sigma;
  const double hi = peaks.back().mean + 12 * peaks.back().sigma;
  auto pdf = [peaks, n](double x) {
    double acc = 0;
    for (const auto& p : peaks) acc += std::exp(log_normal_pdf(x, p.mean, p.sigma * p.sigma));
    return acc / n;
  };
  auto cdf = [peaks, n](double x) {
    double acc = 0;
    for (const auto& p : peaks) acc += normal_cdf(x, p.mean, p.sigma);
    return acc / n;
  };
  return DensityModel("gaussian-mixture", lo, hi, std::move(pdf), std::move(cdf));
}

DensityModel DensityModel::saddle(int n, int t) {
  const PeakParams p1 = peak_params(1, t), pn = peak_params(n, t);
  const double lo = p1.mean - 12 * p1.sigma - 0.5 / t;
  const double hi = pn.mean + 12 * pn.sigma + 0.5 / t;
  auto pdf = [n, t](double x) { return density_sv_lyapunov(n, t, x, SvDensityMethod::saddle); };
  GridCdf g = build_grid_cdf(pdf, lo, hi);
  return DensityModel("saddle", lo, hi, std::move(pdf), g);
}

DensityModel DensityModel::lognormal_mixture(int n, int t) {
  std::vector<PeakParams> peaks;
  for (int b = 1; b <= n; ++b) peaks.push_back(peak_params(b, t));
  const double lo = std::exp(peaks.front().mean - 12 * peaks.front().sigma);
  const double hi = std::exp(peaks.back().mean + 12 * peaks.back().sigma);
  auto pdf = [n, t](double x) { return x > 0 ? density_incremental_sv(n, t, x) : 0.0; };
  auto cdf = [peaks, n](double x) {
    if (x <= 0) return 0.0;
    double acc = 0;
    for (const auto& p : peaks) acc += normal_cdf(std::log(x), p.mean, p.sigma);
    return acc / n;
  };
  return DensityModel("lognormal-mixture", lo, hi, std::move(pdf), std::move(cdf));
}

DensityModel DensityModel::exact_meijer(const specfun::MeijerParams& p) {
  double mean = 0, var = 0, lg = 0;  // of ln s for a product of gammas
  for (auto& [a, m] : p.groups()) {
    mean += m * specfun::digamma(a);
    var += m * specfun::polygamma(1, a);
    lg += m * specfun::log_gamma(a);
  }
  const double lo = std::exp(mean - 14 * std::sqrt(var));
  const double hi = std::exp(mean + 14 * std::sqrt(var));
  auto pdf = [p, lg](double s) {
    if (!(s > 0)) return 0.0;
    return std::exp(specfun::log_meijer_g_t0_logarg(p, std::log(s)) - std::log(s) - lg);
  };
  // integrate in z = ln s: density of z is s * pdf(s)
  auto zpdf = [pdf](double z) { return pdf(std::exp(z)) * std::exp(z); };
  GridCdf g = build_grid_cdf(zpdf, mean - 14 * std::sqrt(var), mean + 14 * std::sqrt(var));
  auto cdf = [g](double s) { return s > 0 ? g(std::log(s)) : 0.0; };
  return DensityModel("exact-meijer", lo, hi, std::move(pdf), std::move(cdf));
}

DensityModel DensityModel::eigen_exact(int n, int t) {
  const PeakParams p1 = peak_params(1, t), pn = peak_params(n, t);
  const double lo = p1.mean - 14 * p1.sigma, hi = pn.mean + 14 * pn.sigma;
  auto pdf = [n, t](double nu) {
    double acc = 0;
    for (int a = 1; a <= n; ++a) acc += eigen_peak_exact(a, a, t, nu);
    return acc / n;
  };
  GridCdf g = build_grid_cdf(pdf, lo, hi);
  return DensityModel("eigen-exact", lo, hi, std::move(pdf), g);
}

DensityModel DensityModel::beta4_radial(int n, int t) {
  std::vector<std::pair<double, double>> peaks;  // (mean, sigma)
  for (int c = 1; c <= n; ++c)
    peaks.emplace_back(0.5 * specfun::digamma(2 * c),
                       std::sqrt(specfun::polygamma(1, 2 * c) / (4.0 * t)));
  const double lo = peaks.front().first - 12 * peaks.front().second;
  const double hi = peaks.back().first + 12 * peaks.back().second;
  auto pdf = [n, t](double x) { return density_beta4_radial(n, t, x); };
  auto cdf = [peaks, n](double x) {
    double acc = 0;
    for (auto& [m, s] : peaks) acc += normal_cdf(x, m, s);
    return acc / n;
  };
  return DensityModel("beta4-radial", lo, hi, std::move(pdf), std::move(cdf));
}

DensityModel DensityModel::triangular() {
  return DensityModel("triangular", 0.0, 1.0, &asymptotic::triangular_density,
                      &asymptotic::triangular_cdf);
}

DensityModel DensityModel::staircase(int n) {
  auto jumps = asymptotic::staircase_jumps(n);
  auto pdf = [](double) { return 0.0; };  // purely atomic
  auto cdf = [n](double x) { return asymptotic::staircase_cdf(n, x); };
  return DensityModel("staircase", 0.0, jumps.back(), std::move(pdf), std::move(cdf));
}

DensityModel DensityModel::lognormal_peak(int b, int t) {
  const PeakParams p = peak_params(b, t);
  const double lo = std::exp(p.mean - 12 * p.sigma), hi = std::exp(p.mean + 12 * p.sigma);
  auto pdf = [p](double x) {
    if (!(x > 0)) return 0.0;
    return std::exp(log_normal_pdf(std::log(x), p.mean, p.sigma * p.sigma)) / x;
  };
  auto cdf = [p](double x) { return x > 0 ? normal_cdf(std::log(x), p.mean, p.sigma) : 0.0; };
  return DensityModel("lognormal-peak", lo, hi, std::move(pdf), std::move(cdf));
}

}  // namespace lyap::laws
