#include "lyap/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_gamma.h>
#include <gsl/gsl_sf_psi.h>

namespace lyap::specfun {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// GSL aborts on error by default; disable once for the whole process.
const int g_gsl_quiet = [] {
  gsl_set_error_handler_off();
  return 0;
}();

[[noreturn]] void fail_domain(const std::string& what) {
  throw std::domain_error(what);
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) fail_domain("log_gamma: requires x > 0");
  return std::lgamma(x);
}

double digamma(double x) {
  if (!(x > 0.0)) fail_domain("digamma: requires x > 0");
  gsl_sf_result r;
  if (gsl_sf_psi_e(x, &r) != GSL_SUCCESS)
    throw std::runtime_error("digamma: GSL evaluation failed");
  return r.val;
}

double polygamma(int n, double x) {
  if (n < 0 || n > 8) fail_domain("polygamma: order must be in [0, 8]");
  if (!(x > 0.0)) fail_domain("polygamma: requires x > 0");
  gsl_sf_result r;
  if (gsl_sf_psi_n_e(n, x, &r) != GSL_SUCCESS)
    throw std::runtime_error("polygamma: GSL evaluation failed");
  return r.val;
}

std::complex<double> log_gamma_complex(std::complex<double> z) {
  if (!(z.real() > 0.0))
    fail_domain("log_gamma_complex: requires Re(z) > 0");
  gsl_sf_result lnr, arg;
  if (gsl_sf_lngamma_complex_e(z.real(), z.imag(), &lnr, &arg) != GSL_SUCCESS)
    throw std::runtime_error("log_gamma_complex: GSL evaluation failed");
  return {lnr.val, arg.val};
}

double theta0(double mu) {
  const double target = 2.0 * mu;
  // Bracket the root of psi(x) = target. psi is increasing on (0, inf).
  double lo = 1.0, hi = 1.0;
  while (digamma(lo) > target) lo *= 0.5;
  while (digamma(hi) < target) hi *= 2.0;
  // Safeguarded Newton.
  double x = std::clamp(std::exp(target) + 0.5, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double f = digamma(x) - target;
    if (f > 0) hi = x; else lo = x;
    const double step = f / polygamma(1, x);
    double next = x - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(f) <= 1e-13 * std::max(1.0, std::abs(target)) &&
        std::abs(next - x) <= 1e-14 * x) {
      return next;
    }
    x = next;
  }
  return x;
}

MeijerParams::MeijerParams(std::vector<double> a) {
  if (a.empty() || a.size() > 1024)
    fail_domain("MeijerParams: need 1 <= t <= 1024 indices");
  std::map<double, int> counts;
  for (double v : a) {
    if (!(v > 0.0) || !std::isfinite(v))
      fail_domain("MeijerParams: indices must be positive and finite");
    counts[v] += 1;
  }
  t_ = static_cast<int>(a.size());
  min_a_ = counts.begin()->first;
  for (auto& [v, m] : counts) {
    groups_.emplace_back(v, m);
    sum_a_ += v * m;
  }
}

MeijerParams MeijerParams::repeated(double b, int mult, std::vector<double> extra) {
  std::vector<double> a(extra.begin(), extra.end());
  a.insert(a.end(), static_cast<size_t>(std::max(mult, 0)), b);
  return MeijerParams(std::move(a));
}

double meijer_saddle_point(const MeijerParams& p, double log_s) {
  const auto f = [&](double u) {
    double v = -log_s;
    for (auto& [a, m] : p.groups()) v += m * digamma(a + u);
    return v;
  };
  const auto fp = [&](double u) {
    double v = 0;
    for (auto& [a, m] : p.groups()) v += m * polygamma(1, a + u);
    return v;
  };
  // Bracket in u > -min_a; f -> -inf at the left end and +inf at the right.
  const double a0 = p.min_index();
  double lo, hi;
  double d = std::max(1.0, a0);
  while (true) {
    lo = -a0 + std::min(d, 0.5 * a0);
    if (a0 > 1e300) lo = 0;
    if (f(lo) < 0) break;
    d *= 0.5;
    if (d < 1e-300) fail_domain("meijer_saddle_point: bracketing failed (left)");
  }
  hi = std::max(1.0, lo + 1.0);
  while (f(hi) < 0) {
    hi = 2 * hi + a0 + 1;
    if (hi > 1e300) fail_domain("meijer_saddle_point: bracketing failed (right)");
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double fx = f(x);
    if (fx > 0) hi = x; else lo = x;
    double next = x - fx / fp(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(fx) <= 1e-12 * std::max(1.0, std::abs(log_s)) &&
        std::abs(next - x) <= 1e-13 * std::max(1.0, std::abs(x))) {
      return next;
    }
    x = next;
  }
  return x;
}

namespace {

// One trapezoidal pass along Re(u) = c with step h. Returns the scaled sum
// S = sum_k w_k exp(L(k h) - L0) with w_0 = 1 and w_k = 2 Re for k >= 1.
double mellin_barnes_pass(const MeijerParams& p, double log_s, double c,
                          double base, double h) {
  const auto log_term = [&](double y) -> std::complex<double> {
    std::complex<double> acc(0.0, 0.0);
    for (auto& [a, m] : p.groups())
      acc += static_cast<double>(m) * log_gamma_complex({a + c, y});
    acc -= std::complex<double>(c, y) * log_s;
    return acc;
  };
  double sum = 1.0;  // k = 0 term: exp(base - base)
  for (long k = 1;; ++k) {
    const std::complex<double> lt = log_term(k * h);
    const double mag = lt.real() - base;
    if (mag < -46.0 && k * h > 3.0) break;
    sum += 2.0 * std::exp(mag) * std::cos(lt.imag());
    if (k > 4'000'000)
      throw std::runtime_error("meijer_g: quadrature failed to decay");
  }
  return sum;
}

}  // namespace

double log_meijer_g_t0(const MeijerParams& p, double s) {
  if (!(s > 0.0)) fail_domain("meijer_g_t0: requires s > 0");
  return log_meijer_g_t0_logarg(p, std::log(s));
}

double log_meijer_g_t0_logarg(const MeijerParams& p, double log_s) {
  if (!std::isfinite(log_s)) fail_domain("meijer_g_t0: requires finite ln(s)");
  const double c = meijer_saddle_point(p, log_s);
  double base = -c * log_s;
  double curv = 0.0, noise_scale = std::abs(c * log_s) + 10.0;
  for (auto& [a, m] : p.groups()) {
    const double lg = log_gamma(a + c);
    base += m * lg;
    curv += m * polygamma(1, a + c);
    noise_scale += m * std::abs(lg);
  }
  // The integrand restricted to the contour is a near-Gaussian of width
  // 1/sqrt(curv); the trapezoid rule converges superexponentially in 1/h.
  // The attainable accuracy is limited by the rounding noise of the complex
  // log-gamma terms, which grows with their magnitude.
  const double tol_rel = std::max(1e-13, 3e-15 * noise_scale);
  double h = 0.5 / std::sqrt(curv);
  double integral = mellin_barnes_pass(p, log_s, c, base, h) * h;
  double achieved = std::numeric_limits<double>::infinity();
  for (int halving = 0; halving < 12; ++halving) {
    h *= 0.5;
    const double refined = mellin_barnes_pass(p, log_s, c, base, h) * h;
    achieved = std::abs(refined - integral);
    integral = refined;
    if (achieved <= tol_rel * std::abs(refined)) {
      if (!(integral > 0.0))
        throw std::runtime_error("meijer_g: quadrature produced nonpositive value");
      return base + std::log(integral / (2.0 * M_PI));
    }
  }
  throw std::runtime_error("meijer_g: quadrature did not converge; achieved relative error " +
                           std::to_string(achieved / std::abs(integral)));
}

double meijer_g_t0(const MeijerParams& p, double s) {
  return std::exp(log_meijer_g_t0(p, s));
}

double fuss_catalan(long t, double k) {
  if (t < 1) fail_domain("fuss_catalan: requires t >= 1");
  if (!(k > -1.0 / (t + 1.0))) fail_domain("fuss_catalan: k out of domain");
  const double kr = std::round(k);
  if (kr == k && kr >= 0 && kr <= 20) {
    const long ki = static_cast<long>(kr);
    if (ki == 0) return 1.0;
    namespace mp = boost::multiprecision;
    mp::cpp_int binom = 1;
    for (long i = 1; i <= ki; ++i) {
      binom *= t * ki + i;  // binom((t+1)k, k) = prod_i (tk + i)/i
      binom /= i;
    }
    const mp::cpp_int denom = t * ki + 1;
    if (binom % denom != 0)
      throw std::runtime_error("fuss_catalan: exact division failed");
    return (binom / denom).convert_to<double>();
  }
  return std::exp(std::lgamma((t + 1.0) * k + 1.0) - std::lgamma(k + 1.0) -
                  std::lgamma(t * k + 2.0));
}

double log_hankel_gamma_det(int N) {
  if (N < 1) fail_domain("hankel_gamma_det: requires N >= 1");
  double lg = 0.0;
  for (int a = 1; a <= N; ++a) lg += 2.0 * std::lgamma(a);
  return lg;
}

double hankel_gamma_det(int N) {
  if (N < 1 || N > 12)
    fail_domain("hankel_gamma_det: N must be in [1, 12]; use the log form beyond");
  return std::exp(log_hankel_gamma_det(N));
}

double hankel_cofactor_ratio(int N, int j, int l) {
  if (N < 1 || N > 12) fail_domain("hankel_cofactor: N must be in [1, 12]");
  if (j < 1 || j > N || l < 1 || l > N)
    fail_domain("hankel_cofactor: indices out of range");
  // 1/Gamma at nonpositive integers vanishes, so the sum starts at
  // k = max(j, l) - 1.
  double sum = 0.0;
  for (int k = std::max(j, l) - 1; k <= N - 1; ++k) {
    sum += std::exp(2.0 * (std::lgamma(k + 1.0) - std::lgamma(j) - std::lgamma(l)) -
                    std::lgamma(k - j + 2.0) - std::lgamma(k - l + 2.0));
  }
  const int sign = ((j + l) % 2 == 0) ? 1 : -1;
  return sign * sum;
}

double hankel_cofactor(int N, int j, int l) {
  return hankel_cofactor_ratio(N, j, l) * hankel_gamma_det(N);
}

double permanent(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  if (n != m.cols()) fail_domain("permanent: matrix must be square");
  if (n == 0 || n > 12) fail_domain("permanent: size must be in [1, 12]");
  // Ryser with Gray-code subset updates.
  Eigen::VectorXd colsum = Eigen::VectorXd::Zero(n);
  double total = 0.0;
  unsigned prev = 0;
  for (unsigned g = 1; g < (1u << n); ++g) {
    const unsigned gray = g ^ (g >> 1);
    const unsigned diff = gray ^ prev;
    const int bit = std::countr_zero(diff);
    if (gray & diff)
      colsum += m.col(bit);
    else
      colsum -= m.col(bit);
    prev = gray;
    const int card = std::popcount(gray);
    const double prod = colsum.prod();
    total += ((n - card) % 2 == 0) ? prod : -prod;
  }
  return total;
}

double log_permanent_of_logs(const Eigen::MatrixXd& log_entries) {
  const int n = static_cast<int>(log_entries.rows());
  if (n != log_entries.cols())
    fail_domain("log_permanent_of_logs: matrix must be square");
  double shift = 0.0;
  Eigen::MatrixXd scaled(n, n);
  for (int i = 0; i < n; ++i) {
    const double rmax = log_entries.row(i).maxCoeff();
    if (rmax == -kInf) return -kInf;
    shift += rmax;
    for (int j = 0; j < n; ++j) scaled(i, j) = std::exp(log_entries(i, j) - rmax);
  }
  const double per = permanent(scaled);
  if (!(per > 0.0)) return -kInf;
  return shift + std::log(per);
}

}  // namespace lyap::specfun
