#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "lyap/matrix_kernels.hpp"
#include "lyap/rng.hpp"
#include "oracle/bigfloat.hpp"

using namespace lyap;
using kernels::Matrix;

namespace {

std::vector<Matrix> ginibre_chain(std::uint64_t seed, int beta, int n, int t) {
  rng::RngStream s(seed, 0);
  std::vector<Matrix> f;
  f.reserve(t);
  for (int j = 0; j < t; ++j) f.push_back(rng::sample_ginibre(s, beta, n));
  return f;
}

double rel_log_err(double got, double expect) {
  return std::abs(got - expect) / std::max(1.0, std::abs(expect));
}

double log_abs_det_sum(const std::vector<Matrix>& factors) {
  double acc = 0;
  for (const auto& x : factors) acc += std::log(std::abs(x.determinant()));
  return acc;
}

}  // namespace

TEST_SUITE("matrix_kernels") {

TEST_CASE("qr_positive basics") {
  const Matrix eye = Matrix::Identity(3, 3);
  auto [q, r] = kernels::qr_positive(eye);
  CHECK((q - eye).norm() < 1e-14);
  CHECK((r - eye).norm() < 1e-14);

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 3.0;
  auto [qd, rd] = kernels::qr_positive(d);
  CHECK((qd - Matrix::Identity(2, 2)).norm() < 1e-14);
  CHECK((rd - d).norm() < 1e-14);

  rng::RngStream s(31, 0);
  const Matrix a = rng::sample_ginibre(s, 2, 4);
  auto [qa, ra] = kernels::qr_positive(a);
  CHECK((a - qa * ra).norm() / a.norm() < 1e-12);
  CHECK((qa.adjoint() * qa - Matrix::Identity(4, 4)).norm() < 1e-12);
  for (int j = 0; j < 4; ++j) {
    CHECK(ra(j, j).imag() == 0.0);
    CHECK(ra(j, j).real() > 0.0);
    for (int i = j + 1; i < 4; ++i) CHECK(std::abs(ra(i, j)) == 0.0);
  }
  CHECK_THROWS(kernels::qr_positive(Matrix::Zero(2, 2)));
}

TEST_CASE("log_singular_values trivial cases") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  const auto sp = kernels::log_singular_values(std::vector<Matrix>{d});
  REQUIRE(sp.values.size() == 2);
  CHECK(sp.values[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(sp.values[1] == doctest::Approx(2.0 * std::log(3.0)).epsilon(1e-14));

  const std::vector<Matrix> eyes(7, Matrix::Identity(3, 3));
  const auto sp2 = kernels::log_singular_values(eyes);
  for (double v : sp2.values) CHECK(v == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("log_singular_values vs big-float oracle") {
  for (auto [seed, n, t] : {std::tuple{1001u, 4, 100}, {1002u, 3, 60}, {1003u, 2, 30}}) {
    const auto factors = ginibre_chain(seed, 2, n, t);
    const auto sp = kernels::log_singular_values(factors);
    const auto ref = oracle::log_singular_values(factors);
    REQUIRE(sp.values.size() == ref.size());
    for (size_t i = 0; i < ref.size(); ++i)
      CHECK(rel_log_err(sp.values[i], ref[i]) < 1e-8);
    // determinant identity: sum ln s_n = 2 sum ln |det X_j|
    CHECK(rel_log_err(sp.sum(), 2.0 * log_abs_det_sum(factors)) < 1e-9);
  }
}

TEST_CASE("log_singular_values invariance under fixed unitaries") {
  const auto factors = ginibre_chain(77, 2, 3, 40);
  rng::RngStream s(78, 0);
  const Matrix u = rng::sample_haar_unitary(s, 3);
  const Matrix v = rng::sample_haar_unitary(s, 3);
  std::vector<Matrix> rotated = factors;
  rotated.front() = rotated.front() * v;  // right-multiply the chain
  rotated.back() = u * rotated.back();    // left-multiply the chain
  const auto a = kernels::log_singular_values(factors);
  const auto b = kernels::log_singular_values(rotated);
  for (size_t i = 0; i < a.values.size(); ++i)
    CHECK(rel_log_err(a.values[i], b.values[i]) < 1e-10);
}

TEST_CASE("exactly singular factor propagates as -inf") {
  Matrix sing = Matrix::Zero(3, 3);
  sing(0, 0) = 1.0;
  sing(1, 1) = 2.0;  // third row/column zero
  std::vector<Matrix> chain = ginibre_chain(5, 2, 3, 4);
  chain.push_back(sing);
  const auto tail = ginibre_chain(6, 2, 3, 3);
  chain.insert(chain.end(), tail.begin(), tail.end());
  const auto sp = kernels::log_singular_values(chain);
  CHECK(sp.values[0] == -std::numeric_limits<double>::infinity());
  CHECK(std::isfinite(sp.values[1]));
  CHECK(std::isfinite(sp.values[2]));
}

TEST_CASE("log_eigenvalue_moduli triangular case") {
  Matrix x = Matrix::Zero(2, 2);
  x(0, 0) = 2.0;
  x(0, 1) = 5.0;
  x(1, 1) = 0.5;
  const auto sp = kernels::log_eigenvalue_moduli(std::vector<Matrix>{x});
  REQUIRE(sp.values.size() == 2);
  CHECK(sp.values[0] == doctest::Approx(std::log(0.5)).epsilon(1e-12));
  CHECK(sp.values[1] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(sp.angles[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sp.angles[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("log_eigenvalue_moduli vs big-float oracle") {
  for (auto [seed, n, t] : {std::tuple{2001u, 3, 50}, {2002u, 4, 25}, {2003u, 2, 80}}) {
    const auto factors = ginibre_chain(seed, 2, n, t);
    const auto sp = kernels::log_eigenvalue_moduli(factors);
    const auto ref = oracle::log_eigenvalue_moduli(factors);
    REQUIRE(sp.values.size() == ref.size());
    for (size_t i = 0; i < ref.size(); ++i)
      CHECK(rel_log_err(sp.values[i], ref[i]) < 1e-8);
    CHECK(rel_log_err(sp.sum(), log_abs_det_sum(factors)) < 1e-9);
  }
}

TEST_CASE("log_eigenvalue_moduli with conjugate pairs (real chain)") {
  // Real factors force complex-conjugate eigenvalue pairs with exactly tied
  // moduli; the clustered path must resolve them.
  for (std::uint64_t seed : {41u, 42u, 43u}) {
    const auto factors = ginibre_chain(seed, 1, 3, 30);
    const auto sp = kernels::log_eigenvalue_moduli(factors);
    const auto ref = oracle::log_eigenvalue_moduli(factors);
    for (size_t i = 0; i < ref.size(); ++i)
      CHECK(rel_log_err(sp.values[i], ref[i]) < 1e-8);
  }
}

TEST_CASE("log_eigenvalue_moduli single factor (t=1)") {
  // t = 1 keeps all moduli close; exercises the full-cluster fallback.
  for (std::uint64_t seed : {51u, 52u}) {
    const auto factors = ginibre_chain(seed, 2, 4, 1);
    const auto sp = kernels::log_eigenvalue_moduli(factors);
    const auto ref = oracle::log_eigenvalue_moduli(factors);
    for (size_t i = 0; i < ref.size(); ++i)
      CHECK(rel_log_err(sp.values[i], ref[i]) < 1e-9);
  }
}

TEST_CASE("Weyl domination of eigenvalue moduli by singular values") {
  for (auto [seed, n, t] : {std::tuple{3001u, 3, 40}, {3002u, 4, 15}}) {
    const auto factors = ginibre_chain(seed, 2, n, t);
    const auto sv = kernels::log_singular_values(factors);
    const auto ev = kernels::log_eigenvalue_moduli(factors);
    // descending partial sums; sv.values are ln s = 2 ln sigma
    double psv = 0, pev = 0;
    for (int k = 0; k < n; ++k) {
      psv += 0.5 * sv.values[n - 1 - k];
      pev += ev.values[n - 1 - k];
      if (k + 1 < n) CHECK(pev <= psv + 1e-10);
    }
    CHECK(rel_log_err(pev, psv) < 1e-8);  // full sums equal
  }
}

TEST_CASE("schur_chain_2x2 triangular factors") {
  // z1 is exactly the product of the (1,1) entries.
  std::vector<Matrix> tri;
  rng::RngStream s(61, 0);
  double expect_l1 = 0, expect_l2 = 0;
  for (int j = 0; j < 12; ++j) {
    Matrix x = Matrix::Zero(2, 2);
    x(0, 0) = std::complex<double>(1.0 + s.uniform(), s.normal());
    x(0, 1) = std::complex<double>(s.normal(), s.normal());
    x(1, 1) = std::complex<double>(0.1 + 0.5 * s.uniform(), 0.0);
    tri.push_back(x);
    expect_l1 += std::log(std::abs(x(0, 0)));
    expect_l2 += std::log(std::abs(x(1, 1)));
  }
  const auto sd = kernels::schur_chain_2x2(tri);
  const double got_hi = std::max(sd.log_z1, sd.log_z2);
  const double got_lo = std::min(sd.log_z1, sd.log_z2);
  CHECK(got_hi == doctest::Approx(std::max(expect_l1, expect_l2)).epsilon(1e-10));
  CHECK(got_lo == doctest::Approx(std::min(expect_l1, expect_l2)).epsilon(1e-10));
}

TEST_CASE("schur_chain_2x2 diagonal chain") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 0.5;
  const int t = 25;
  const std::vector<Matrix> chain(t, d);
  const auto sd = kernels::schur_chain_2x2(chain);
  CHECK(std::max(sd.log_z1, sd.log_z2) == doctest::Approx(t * std::log(2.0)).epsilon(1e-12));
  CHECK(std::min(sd.log_z1, sd.log_z2) == doctest::Approx(-t * std::log(2.0)).epsilon(1e-12));
  CHECK(sd.log_abs_delta == -std::numeric_limits<double>::infinity());
  CHECK(kernels::max_exponent_2x2(sd, t) == doctest::Approx(std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("schur_chain_2x2 consistency with the other kernels") {
  for (std::uint64_t seed : {71u, 72u, 73u, 74u}) {
    const auto factors = ginibre_chain(seed, 2, 2, 10);
    const auto sd = kernels::schur_chain_2x2(factors);
    const auto ev = kernels::log_eigenvalue_moduli(factors);
    const auto sv = kernels::log_singular_values(factors);
    const double lo = std::min(sd.log_z1, sd.log_z2);
    const double hi = std::max(sd.log_z1, sd.log_z2);
    CHECK(rel_log_err(lo, ev.values[0]) < 1e-8);
    CHECK(rel_log_err(hi, ev.values[1]) < 1e-8);
    // max exponent equals the top singular exponent
    const double mu_max = kernels::max_exponent_2x2(sd, 10);
    CHECK(rel_log_err(mu_max, sv.values[1] / 20.0) < 1e-8);
    // determinant identity
    CHECK(std::abs(sd.log_z1 + sd.log_z2 - log_abs_det_sum(factors)) < 1e-8);
  }
}

TEST_CASE("max_exponent_2x2 against big-float SVD") {
  rng::RngStream s(81, 0);
  for (int rep = 0; rep < 25; ++rep) {
    kernels::SchurData2x2 sd;
    sd.log_z1 = 40.0 * s.normal();
    sd.log_z2 = 40.0 * s.normal();
    sd.log_abs_delta = 40.0 * s.normal();
    sd.phase_z1 = 2 * M_PI * s.uniform();
    sd.phase_z2 = 2 * M_PI * s.uniform();
    const double pd = 2 * M_PI * s.uniform();
    const int t = 7;
    const auto ref = oracle::log_singular_values_2x2_triangle(
        sd.log_z1, sd.phase_z1, sd.log_z2, sd.phase_z2, sd.log_abs_delta, pd);
    const double expect = ref[0] / t;  // descending; ln sigma_max / t
    const double got = kernels::max_exponent_2x2(sd, t);
    CHECK(rel_log_err(got, expect) < 1e-10);
    CHECK(got >= std::max(sd.log_z1, sd.log_z2) / t);  // exact bound
  }
}

TEST_CASE("max_exponent_2x2 degenerate inputs") {
  kernels::SchurData2x2 sd;
  sd.log_z1 = 0.0;
  sd.log_z2 = 0.0;
  sd.log_abs_delta = -std::numeric_limits<double>::infinity();
  CHECK(kernels::max_exponent_2x2(sd, 3) == 0.0);
  sd.log_z1 = 2.0;
  sd.log_z2 = -1.0;
  CHECK(kernels::max_exponent_2x2(sd, 4) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("dimension mismatch and bad input rejected") {
  std::vector<Matrix> bad = {Matrix::Identity(2, 2), Matrix::Identity(3, 3)};
  CHECK_THROWS_AS(kernels::log_singular_values(bad), std::invalid_argument);
  CHECK_THROWS_AS(kernels::log_eigenvalue_moduli(bad), std::invalid_argument);
  Matrix nan2 = Matrix::Zero(2, 2);
  nan2(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(kernels::log_singular_values(std::vector<Matrix>{nan2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(kernels::log_singular_values(std::vector<Matrix>{}), std::invalid_argument);
  CHECK_THROWS_AS(kernels::schur_chain_2x2(std::vector<Matrix>{Matrix::Identity(3, 3)}),
                  std::invalid_argument);
}

}  // TEST_SUITE
