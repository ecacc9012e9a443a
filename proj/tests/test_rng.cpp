#include <doctest.h>

#include <cmath>
#include <numeric>

#include "lyap/monte_carlo.hpp"
#include "lyap/rng.hpp"

using namespace lyap;

TEST_SUITE("rng") {

TEST_CASE("stream determinism and purity") {
  rng::RngStream a = rng::derive_stream(42, 0);
  rng::RngStream b = rng::derive_stream(42, 0);
  for (int i = 0; i < 10000; ++i) CHECK(a.next_u64() == b.next_u64());

  // same sequence regardless of what other streams did in between
  rng::RngStream c = rng::derive_stream(42, 7);
  std::vector<double> first;
  for (int i = 0; i < 100; ++i) first.push_back(c.uniform());
  rng::RngStream noise = rng::derive_stream(42, 3);
  for (int i = 0; i < 1000; ++i) noise.uniform();
  rng::RngStream c2 = rng::derive_stream(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(c2.uniform() == first[i]);
}

TEST_CASE("distinct streams are uncorrelated") {
  rng::RngStream a = rng::derive_stream(42, 0);
  rng::RngStream b = rng::derive_stream(42, 1);
  const int n = 10000;
  double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a.uniform(), y = b.uniform();
    sa += x;
    sb += y;
    sab += x * y;
    saa += x * x;
    sbb += y * y;
  }
  const double cov = sab / n - (sa / n) * (sb / n);
  const double corr = cov / std::sqrt((saa / n - (sa / n) * (sa / n)) *
                                      (sbb / n - (sb / n) * (sb / n)));
  CHECK(std::abs(corr) < 0.05);
}

TEST_CASE("uniform and normal moments") {
  rng::RngStream s(1, 0);
  const int n = 200000;
  double mean = 0, var = 0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    mean += u;
  }
  mean /= n;
  CHECK(mean == doctest::Approx(0.5).epsilon(5e-3));

  rng::RngStream g(1, 1);
  double gm = 0, gv = 0;
  for (int i = 0; i < n; ++i) {
    const double x = g.normal();
    gm += x;
    gv += x * x;
  }
  gm /= n;
  gv = gv / n - gm * gm;
  CHECK(std::abs(gm) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(gv == doctest::Approx(1.0).epsilon(0.02));
  (void)var;
}

TEST_CASE("complex normal has unit second moment") {
  rng::RngStream s(9, 0);
  const int n = 100000;
  double m2 = 0;
  for (int i = 0; i < n; ++i) m2 += std::norm(s.complex_normal());
  m2 /= n;
  CHECK(m2 == doctest::Approx(1.0).epsilon(4.0 * 1.0 / std::sqrt(n) + 0.01));
}

TEST_CASE("gamma sampling") {
  rng::RngStream s(5, 0);
  const int n = 1000000;
  double m1 = 0;
  for (int i = 0; i < n; ++i) m1 += s.gamma(1.0);
  m1 /= n;
  CHECK(m1 == doctest::Approx(1.0).epsilon(4.0 / std::sqrt(static_cast<double>(n)) + 1e-3));

  rng::RngStream s3(5, 1);
  double m = 0, v = 0;
  for (int i = 0; i < n; ++i) {
    const double x = s3.gamma(3.0);
    m += x;
    v += x * x;
  }
  m /= n;
  v = v / n - m * m;
  CHECK(m == doctest::Approx(3.0).epsilon(3e-3));
  CHECK(v == doctest::Approx(3.0).epsilon(2e-2));

  // non-integer and small shapes
  rng::RngStream sf(5, 2);
  double mf = 0;
  for (int i = 0; i < 200000; ++i) mf += sf.gamma(0.5);
  CHECK(mf / 200000 == doctest::Approx(0.5).epsilon(2e-2));

  CHECK_THROWS_AS(s.gamma(0.0), std::domain_error);
  CHECK_THROWS_AS(s.gamma(-1.0), std::domain_error);
}

TEST_CASE("ginibre beta=2 scaling") {
  // E Tr X^H X = N^2 with E|x|^2 = 1
  rng::RngStream s(42, 0);
  const int draws = 20000, n = 3;
  double acc = 0;
  for (int i = 0; i < draws; ++i)
    acc += rng::sample_ginibre(s, 2, n).squaredNorm();
  acc /= draws;
  const double stderr_est = std::sqrt(2.0 * n * n / static_cast<double>(draws));
  CHECK(std::abs(acc - 9.0) < 4.0 * stderr_est + 0.02);
}

TEST_CASE("ginibre beta=1 is real") {
  rng::RngStream s(11, 0);
  const Eigen::MatrixXcd x = rng::sample_ginibre(s, 1, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(x(i, j).imag() == 0.0);
}

TEST_CASE("ginibre beta=4 quaternion structure") {
  rng::RngStream s(13, 0);
  const int n = 2;
  const Eigen::MatrixXcd x = rng::sample_ginibre(s, 4, n);
  REQUIRE(x.rows() == 2 * n);
  // block self-duality
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      CHECK(x(n + i, n + j) == std::conj(x(i, j)));
      CHECK(x(n + i, j) == -std::conj(x(i, n + j)));
    }
  // eigenvalues come in conjugate pairs
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(x);
  std::vector<std::complex<double>> ev(es.eigenvalues().data(),
                                       es.eigenvalues().data() + 2 * n);
  for (const auto& l : ev) {
    double best = 1e300;
    for (const auto& m : ev) best = std::min(best, std::abs(m - std::conj(l)));
    CHECK(best < 1e-12);
  }
}

TEST_CASE("haar unitary from trivial sv profile") {
  rng::RngStream s(17, 0);
  const auto ones = [](rng::RngStream&, int n) { return std::vector<double>(n, 1.0); };
  for (int i = 0; i < 20; ++i) {
    const Eigen::MatrixXcd u = rng::sample_isotropic_custom(s, 3, ones);
    CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-12);
    CHECK(std::abs(std::abs(u.determinant()) - 1.0) < 1e-12);
  }
}

TEST_CASE("haar invariance under fixed left rotation") {
  // Phases of an entry of U and of (F U) must be identically distributed.
  rng::RngStream s(19, 0);
  rng::RngStream sf(19, 1);
  Eigen::MatrixXcd f = rng::sample_haar_unitary(sf, 3);
  const int draws = 4000;
  std::vector<double> ph_u, ph_fu;
  for (int i = 0; i < draws; ++i) {
    const Eigen::MatrixXcd u = rng::sample_haar_unitary(s, 3);
    ph_u.push_back(std::arg(u(0, 0)));
    ph_fu.push_back(std::arg((f * u)(0, 0)));
  }
  std::sort(ph_u.begin(), ph_u.end());
  std::sort(ph_fu.begin(), ph_fu.end());
  const double d = mc::ks_distance_two_sample(ph_u, ph_fu);
  // two-sample KS p-value with effective size n/2
  const double p = mc::ks_pvalue(d, draws / 2);
  CHECK(p > 0.01);
}

TEST_CASE("isotropic custom error paths") {
  rng::RngStream s(23, 0);
  const auto bad_len = [](rng::RngStream&, int) { return std::vector<double>{1.0}; };
  CHECK_THROWS_AS(rng::sample_isotropic_custom(s, 3, bad_len), std::invalid_argument);
  const auto negative = [](rng::RngStream&, int n) { return std::vector<double>(n, -1.0); };
  CHECK_THROWS_AS(rng::sample_isotropic_custom(s, 2, negative), std::invalid_argument);
  CHECK_THROWS_AS(rng::sample_ginibre(s, 3, 2), std::domain_error);
  CHECK_THROWS_AS(rng::sample_ginibre(s, 2, 0), std::domain_error);
}

TEST_CASE("ensemble spec validation") {
  rng::EnsembleSpec spec;
  spec.n = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.n = 2;
  spec.t = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.t = 5;
  spec.samples = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.samples = 10;
  CHECK_NOTHROW(spec.validate());
}

}  // TEST_SUITE
