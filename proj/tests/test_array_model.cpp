#include <cmath>
#include <cstring>

#include "doctest.h"
#include "nudoa/array_model.hpp"
#include "nudoa/error.hpp"
#include "test_util.hpp"

using namespace nudoa;

TEST_CASE("steering vector examples") {
  const CVector broadside = steering_vector(ArrayGeometry::ula(6), 0.0);
  for (int i = 0; i < 6; ++i) CHECK(std::abs(broadside(i) - Complex(1.0, 0.0)) < 1e-15);

  const CVector a = steering_vector(ArrayGeometry::ula(2), 30.0);
  CHECK(std::abs(a(0) - Complex(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(a(1) - Complex(0.0, 1.0)) < 1e-12);

  const auto g = ArrayGeometry::ula(6);
  for (double psi : {-71.0, -3.0, 4.0, 12.5, 80.0}) {
    const CVector plus = steering_vector(g, psi);
    const CVector minus = steering_vector(g, -psi);
    CHECK((minus - plus.conjugate()).norm() < 1e-12);
    for (int i = 0; i < 6; ++i) CHECK(std::abs(std::abs(plus(i)) - 1.0) < 1e-14);
    CHECK(plus.squaredNorm() == doctest::Approx(6.0).epsilon(1e-14));
  }
}

TEST_CASE("steering vector rejects angles outside the open interval") {
  const auto g = ArrayGeometry::ula(4);
  CHECK_THROWS_AS(steering_vector(g, 90.0), Error);
  CHECK_THROWS_AS(steering_vector(g, -95.0), Error);
}

TEST_CASE("steering matrix") {
  const auto g = ArrayGeometry::ula(6);
  const std::vector<double> one{4.0};
  CHECK((steering_matrix(g, one).col(0) - steering_vector(g, 4.0)).norm() < 1e-15);

  const std::vector<double> two{-3.0, 4.0};
  const CMatrix a = steering_matrix(g, two);
  CHECK(a.cols() == 2);
  for (int c = 0; c < 2; ++c) CHECK(a.col(c).squaredNorm() == doctest::Approx(6.0));
  const CMatrix gram = a.adjoint() * a;
  CHECK(hermitian_condition(gram) < 1e3);
  CHECK(Eigen::FullPivLU<CMatrix>(a).rank() == 2);

  const std::vector<double> dup{5.0, 5.0};
  CHECK_THROWS_AS(steering_matrix(g, dup), Error);
  const std::vector<double> many{1, 2, 3, 4, 5, 6};
  CHECK_THROWS_AS(steering_matrix(g, many), Error);
}

TEST_CASE("source covariance") {
  const CMatrix id = source_covariance(2, 1.0, 0.0).matrix();
  CHECK((id - CMatrix::Identity(2, 2)).norm() < 1e-15);

  const CMatrix p = source_covariance(2, 1.0, 0.95).matrix();
  CHECK(p(0, 1).real() == doctest::Approx(0.95));
  CHECK(p(1, 0).real() == doctest::Approx(0.95));
  CHECK(p(0, 0).real() == doctest::Approx(1.0));
  const EigenPairs eig = hermitian_eig_desc(p);
  CHECK(eig.values(0) == doctest::Approx(1.95));
  CHECK(eig.values(1) == doctest::Approx(0.05));

  for (double rho : {0.0, 0.3, 0.9, 0.999}) {
    const EigenPairs e = hermitian_eig_desc(source_covariance(2, 2.5, rho).matrix());
    CHECK(e.values(1) == doctest::Approx(2.5 * (1.0 - rho)).epsilon(1e-9));
    CHECK(e.values(1) > 0.0);
  }
  CHECK_THROWS_AS(source_covariance(2, 1.0, 1.0), Error);
}

TEST_CASE("sample covariance examples") {
  CMatrix x(3, 1);
  x << Complex(1, 2), Complex(-0.5, 0), Complex(0, 3);
  const CMatrix outer = x * x.adjoint();
  CHECK((sample_covariance(SnapshotMatrix(x)).matrix() - outer).norm() < 1e-14);

  CMatrix rep(3, 5);
  for (int t = 0; t < 5; ++t) rep.col(t) = x.col(0);
  CHECK((sample_covariance(SnapshotMatrix(rep)).matrix() - outer).norm() < 1e-13);

  const CMatrix eye = CMatrix::Identity(2, 2);
  CHECK((sample_covariance(SnapshotMatrix(eye)).matrix() - 0.5 * eye).norm() < 1e-15);
}

TEST_CASE("sample covariance is Hermitian PSD") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix x = testutil::random_complex(rng, 6, 1 + trial);
    const CMatrix r = sample_covariance(SnapshotMatrix(x)).matrix();
    CHECK((r - r.adjoint()).norm() == 0.0);
    const EigenPairs e = hermitian_eig_desc(r);
    CHECK(e.values.minCoeff() >= -1e-10 * e.values.maxCoeff());
  }
}

TEST_CASE("snapshot synthesis is deterministic per run") {
  const Scenario s = testutil::make_scenario({-3.0, 4.0}, 50, 0.5, 5.0, 4, 99);
  const CMatrix a = synthesize_snapshots(s, 2).data();
  const CMatrix b = synthesize_snapshots(s, 2).data();
  CHECK(a.rows() == 6);
  CHECK(a.cols() == 50);
  CHECK(std::memcmp(a.data(), b.data(), sizeof(Complex) * a.size()) == 0);
  CHECK((synthesize_snapshots(s, 3).data() - a).norm() > 1.0);
  CHECK(run_seed(99, 2) != run_seed(99, 3));
  CHECK(run_seed(99, 2) != run_seed(100, 2));
}

TEST_CASE("large-N sample covariance matches the model") {
  Scenario noise_only = testutil::make_scenario({}, 1000000, 0.0, 0.0);
  noise_only.source_power = 1.0;
  const CMatrix r0 = sample_covariance(synthesize_snapshots(noise_only, 0)).matrix();
  const auto q = testutil::wide_noise();
  for (int m = 0; m < 6; ++m) CHECK(std::abs(r0(m, m).real() / q[m] - 1.0) < 0.01);

  for (double rho : {0.0, 0.95}) {
    const Scenario s = testutil::make_scenario({-3.0, 4.0}, 1000000, rho, 5.0);
    const CMatrix r = sample_covariance(synthesize_snapshots(s, 1)).matrix();
    const CMatrix model = model_covariance(s).matrix();
    CHECK((r - model).norm() / model.norm() < 0.01);
  }
}

TEST_CASE("SNR arithmetic") {
  const auto q = testutil::wide_noise();
  CHECK(snr_linear(1.0, q) == doctest::Approx(0.891852).epsilon(1e-6));
  CHECK(10.0 * std::log10(snr_linear(1.0, q)) == doctest::Approx(-0.4971).epsilon(1e-4));
  CHECK(snr_linear(1.0, NoiseDiag(std::vector<double>(6, 1.0))) == doctest::Approx(1.0));
  CHECK(required_sigma_s2(0.0, q, 6) == doctest::Approx(6.0 / 5.351111).epsilon(1e-6));
  CHECK(required_sigma_s2(0.0, q, 6) == doctest::Approx(1.12126).epsilon(1e-5));
  for (double db : {-10.0, 3.0, 17.0}) {
    CHECK(10.0 * std::log10(snr_linear(required_sigma_s2(db, q, 6), q)) ==
          doctest::Approx(db).epsilon(1e-12));
  }
}

TEST_CASE("worst noise power ratio") {
  CHECK(wnpr(testutil::wide_noise()) == doctest::Approx(100.0));
  CHECK(wnpr(NoiseDiag(std::vector<double>(4, 3.0))) == doctest::Approx(1.0));
  CHECK(wnpr(NoiseDiag(std::vector<double>{2.0, 8.0})) == doctest::Approx(4.0));
}

TEST_CASE("scenario validation") {
  Scenario s = testutil::make_scenario({-3.0, 4.0}, 10, 0.0, 0.0);
  CHECK_NOTHROW(s.validate());
  s.correlation = 1.0;
  CHECK_THROWS_AS(s.validate(), Error);
  s.correlation = 0.0;
  s.doas_deg = {1, 2, 3, 4, 5, 6};
  CHECK_THROWS_AS(s.validate(), Error);
  s.doas_deg = {95.0};
  CHECK_THROWS_AS(s.validate(), Error);
  CHECK_THROWS_AS(NoiseDiag(std::vector<double>{1.0, 0.0}), Error);
}
