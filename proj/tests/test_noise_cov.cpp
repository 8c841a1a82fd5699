#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "nudoa/error.hpp"
#include "nudoa/likelihood.hpp"
#include "nudoa/noise_cov.hpp"
#include "test_util.hpp"

using namespace nudoa;

namespace {

HermitianMatrix factor_model(std::mt19937_64& rng, const NoiseDiag& q, int rank, double scale) {
  const CMatrix b = scale * testutil::random_complex(rng, q.size(), rank);
  return reconstruct_covariance(b, q);
}

}  // namespace

TEST_CASE("zero-source estimates agree") {
  std::mt19937_64 rng(21);
  const HermitianMatrix r = testutil::random_psd(rng, 6);
  const NoiseEstimate it = imlse_estimate(r, 0);
  const NoiseEstimate one = noniterative_estimate(r, 0);
  const NoiseEstimate zero = zero_source_estimate(r);
  CHECK(it.iterations == 1);
  CHECK(it.converged);
  for (int m = 0; m < 6; ++m) {
    CHECK(it.q_hat[m] == doctest::Approx(r(m, m).real()).epsilon(1e-14));
    CHECK(one.q_hat[m] == doctest::Approx(r(m, m).real()).epsilon(1e-14));
    CHECK(zero.q_hat[m] == doctest::Approx(r(m, m).real()).epsilon(1e-14));
  }
  const NoiseEstimate id = zero_source_estimate(HermitianMatrix(CMatrix::Identity(4, 4)));
  for (double p : id.q_hat.powers()) CHECK(p == 1.0);
}

TEST_CASE("iterative estimator recovers Q from an exact factor model") {
  std::mt19937_64 rng(22);
  const NoiseDiag q = testutil::wide_noise();
  for (int trial = 0; trial < 10; ++trial) {
    const HermitianMatrix r = factor_model(rng, q, 2, 2.0 + trial);
    const NoiseEstimate est = imlse_estimate(r, 2);
    CHECK(est.converged);
    for (int m = 0; m < 6; ++m) CHECK(std::abs(est.q_hat[m] / q[m] - 1.0) < 1e-6);
    REQUIRE(est.b_hat.has_value());
    const CMatrix fit = reconstruct_covariance(*est.b_hat, est.q_hat).matrix();
    CHECK((fit - r.matrix()).norm() < 1e-5 * r.matrix().norm());
  }
}

TEST_CASE("iterative estimator on scenario data") {
  // Sampled covariance of the two-source scenario: the median over runs of
  // every noise power lies within 25% of the truth.
  const Scenario s = testutil::make_scenario({-3.0, 4.0}, 300, 0.0, 10.0, 100, 5);
  const NoiseDiag truth = testutil::wide_noise();
  std::vector<std::vector<double>> per_sensor(6);
  for (int k = 0; k < 100; ++k) {
    const HermitianMatrix r = sample_covariance(synthesize_snapshots(s, static_cast<std::uint64_t>(k)));
    const NoiseEstimate est = imlse_estimate(r, 2);
    for (int m = 0; m < 6; ++m) per_sensor[static_cast<std::size_t>(m)].push_back(est.q_hat[m]);
  }
  for (int m = 0; m < 6; ++m) {
    auto& v = per_sensor[static_cast<std::size_t>(m)];
    std::nth_element(v.begin(), v.begin() + 50, v.end());
    CHECK(std::abs(v[50] / truth[m] - 1.0) < 0.25);
  }
}

TEST_CASE("iterative estimator descends and converges") {
  std::mt19937_64 rng(23);
  int converged = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int q = 1 + trial % 3;
    const HermitianMatrix r = testutil::random_psd(rng, 6, 10 + trial % 40);
    const NoiseEstimate est = imlse_estimate(r, q);
    const auto& h = est.objective_history;
    REQUIRE(h.size() >= 2);
    for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i] <= h[i - 1] + 1e-8);
    if (est.converged && est.iterations <= 50) ++converged;
    const double floor = 1e-8 * r.matrix().trace().real() / 6.0;
    for (double p : est.q_hat.powers()) {
      CHECK(std::isfinite(p));
      CHECK(p >= floor * (1.0 - 1e-12));
    }
  }
  CHECK(converged >= 99);
}

TEST_CASE("estimators are deterministic") {
  std::mt19937_64 rng(24);
  const HermitianMatrix r = testutil::random_psd(rng, 6);
  for (auto e : {NoiseEstimator::Imlse, NoiseEstimator::Noniterative}) {
    const NoiseEstimate a = estimate_noise(e, r, 2);
    const NoiseEstimate b = estimate_noise(e, r, 2);
    CHECK(std::equal(a.q_hat.powers().begin(), a.q_hat.powers().end(), b.q_hat.powers().begin()));
  }
}

TEST_CASE("noniterative estimator is exact for uniform noise and uncorrelated sources") {
  Scenario s = testutil::make_scenario({-3.0, 4.0}, 10, 0.0, 0.0);
  s.noise_diag = NoiseDiag(std::vector<double>(6, 2.5));
  s.source_power = 4.0;
  const NoiseEstimate est = noniterative_estimate(model_covariance(s), 2);
  CHECK(est.iterations == 1);
  CHECK_FALSE(est.b_hat.has_value());
  for (double p : est.q_hat.powers()) CHECK(p == doctest::Approx(2.5).epsilon(1e-10));
}

TEST_CASE("noniterative estimator degrades under correlation") {
  // Regression guard: at high SNR with correlated sources the constant
  // signal-diagonal assumption fails and the estimate is far off.
  const Scenario s = testutil::make_scenario({-3.0, 4.0}, 300, 0.95, 15.0, 20, 8);
  double err_iter = 0.0, err_one = 0.0;
  for (int k = 0; k < 20; ++k) {
    const HermitianMatrix r = sample_covariance(synthesize_snapshots(s, static_cast<std::uint64_t>(k)));
    const NoiseEstimate a = imlse_estimate(r, 2);
    const NoiseEstimate b = noniterative_estimate(r, 2);
    for (int m = 0; m < 6; ++m) {
      err_iter += std::abs(std::log(a.q_hat[m] / s.noise_diag[m]));
      err_one += std::abs(std::log(b.q_hat[m] / s.noise_diag[m]));
    }
  }
  CHECK(err_one > 2.0 * err_iter);
}

TEST_CASE("estimator options and inputs are validated") {
  std::mt19937_64 rng(25);
  const HermitianMatrix r = testutil::random_psd(rng, 4);
  EstimatorOptions bad;
  bad.floor_ratio = 1e-2;
  CHECK_THROWS_AS(imlse_estimate(r, 1, bad), Error);
  bad = {};
  bad.max_iters = 0;
  CHECK_THROWS_AS(imlse_estimate(r, 1, bad), Error);
  try {
    imlse_estimate(r, 4);
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
  CHECK(parse_noise_estimator("noniter") == NoiseEstimator::Noniterative);
  CHECK(parse_noise_estimator("imlse") == NoiseEstimator::Imlse);
  CHECK_THROWS_AS(parse_noise_estimator("em"), Error);
}
