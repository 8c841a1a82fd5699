#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "nudoa/array_model.hpp"
#include "nudoa/linalg.hpp"

namespace testutil {

using nudoa::CMatrix;
using nudoa::Complex;

inline nudoa::NoiseDiag wide_noise() {
  return nudoa::NoiseDiag(std::vector<double>{9.0, 1.0, 25.0, 0.25, 6.25, 25.0});
}

inline nudoa::Scenario make_scenario(std::vector<double> doas, int snapshots, double rho,
                                     double snr_db, int runs = 1, std::uint64_t seed = 7) {
  nudoa::Scenario s;
  s.geometry = nudoa::ArrayGeometry::ula(6);
  s.noise_diag = wide_noise();
  s.doas_deg = std::move(doas);
  s.correlation = rho;
  s.snapshots = snapshots;
  s.runs = runs;
  s.base_seed = seed;
  s.source_power = nudoa::required_sigma_s2(snr_db, s.noise_diag, 6);
  return s;
}

inline CMatrix random_complex(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = Complex(n(rng), n(rng));
  }
  return m;
}

/// Wishart-like Hermitian PD matrix with a moderate condition number.
inline nudoa::HermitianMatrix random_psd(std::mt19937_64& rng, int m, int dof = 20) {
  const CMatrix g = random_complex(rng, m, dof);
  CMatrix r = g * g.adjoint() / static_cast<double>(dof);
  r += 0.05 * CMatrix::Identity(m, m);
  return nudoa::HermitianMatrix::symmetrize(r);
}

inline std::vector<double> random_angles(std::mt19937_64& rng, int q) {
  std::uniform_real_distribution<double> u(-60.0, 60.0);
  for (;;) {
    std::vector<double> a(static_cast<std::size_t>(q));
    for (auto& x : a) x = u(rng);
    bool ok = true;
    for (int i = 0; i < q; ++i) {
      for (int j = i + 1; j < q; ++j) {
        if (std::abs(a[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(j)]) < 3.0) {
          ok = false;
        }
      }
    }
    if (ok) return a;
  }
}

inline nudoa::NoiseDiag random_noise(std::mt19937_64& rng, int m) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::vector<double> p(static_cast<std::size_t>(m));
  for (auto& x : p) x = std::exp(u(rng));
  return nudoa::NoiseDiag(p);
}

}  // namespace testutil
