#include "nudoa/array_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "nudoa/error.hpp"

namespace nudoa {

namespace {

constexpr double kDuplicateAngleTolDeg = 1e-9;

void require_open_angle(double psi_deg) {
  if (!std::isfinite(psi_deg) || psi_deg <= -90.0 || psi_deg >= 90.0) {
    fail(ErrorKind::Domain, "angle " + std::to_string(psi_deg) + " deg outside (-90, 90)");
  }
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

ArrayGeometry::ArrayGeometry(std::vector<double> positions) : positions_(std::move(positions)) {
  if (positions_.size() < 2) {
    fail(ErrorKind::InvalidArgument, "array needs at least 2 sensors");
  }
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    if (!std::isfinite(positions_[i])) {
      fail(ErrorKind::InvalidArgument, "sensor position is not finite");
    }
    if (i > 0 && !(positions_[i] > positions_[i - 1])) {
      fail(ErrorKind::InvalidArgument, "sensor positions must be strictly increasing");
    }
  }
}

ArrayGeometry ArrayGeometry::ula(int sensors) {
  if (sensors < 2) {
    fail(ErrorKind::InvalidArgument, "array needs at least 2 sensors");
  }
  std::vector<double> pos(static_cast<std::size_t>(sensors));
  for (int m = 0; m < sensors; ++m) {
    pos[static_cast<std::size_t>(m)] = m;
  }
  return ArrayGeometry(std::move(pos));
}

NoiseDiag::NoiseDiag(std::vector<double> powers) : powers_(std::move(powers)) {
  if (powers_.empty()) {
    fail(ErrorKind::InvalidArgument, "noise diagonal is empty");
  }
  for (double p : powers_) {
    if (!std::isfinite(p) || !(p > 0.0)) {
      fail(ErrorKind::Domain, "noise power must be finite and > 0, got " + std::to_string(p));
    }
  }
}

NoiseDiag::NoiseDiag(const RVector& powers)
    : NoiseDiag(std::vector<double>(powers.data(), powers.data() + powers.size())) {}

RVector NoiseDiag::vector() const {
  return Eigen::Map<const RVector>(powers_.data(), static_cast<Eigen::Index>(powers_.size()));
}

CMatrix NoiseDiag::matrix() const {
  return vector().cast<Complex>().asDiagonal();
}

double NoiseDiag::log_det() const {
  double s = 0.0;
  for (double p : powers_) s += std::log(p);
  return s;
}

double NoiseDiag::min() const { return *std::min_element(powers_.begin(), powers_.end()); }
double NoiseDiag::max() const { return *std::max_element(powers_.begin(), powers_.end()); }

void Scenario::validate() const {
  const int m = geometry.sensors();
  if (noise_diag.size() != m) {
    fail(ErrorKind::Config, "noise_diag has " + std::to_string(noise_diag.size()) +
                                " entries for " + std::to_string(m) + " sensors");
  }
  if (sources() >= m) {
    fail(ErrorKind::Config, "number of sources must be below the sensor count");
  }
  for (double psi : doas_deg) {
    if (!std::isfinite(psi) || psi <= -90.0 || psi >= 90.0) {
      fail(ErrorKind::Config, "DOA " + std::to_string(psi) + " deg outside (-90, 90)");
    }
  }
  if (!std::isfinite(source_power) || !(source_power > 0.0)) {
    fail(ErrorKind::Config, "source_power must be > 0");
  }
  if (!std::isfinite(correlation) || correlation < 0.0 || correlation >= 1.0) {
    fail(ErrorKind::Config, "correlation must lie in [0, 1)");
  }
  if (snapshots < 1) fail(ErrorKind::Config, "snapshots must be >= 1");
  if (runs < 1) fail(ErrorKind::Config, "runs must be >= 1");
  for (double s : snr_grid_db) {
    if (!std::isfinite(s)) fail(ErrorKind::Config, "snr_grid_db entries must be finite");
  }
}

SnapshotMatrix::SnapshotMatrix(CMatrix data) : data_(std::move(data)) {
  if (data_.cols() < 1 || data_.rows() < 1) {
    fail(ErrorKind::InvalidArgument, "snapshot matrix is empty");
  }
  if (!data_.allFinite()) {
    fail(ErrorKind::Data, "snapshot matrix has non-finite entries");
  }
}

double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

CVector steering_vector(const ArrayGeometry& geometry, double psi_deg) {
  require_open_angle(psi_deg);
  const double s = std::sin(deg_to_rad(psi_deg));
  const auto pos = geometry.positions();
  CVector a(geometry.sensors());
  for (int m = 0; m < geometry.sensors(); ++m) {
    a(m) = std::polar(1.0, std::numbers::pi * pos[static_cast<std::size_t>(m)] * s);
  }
  return a;
}

CMatrix steering_matrix(const ArrayGeometry& geometry, std::span<const double> doas_deg) {
  const auto q = static_cast<int>(doas_deg.size());
  if (q >= geometry.sensors()) {
    fail(ErrorKind::Domain, "steering matrix needs fewer sources than sensors");
  }
  for (int i = 0; i < q; ++i) {
    for (int j = i + 1; j < q; ++j) {
      if (std::abs(doas_deg[static_cast<std::size_t>(i)] - doas_deg[static_cast<std::size_t>(j)]) <=
          kDuplicateAngleTolDeg) {
        fail(ErrorKind::Numeric, "degenerate array manifold: duplicate source angles");
      }
    }
  }
  CMatrix a(geometry.sensors(), q);
  for (int l = 0; l < q; ++l) {
    a.col(l) = steering_vector(geometry, doas_deg[static_cast<std::size_t>(l)]);
  }
  return a;
}

HermitianMatrix source_covariance(int sources, double sigma_s2, double rho) {
  if (sources < 0) fail(ErrorKind::InvalidArgument, "negative source count");
  if (!(sigma_s2 > 0.0)) fail(ErrorKind::Domain, "source power must be > 0");
  if (rho >= 1.0) fail(ErrorKind::Numeric, "correlation >= 1 gives a singular source covariance");
  if (rho < 0.0) fail(ErrorKind::Domain, "correlation must be >= 0");
  CMatrix p = CMatrix::Constant(sources, sources, Complex(rho * sigma_s2, 0.0));
  p.diagonal().setConstant(Complex(sigma_s2, 0.0));
  return HermitianMatrix(p);
}

HermitianMatrix model_covariance(const Scenario& scenario) {
  const CMatrix a = steering_matrix(scenario.geometry, scenario.doas_deg);
  const HermitianMatrix p =
      source_covariance(scenario.sources(), scenario.source_power, scenario.correlation);
  return HermitianMatrix::symmetrize(a * p.matrix() * a.adjoint() + scenario.noise_diag.matrix());
}

std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t run_index) noexcept {
  return base_seed ^ splitmix64(run_index);
}

SnapshotMatrix synthesize_snapshots(const Scenario& scenario, std::uint64_t run_index) {
  scenario.validate();
  const int m = scenario.geometry.sensors();
  const int q = scenario.sources();
  const int n = scenario.snapshots;

  std::mt19937_64 rng(run_seed(scenario.base_seed, run_index));
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));
  auto draw = [&](Eigen::Index rows, Eigen::Index cols) {
    CMatrix z(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) {
        const double re = half(rng);
        const double im = half(rng);
        z(r, c) = Complex(re, im);
      }
    }
    return z;
  };

  // Sources first, then noise, so the noise draws of a run do not depend on
  // the source power.
  CMatrix x(m, n);
  if (q > 0) {
    const HermitianMatrix p = source_covariance(q, scenario.source_power, scenario.correlation);
    Eigen::LLT<CMatrix> llt(p.matrix());
    if (llt.info() != Eigen::Success) {
      fail(ErrorKind::Numeric, "source covariance is not positive definite");
    }
    const CMatrix s = CMatrix(llt.matrixL()) * draw(q, n);
    x = steering_matrix(scenario.geometry, scenario.doas_deg) * s;
  } else {
    x.setZero();
  }
  const CMatrix w = draw(m, n);
  for (int r = 0; r < m; ++r) {
    x.row(r) += std::sqrt(scenario.noise_diag[r]) * w.row(r);
  }
  return SnapshotMatrix(std::move(x));
}

HermitianMatrix sample_covariance(const SnapshotMatrix& x) {
  const CMatrix r = x.data() * x.data().adjoint() / static_cast<double>(x.snapshots());
  return HermitianMatrix::symmetrize(r);
}

double snr_linear(double sigma_s2, const NoiseDiag& noise) {
  double inv = 0.0;
  for (double p : noise.powers()) inv += 1.0 / p;
  return sigma_s2 / noise.size() * inv;
}

double snr_linear(const Scenario& scenario) {
  return snr_linear(scenario.source_power, scenario.noise_diag);
}

double required_sigma_s2(double snr_db, const NoiseDiag& noise, int sensors) {
  if (sensors != noise.size()) {
    fail(ErrorKind::InvalidArgument, "sensor count does not match the noise diagonal");
  }
  double inv = 0.0;
  for (double p : noise.powers()) inv += 1.0 / p;
  return std::pow(10.0, snr_db / 10.0) * sensors / inv;
}

double wnpr(const NoiseDiag& noise) { return noise.max() / noise.min(); }

}  // namespace nudoa
