#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nudoa/linalg.hpp"

namespace nudoa {

/// Linear array; sensor positions are in half-wavelength units.
class ArrayGeometry {
 public:
  explicit ArrayGeometry(std::vector<double> positions);

  /// Uniform linear array with positions 0, 1, ..., sensors-1.
  static ArrayGeometry ula(int sensors);

  int sensors() const noexcept { return static_cast<int>(positions_.size()); }
  std::span<const double> positions() const noexcept { return positions_; }

 private:
  std::vector<double> positions_;
};

/// Per-sensor noise powers of a spatially white, nonuniform noise field.
class NoiseDiag {
 public:
  explicit NoiseDiag(std::vector<double> powers);
  explicit NoiseDiag(const RVector& powers);

  int size() const noexcept { return static_cast<int>(powers_.size()); }
  double operator[](int m) const { return powers_[static_cast<std::size_t>(m)]; }
  std::span<const double> powers() const noexcept { return powers_; }

  RVector vector() const;
  CMatrix matrix() const;
  double log_det() const;
  double min() const;
  double max() const;

 private:
  std::vector<double> powers_;
};

/// Complete description of one simulated experiment.
struct Scenario {
  ArrayGeometry geometry = ArrayGeometry::ula(2);
  std::vector<double> doas_deg;
  double source_power = 1.0;
  double correlation = 0.0;
  NoiseDiag noise_diag = NoiseDiag(std::vector<double>{1.0, 1.0});
  int snapshots = 1;
  int runs = 1;
  std::vector<double> snr_grid_db;
  std::uint64_t base_seed = 0;

  int sources() const noexcept { return static_cast<int>(doas_deg.size()); }

  /// Throws Error(Config) on any violated invariant.
  void validate() const;
};

/// M x N block of array snapshots, one column per time index.
class SnapshotMatrix {
 public:
  explicit SnapshotMatrix(CMatrix data);

  int sensors() const noexcept { return static_cast<int>(data_.rows()); }
  int snapshots() const noexcept { return static_cast<int>(data_.cols()); }
  const CMatrix& data() const noexcept { return data_; }

 private:
  CMatrix data_;
};

double deg_to_rad(double deg) noexcept;
double rad_to_deg(double rad) noexcept;

/// Element m has phase exp(j*pi*position_m*sin(psi)). psi must lie in (-90, 90).
CVector steering_vector(const ArrayGeometry& geometry, double psi_deg);

/// Columns are steering vectors; requires q < M and distinct angles.
CMatrix steering_matrix(const ArrayGeometry& geometry, std::span<const double> doas_deg);

/// Equal-power sources with a common real pairwise correlation coefficient.
HermitianMatrix source_covariance(int sources, double sigma_s2, double rho);

/// A P A^H + Q for the scenario's true parameters.
HermitianMatrix model_covariance(const Scenario& scenario);

/// Seed of the run_index-th Monte Carlo run; runs form independent streams.
std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t run_index) noexcept;

/// Draws the snapshots of one run. Pure in (scenario, run_index).
SnapshotMatrix synthesize_snapshots(const Scenario& scenario, std::uint64_t run_index);

/// (1/N) * sum_t x(t) x(t)^H.
HermitianMatrix sample_covariance(const SnapshotMatrix& x);

/// Per-source SNR (sigma_s^2 / M) * sum 1/sigma_m^2, linear scale.
double snr_linear(double sigma_s2, const NoiseDiag& noise);
double snr_linear(const Scenario& scenario);

/// Source power giving the requested per-source SNR.
double required_sigma_s2(double snr_db, const NoiseDiag& noise, int sensors);

/// Worst noise power ratio max/min.
double wnpr(const NoiseDiag& noise);

}  // namespace nudoa
