#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "nudoa/array_model.hpp"
#include "nudoa/linalg.hpp"

namespace nudoa {

struct EstimatorOptions {
  int max_iters = 50;
  double rel_tol = 1e-6;
  /// Noise floor eps_Q = floor_ratio * tr(R_hat) / M.
  double floor_ratio = 1e-8;

  void validate() const;
};

struct NoiseEstimate {
  NoiseDiag q_hat;
  /// M x q signal factor with R ~ B B^H + Q; absent for the noniterative path.
  std::optional<CMatrix> b_hat;
  int iterations = 0;
  bool converged = false;
  /// ln det(B B^H + Q) + tr[(B B^H + Q)^{-1} R_hat] at the start of each
  /// iteration followed by the final value (iterative estimator only).
  std::vector<double> objective_history;
};

enum class NoiseEstimator { Imlse, Noniterative };

/// "imlse" or "noniterative" (also accepts "noniter").
NoiseEstimator parse_noise_estimator(std::string_view name);
const char* to_string(NoiseEstimator estimator) noexcept;

/// Alternating ML estimate of (B, Q) for R = B B^H + Q with rank(B) = q.
///
/// Each pass whitens R_hat by the current Q, keeps the top-q whitened
/// eigenpairs with eigenvalues shifted by one (the closed-form rank-q ML
/// factor), maps the factor back and resets Q to the floored diagonal of
/// R_hat - B B^H. Starts from Q = diag(R_hat).
NoiseEstimate imlse_estimate(const HermitianMatrix& r_hat, int q,
                             const EstimatorOptions& opts = {});

/// One-shot eigendecomposition estimate. Assumes the signal part of the
/// covariance has a constant diagonal (uncorrelated sources on a ULA).
NoiseEstimate noniterative_estimate(const HermitianMatrix& r_hat, int q,
                                    const EstimatorOptions& opts = {});

/// Q_hat = diag(R_hat).
NoiseEstimate zero_source_estimate(const HermitianMatrix& r_hat);

NoiseEstimate estimate_noise(NoiseEstimator estimator, const HermitianMatrix& r_hat, int q,
                             const EstimatorOptions& opts = {});

}  // namespace nudoa
