#pragma once

#include <span>
#include <vector>

#include "nudoa/array_model.hpp"
#include "nudoa/linalg.hpp"

namespace nudoa {

/// Steering matrix and sample covariance after whitening by Q^{-1/2}.
struct WhitenedPair {
  CMatrix a_tilde;
  HermitianMatrix r_tilde;
};

/// Estimated parameters of a q-source model together with its fit value.
struct ModelFit {
  std::vector<double> psi_hat_deg;
  CMatrix p_hat;
  NoiseDiag q_hat = NoiseDiag(std::vector<double>{1.0});
  double lprime = 0.0;

  /// Gaussian log-likelihood of N snapshots: -N*M*ln(pi) - N*lprime.
  double log_likelihood(int snapshots) const;
};

double log_likelihood(double lprime, int snapshots, int sensors);

WhitenedPair whiten(const CMatrix& a, const HermitianMatrix& r_hat, const NoiseDiag& q);

/// Signal covariance minimizing the stochastic criterion for fixed angles
/// and noise:
///   (A~^H A~)^{-1} A~^H R~ A~ (A~^H A~)^{-1} - (A~^H A~)^{-1}.
/// Symmetrized but not PSD-projected. Errors when cond(A~^H A~) > 1e12.
HermitianMatrix estimate_signal_covariance(const WhitenedPair& pair);

/// Orthogonal projector onto the column space of a_tilde.
HermitianMatrix projector(const CMatrix& a_tilde);

/// Stochastic criterion minimized over the signal covariance:
///   ln det Q + ln det[A~^H R~ A~ (A~^H A~)^{-1}] + tr[(I - P_A~) R~] + q.
double concentrated_criterion(const ArrayGeometry& geometry, std::span<const double> psi_deg,
                              const NoiseDiag& q, const HermitianMatrix& r_hat);

/// ln det(R_model) + tr(R_model^{-1} R_hat). R_model must be positive definite.
double lprime_of_model(const HermitianMatrix& r_model, const HermitianMatrix& r_hat);

/// lprime_of_model evaluated at A(psi) P A(psi)^H + Q.
double lprime_full(const ArrayGeometry& geometry, std::span<const double> psi_deg,
                   const CMatrix& p, const NoiseDiag& q, const HermitianMatrix& r_hat);

/// A(psi) P A(psi)^H + Q.
HermitianMatrix reconstruct_covariance(const ArrayGeometry& geometry,
                                       std::span<const double> psi_deg, const CMatrix& p,
                                       const NoiseDiag& q);

/// B B^H + Q.
HermitianMatrix reconstruct_covariance(const CMatrix& b, const NoiseDiag& q);

struct ZeroSourceFit {
  NoiseDiag q_hat;
  double lprime;
};

/// No-source model: sigma_m^2 = R_hat(m, m), lprime = sum ln R_hat(m, m) + M.
ZeroSourceFit zero_source_fit(const HermitianMatrix& r_hat);

}  // namespace nudoa
