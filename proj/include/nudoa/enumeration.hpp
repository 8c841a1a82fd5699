#pragma once

#include <optional>
#include <vector>

#include "nudoa/array_model.hpp"
#include "nudoa/doa_est.hpp"
#include "nudoa/likelihood.hpp"
#include "nudoa/noise_cov.hpp"

namespace nudoa {

/// How L'(theta_q) is obtained for q >= 1.
enum class Approach {
  ImlseFactor = 1,      // R_q = B B^H + Q from the iterative estimator
  ImlseSml = 2,         // iterative Q, then SML angles and signal covariance
  NoniterativeSml = 3,  // noniterative Q, then SML angles and signal covariance
};

Approach approach_from_int(int value);

struct EnumerationOptions {
  EstimatorOptions estimator;
  SearchOptions search;
};

struct LprimeProfile {
  std::vector<double> values;  // index q = 0 .. M-1
  Approach approach = Approach::ImlseFactor;
  std::vector<std::optional<ModelFit>> fits;  // empty entries for q = 0 and approach 1
};

struct EnumerationResult {
  int q_aic = 0;
  int q_mdl = 0;
  int q_eef = 0;
  std::vector<double> aic;
  std::vector<double> mdl;
  std::vector<double> eef;
};

/// Free real parameters q^2 + q + M of the q-source nonuniform-noise model.
int free_parameter_count(int q, int sensors);

/// Per-q fitted L' values for q = 0 .. M-1.
///
/// `imlse_cache`, when given, holds imlse_estimate(r_hat, q) at index q and
/// is reused instead of re-running the estimator.
LprimeProfile lprime_profile(const ArrayGeometry& geometry, const HermitianMatrix& r_hat,
                             Approach approach, const EnumerationOptions& opts = {},
                             const std::vector<NoiseEstimate>* imlse_cache = nullptr);
LprimeProfile lprime_profile(const ArrayGeometry& geometry, const SnapshotMatrix& x,
                             Approach approach, const EnumerationOptions& opts = {});

std::vector<double> aic_scores(const LprimeProfile& profile, int snapshots);
std::vector<double> mdl_scores(const LprimeProfile& profile, int snapshots);
/// EEF(q) gated by u(L_G / k_q - 1), L_G = -2N[L'(q) - L'(0)]. Gate-closed
/// entries are exactly 0 and never reach the logarithm.
std::vector<double> eef_scores(const LprimeProfile& profile, int snapshots);

/// First index of the minimum / maximum (ties resolve to the smaller q).
int argmin_first(const std::vector<double>& values);
int argmax_first(const std::vector<double>& values);

EnumerationResult score_profile(const LprimeProfile& profile, int snapshots);

EnumerationResult enumerate_sources(const ArrayGeometry& geometry, const SnapshotMatrix& x,
                                    Approach approach, const EnumerationOptions& opts = {});

}  // namespace nudoa
