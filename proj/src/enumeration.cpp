#include "nudoa/enumeration.hpp"

#include <cmath>
#include <string>

#include "nudoa/error.hpp"

namespace nudoa {

Approach approach_from_int(int value) {
  switch (value) {
    case 1: return Approach::ImlseFactor;
    case 2: return Approach::ImlseSml;
    case 3: return Approach::NoniterativeSml;
    default: fail(ErrorKind::Config, "approach must be 1, 2 or 3, got " + std::to_string(value));
  }
}

int free_parameter_count(int q, int sensors) {
  if (q < 0 || q >= sensors) {
    fail(ErrorKind::Domain, "source count outside [0, M-1]");
  }
  return q * q + q + sensors;
}

LprimeProfile lprime_profile(const ArrayGeometry& geometry, const HermitianMatrix& r_hat,
                             Approach approach, const EnumerationOptions& opts,
                             const std::vector<NoiseEstimate>* imlse_cache) {
  const int m = geometry.sensors();
  if (r_hat.size() != m) {
    fail(ErrorKind::InvalidArgument, "sample covariance size differs from sensor count");
  }
  LprimeProfile profile;
  profile.approach = approach;
  profile.values.resize(static_cast<std::size_t>(m));
  profile.fits.resize(static_cast<std::size_t>(m));
  profile.values[0] = zero_source_fit(r_hat).lprime;

  auto imlse_at = [&](int q) {
    if (imlse_cache != nullptr && static_cast<int>(imlse_cache->size()) > q) {
      return (*imlse_cache)[static_cast<std::size_t>(q)];
    }
    return imlse_estimate(r_hat, q, opts.estimator);
  };

  for (int q = 1; q < m; ++q) {
    const auto qi = static_cast<std::size_t>(q);
    if (approach == Approach::ImlseFactor) {
      const NoiseEstimate est = imlse_at(q);
      profile.values[qi] = lprime_of_model(reconstruct_covariance(*est.b_hat, est.q_hat), r_hat);
      continue;
    }
    const NoiseEstimate est = approach == Approach::ImlseSml
                                  ? imlse_at(q)
                                  : noniterative_estimate(r_hat, q, opts.estimator);
    const DoaResult doa =
        estimate_doa(geometry, r_hat, q, est.q_hat, DoaMethod::Sml, opts.search);
    ModelFit fit = doa.fit;
    fit.p_hat = psd_project(fit.p_hat);
    const HermitianMatrix r_q =
        reconstruct_covariance(geometry, fit.psi_hat_deg, fit.p_hat, fit.q_hat);
    if (!try_log_det_pd(r_q.matrix())) {
      fail(ErrorKind::Numeric, "reconstructed covariance for q = " + std::to_string(q) +
                                   " is not positive definite");
    }
    fit.lprime = lprime_of_model(r_q, r_hat);
    profile.values[qi] = fit.lprime;
    profile.fits[qi] = std::move(fit);
  }
  for (double v : profile.values) {
    if (!std::isfinite(v)) fail(ErrorKind::Numeric, "non-finite L' in profile");
  }
  return profile;
}

LprimeProfile lprime_profile(const ArrayGeometry& geometry, const SnapshotMatrix& x,
                             Approach approach, const EnumerationOptions& opts) {
  return lprime_profile(geometry, sample_covariance(x), approach, opts);
}

std::vector<double> aic_scores(const LprimeProfile& profile, int snapshots) {
  const auto m = static_cast<int>(profile.values.size());
  std::vector<double> out(profile.values.size());
  for (int q = 0; q < m; ++q) {
    out[static_cast<std::size_t>(q)] =
        snapshots * profile.values[static_cast<std::size_t>(q)] + free_parameter_count(q, m);
  }
  return out;
}

std::vector<double> mdl_scores(const LprimeProfile& profile, int snapshots) {
  const auto m = static_cast<int>(profile.values.size());
  const double half_log_n = 0.5 * std::log(static_cast<double>(snapshots));
  std::vector<double> out(profile.values.size());
  for (int q = 0; q < m; ++q) {
    out[static_cast<std::size_t>(q)] = snapshots * profile.values[static_cast<std::size_t>(q)] +
                                       half_log_n * free_parameter_count(q, m);
  }
  return out;
}

std::vector<double> eef_scores(const LprimeProfile& profile, int snapshots) {
  const auto m = static_cast<int>(profile.values.size());
  std::vector<double> out(profile.values.size(), 0.0);
  for (int q = 0; q < m; ++q) {
    const auto qi = static_cast<std::size_t>(q);
    const double lg = -2.0 * snapshots * (profile.values[qi] - profile.values[0]);
    const double k = free_parameter_count(q, m);
    const double ratio = lg / k;
    if (ratio >= 1.0) {
      out[qi] = lg - k * (std::log(ratio) + 1.0);
    }
  }
  return out;
}

int argmin_first(const std::vector<double>& values) {
  if (values.empty()) fail(ErrorKind::InvalidArgument, "argmin of an empty list");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return static_cast<int>(best);
}

int argmax_first(const std::vector<double>& values) {
  if (values.empty()) fail(ErrorKind::InvalidArgument, "argmax of an empty list");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return static_cast<int>(best);
}

EnumerationResult score_profile(const LprimeProfile& profile, int snapshots) {
  EnumerationResult r;
  r.aic = aic_scores(profile, snapshots);
  r.mdl = mdl_scores(profile, snapshots);
  r.eef = eef_scores(profile, snapshots);
  r.q_aic = argmin_first(r.aic);
  r.q_mdl = argmin_first(r.mdl);
  r.q_eef = argmax_first(r.eef);
  return r;
}

EnumerationResult enumerate_sources(const ArrayGeometry& geometry, const SnapshotMatrix& x,
                                    Approach approach, const EnumerationOptions& opts) {
  if (x.sensors() != geometry.sensors()) {
    fail(ErrorKind::InvalidArgument, "snapshot rows differ from sensor count");
  }
  return score_profile(lprime_profile(geometry, x, approach, opts), x.snapshots());
}

}  // namespace nudoa
