#include "nudoa/noise_cov.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "nudoa/error.hpp"
#include "nudoa/likelihood.hpp"

namespace nudoa {

namespace {

void check_inputs(const HermitianMatrix& r_hat, int q) {
  const auto m = static_cast<int>(r_hat.size());
  if (q < 0 || q >= m) {
    fail(ErrorKind::Domain, "source count " + std::to_string(q) + " outside [0, " +
                                std::to_string(m - 1) + "]");
  }
  for (int i = 0; i < m; ++i) {
    if (!(r_hat(i, i).real() > 0.0)) {
      fail(ErrorKind::Data, "sample covariance has a nonpositive diagonal entry");
    }
  }
}

double noise_floor(const HermitianMatrix& r_hat, const EstimatorOptions& opts) {
  return opts.floor_ratio * r_hat.matrix().trace().real() / static_cast<double>(r_hat.size());
}

// Closed-form rank-q ML factor for a fixed noise diagonal.
CMatrix ml_factor(const HermitianMatrix& r_hat, const RVector& noise, int q) {
  const RVector sd = noise.cwiseSqrt();
  const RVector inv_sd = sd.cwiseInverse();
  const CMatrix whitened = inv_sd.cast<Complex>().asDiagonal() * r_hat.matrix() *
                           inv_sd.cast<Complex>().asDiagonal();
  const EigenPairs eig = hermitian_eig_desc((whitened + whitened.adjoint()) * 0.5);
  CMatrix b(r_hat.size(), q);
  for (int i = 0; i < q; ++i) {
    b.col(i) = std::sqrt(std::max(eig.values(i) - 1.0, 0.0)) * eig.vectors.col(i);
  }
  return sd.cast<Complex>().asDiagonal() * b;
}

double factor_objective(const CMatrix& b, const RVector& noise, const HermitianMatrix& r_hat) {
  return lprime_of_model(reconstruct_covariance(b, NoiseDiag(noise)), r_hat);
}

// Gradient of the profiled objective with respect to log Q. B is optimal for
// Q, so only the explicit Q dependence contributes.
RVector log_noise_gradient(const HermitianMatrix& r_hat, const RVector& noise, int q) {
  const CMatrix b = ml_factor(r_hat, noise, q);
  CMatrix sigma = b * b.adjoint();
  sigma.diagonal() += noise.cast<Complex>();
  const Eigen::LDLT<CMatrix> ldlt(sigma);
  const CMatrix inv = ldlt.solve(CMatrix::Identity(sigma.rows(), sigma.cols()));
  const CMatrix g = inv - inv * r_hat.matrix() * inv;
  return (g.diagonal().real().array() * noise.array()).matrix();
}

}  // namespace

void EstimatorOptions::validate() const {
  if (max_iters < 1) fail(ErrorKind::Config, "max_iters must be >= 1");
  if (!(rel_tol > 0.0)) fail(ErrorKind::Config, "rel_tol must be > 0");
  if (!(floor_ratio > 0.0) || floor_ratio > 1e-3) {
    fail(ErrorKind::Config, "floor_ratio must lie in (0, 1e-3]");
  }
}

NoiseEstimator parse_noise_estimator(std::string_view name) {
  if (name == "imlse") return NoiseEstimator::Imlse;
  if (name == "noniterative" || name == "noniter") return NoiseEstimator::Noniterative;
  fail(ErrorKind::Config, "unknown noise estimator '" + std::string(name) + "'");
}

const char* to_string(NoiseEstimator estimator) noexcept {
  return estimator == NoiseEstimator::Imlse ? "imlse" : "noniterative";
}

NoiseEstimate imlse_estimate(const HermitianMatrix& r_hat, int q, const EstimatorOptions& opts) {
  opts.validate();
  check_inputs(r_hat, q);
  const EigenPairs eig = hermitian_eig_desc(r_hat.matrix());
  if (eig.values.minCoeff() < -1e-10 * std::abs(eig.values.maxCoeff())) {
    fail(ErrorKind::Data, "sample covariance is not positive semidefinite");
  }

  const double floor = noise_floor(r_hat, opts);
  const RVector r_diag = r_hat.matrix().diagonal().real();

  // One pass of the basic update: factor for the current Q, then the floored
  // diagonal of R_hat - B B^H.
  auto update = [&](const RVector& noise) -> RVector {
    const CMatrix b = ml_factor(r_hat, noise, q);
    return (r_diag - (b * b.adjoint()).diagonal().real()).cwiseMax(floor);
  };
  auto objective = [&](const RVector& noise) {
    return factor_objective(ml_factor(r_hat, noise, q), noise, r_hat);
  };

  const auto m = static_cast<int>(r_hat.size());
  const double small = 1e-3 * r_diag.mean();
  RVector noise = r_diag.cwiseMax(floor);
  double value = objective(noise);
  NoiseEstimate out{NoiseDiag(noise), std::nullopt, 0, false, {}};

  // The basic update alone converges linearly and crawls where the likelihood
  // is flat in Q. Each iteration also tries a Newton step on the profiled
  // objective in log Q (finite-difference Hessian, components pinned at the
  // floor held fixed) and a move of small, falling components straight to
  // the floor. The candidate with the lowest objective is kept.
  for (int k = 1; k <= opts.max_iters; ++k) {
    out.objective_history.push_back(value);
    RVector next = update(noise);
    double next_value = objective(next);

    const RVector grad = log_noise_gradient(r_hat, noise, q);
    std::vector<int> free;
    for (int i = 0; i < m; ++i) {
      if (!(noise(i) <= floor * (1.0 + 1e-9) && grad(i) >= 0.0)) free.push_back(i);
    }
    const auto nf = static_cast<int>(free.size());
    if (nf > 0) {
      const RVector log_x = noise.array().log();
      constexpr double h = 1e-5;
      Eigen::MatrixXd hess(nf, nf);
      for (int j = 0; j < nf; ++j) {
        RVector up = log_x, down = log_x;
        up(free[j]) += h;
        down(free[j]) -= h;
        const RVector diff = (log_noise_gradient(r_hat, up.array().exp(), q) -
                              log_noise_gradient(r_hat, down.array().exp(), q)) /
                             (2.0 * h);
        for (int i = 0; i < nf; ++i) hess(i, j) = diff(free[i]);
      }
      hess = 0.5 * (hess + hess.transpose());
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess);
      const RVector abs_eig = es.eigenvalues().cwiseAbs();
      const RVector eig = abs_eig.cwiseMax(1e-8 * std::max(abs_eig.maxCoeff(), 1e-300));
      RVector g_free(nf);
      for (int i = 0; i < nf; ++i) g_free(i) = grad(free[i]);
      RVector step = -(es.eigenvectors() *
                       (eig.cwiseInverse().asDiagonal() * (es.eigenvectors().transpose() * g_free)));
      // At most a factor e up and e^3 down per iteration.
      double scale = 1.0;
      for (int i = 0; i < nf; ++i) {
        if (step(i) > 1.0) scale = std::min(scale, 1.0 / step(i));
        if (step(i) < -3.0) scale = std::min(scale, -3.0 / step(i));
      }
      step *= scale;
      if (step.allFinite()) {
        double t = 1.0;
        for (int tries = 0; tries < 30; ++tries, t *= 0.5) {
          RVector cand = noise;
          for (int i = 0; i < nf; ++i) {
            cand(free[i]) = std::max(std::exp(log_x(free[i]) + t * step(i)), floor);
          }
          const double v = objective(cand);
          if (v < next_value) {
            next = cand;
            next_value = v;
            break;
          }
        }
      }

      RVector snapped = next;
      bool any = false;
      for (int i : free) {
        if (next(i) < noise(i) && grad(i) > 0.0 && noise(i) < small) {
          snapped(i) = floor;
          any = true;
        }
      }
      if (any) {
        const double v = objective(snapped);
        if (v <= next_value + 1e-12 * std::max(1.0, std::abs(next_value))) {
          next = snapped;
          next_value = v;
        }
      }
    }

    const double change = ((next - noise).cwiseAbs().array() / noise.array()).maxCoeff();
    noise = next;
    value = next_value;
    out.iterations = k;
    if (change < opts.rel_tol) {
      out.converged = true;
      break;
    }
  }
  out.objective_history.push_back(value);
  out.q_hat = NoiseDiag(noise);
  out.b_hat = ml_factor(r_hat, noise, q);
  return out;
}

NoiseEstimate noniterative_estimate(const HermitianMatrix& r_hat, int q,
                                    const EstimatorOptions& opts) {
  opts.validate();
  check_inputs(r_hat, q);
  const auto m = static_cast<int>(r_hat.size());
  const EigenPairs eig = hermitian_eig_desc(r_hat.matrix());
  const double mu = eig.values.tail(m - q).mean();
  double signal_trace = 0.0;
  for (int i = 0; i < q; ++i) {
    signal_trace += std::max(eig.values(i) - mu, 0.0);
  }
  const double per_sensor_signal = signal_trace / m;
  const double floor = noise_floor(r_hat, opts);
  const RVector noise =
      (r_hat.matrix().diagonal().real().array() - per_sensor_signal).cwiseMax(floor);
  return NoiseEstimate{NoiseDiag(noise), std::nullopt, 1, true, {}};
}

NoiseEstimate zero_source_estimate(const HermitianMatrix& r_hat) {
  return NoiseEstimate{zero_source_fit(r_hat).q_hat, std::nullopt, 1, true, {}};
}

NoiseEstimate estimate_noise(NoiseEstimator estimator, const HermitianMatrix& r_hat, int q,
                             const EstimatorOptions& opts) {
  switch (estimator) {
    case NoiseEstimator::Imlse: return imlse_estimate(r_hat, q, opts);
    case NoiseEstimator::Noniterative: return noniterative_estimate(r_hat, q, opts);
  }
  fail(ErrorKind::InvalidArgument, "unknown noise estimator");
}

}  // namespace nudoa
