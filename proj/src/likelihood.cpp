#include "nudoa/likelihood.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nudoa/error.hpp"

namespace nudoa {

namespace {

constexpr double kMaxGramCondition = 1e12;

Eigen::LDLT<CMatrix> factor_gram(const CMatrix& a_tilde, CMatrix& gram) {
  gram = a_tilde.adjoint() * a_tilde;
  if (hermitian_condition(gram) > kMaxGramCondition) {
    fail(ErrorKind::Numeric, "ill-conditioned array manifold: cond(A^H A) exceeds 1e12");
  }
  return Eigen::LDLT<CMatrix>(gram);
}

void require_dims(const HermitianMatrix& r_hat, const NoiseDiag& q) {
  if (r_hat.size() != q.size()) {
    fail(ErrorKind::InvalidArgument, "covariance and noise diagonal sizes differ");
  }
}

}  // namespace

double log_likelihood(double lprime, int snapshots, int sensors) {
  return -static_cast<double>(snapshots) * sensors * std::log(std::numbers::pi) -
         static_cast<double>(snapshots) * lprime;
}

double ModelFit::log_likelihood(int snapshots) const {
  return nudoa::log_likelihood(lprime, snapshots, q_hat.size());
}

WhitenedPair whiten(const CMatrix& a, const HermitianMatrix& r_hat, const NoiseDiag& q) {
  require_dims(r_hat, q);
  if (a.rows() != r_hat.size()) {
    fail(ErrorKind::InvalidArgument, "steering matrix row count differs from sensor count");
  }
  const RVector inv_sqrt = q.vector().cwiseSqrt().cwiseInverse();
  WhitenedPair out;
  out.a_tilde = inv_sqrt.cast<Complex>().asDiagonal() * a;
  const CMatrix r = inv_sqrt.cast<Complex>().asDiagonal() * r_hat.matrix() *
                    inv_sqrt.cast<Complex>().asDiagonal();
  out.r_tilde = HermitianMatrix::symmetrize(r);
  return out;
}

HermitianMatrix estimate_signal_covariance(const WhitenedPair& pair) {
  CMatrix gram;
  const auto ldlt = factor_gram(pair.a_tilde, gram);
  const CMatrix inner = pair.a_tilde.adjoint() * pair.r_tilde.matrix() * pair.a_tilde;
  // G^{-1} H G^{-1} - G^{-1}, with G^{-1} applied through the factorization.
  const CMatrix left = ldlt.solve(inner);
  const CMatrix both = ldlt.solve(left.adjoint()).adjoint();
  const CMatrix ginv = ldlt.solve(CMatrix::Identity(gram.rows(), gram.cols()));
  return HermitianMatrix::symmetrize(both - ginv);
}

HermitianMatrix projector(const CMatrix& a_tilde) {
  if (a_tilde.cols() == 0) {
    return HermitianMatrix::symmetrize(CMatrix::Zero(a_tilde.rows(), a_tilde.rows()));
  }
  if (a_tilde.cols() >= a_tilde.rows() + 1) {
    fail(ErrorKind::Numeric, "projector: more columns than rows, rank deficient");
  }
  CMatrix gram;
  const auto ldlt = factor_gram(a_tilde, gram);
  return HermitianMatrix::symmetrize(a_tilde * ldlt.solve(a_tilde.adjoint()));
}

double concentrated_criterion(const ArrayGeometry& geometry, std::span<const double> psi_deg,
                              const NoiseDiag& q, const HermitianMatrix& r_hat) {
  require_dims(r_hat, q);
  const WhitenedPair pair = whiten(steering_matrix(geometry, psi_deg), r_hat, q);
  const auto nsrc = static_cast<Eigen::Index>(psi_deg.size());
  const Eigen::Index m = r_hat.size();
  const HermitianMatrix proj = projector(pair.a_tilde);
  const CMatrix residual = (CMatrix::Identity(m, m) - proj.matrix()) * pair.r_tilde.matrix();
  double value = q.log_det() + residual.trace().real() + static_cast<double>(nsrc);
  if (nsrc > 0) {
    const CMatrix gram = pair.a_tilde.adjoint() * pair.a_tilde;
    const CMatrix inner = pair.a_tilde.adjoint() * pair.r_tilde.matrix() * pair.a_tilde;
    // det[H G^{-1}] = det H / det G; both are Hermitian positive definite
    // when the whitened covariance is positive definite on range(A~).
    const auto ld_inner = try_log_det_pd(inner);
    if (!ld_inner) {
      fail(ErrorKind::Numeric,
           "concentrated criterion: nonpositive determinant (too few snapshots or collinear "
           "steering vectors)");
    }
    value += *ld_inner - log_det_pd(gram, "A~^H A~");
  }
  return value;
}

double lprime_of_model(const HermitianMatrix& r_model, const HermitianMatrix& r_hat) {
  if (r_model.size() != r_hat.size()) {
    fail(ErrorKind::InvalidArgument, "model and sample covariance sizes differ");
  }
  const double log_det = log_det_pd(r_model.matrix(), "model covariance");
  const double trace = r_model.matrix().ldlt().solve(r_hat.matrix()).trace().real();
  return log_det + trace;
}

HermitianMatrix reconstruct_covariance(const ArrayGeometry& geometry,
                                       std::span<const double> psi_deg, const CMatrix& p,
                                       const NoiseDiag& q) {
  if (q.size() != geometry.sensors()) {
    fail(ErrorKind::InvalidArgument, "noise diagonal size differs from sensor count");
  }
  if (p.rows() != static_cast<Eigen::Index>(psi_deg.size()) || p.cols() != p.rows()) {
    fail(ErrorKind::InvalidArgument, "signal covariance dimension differs from source count");
  }
  if (psi_deg.empty()) {
    return HermitianMatrix::symmetrize(q.matrix());
  }
  const CMatrix a = steering_matrix(geometry, psi_deg);
  return HermitianMatrix::symmetrize(a * p * a.adjoint() + q.matrix());
}

HermitianMatrix reconstruct_covariance(const CMatrix& b, const NoiseDiag& q) {
  if (b.rows() != q.size()) {
    fail(ErrorKind::InvalidArgument, "factor row count differs from noise diagonal size");
  }
  return HermitianMatrix::symmetrize(b * b.adjoint() + q.matrix());
}

double lprime_full(const ArrayGeometry& geometry, std::span<const double> psi_deg,
                   const CMatrix& p, const NoiseDiag& q, const HermitianMatrix& r_hat) {
  require_dims(r_hat, q);
  return lprime_of_model(reconstruct_covariance(geometry, psi_deg, p, q), r_hat);
}

ZeroSourceFit zero_source_fit(const HermitianMatrix& r_hat) {
  const Eigen::Index m = r_hat.size();
  std::vector<double> powers(static_cast<std::size_t>(m));
  double lprime = static_cast<double>(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double d = r_hat(i, i).real();
    if (!(d > 0.0) || !std::isfinite(d)) {
      fail(ErrorKind::Data, "zero-source fit: nonpositive diagonal entry at sensor " +
                                std::to_string(i));
    }
    powers[static_cast<std::size_t>(i)] = d;
    lprime += std::log(d);
  }
  return {NoiseDiag(std::move(powers)), lprime};
}

}  // namespace nudoa
