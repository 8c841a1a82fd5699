#include "nudoa/linalg.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "nudoa/error.hpp"

namespace nudoa {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Numeric: return "numeric error";
    case ErrorKind::Data: return "data error";
    case ErrorKind::Config: return "configuration error";
    case ErrorKind::Io: return "I/O error";
  }
  return "error";
}

HermitianMatrix::HermitianMatrix(const CMatrix& m) {
  if (m.rows() != m.cols()) {
    fail(ErrorKind::InvalidArgument, "Hermitian matrix must be square");
  }
  if (!m.allFinite()) {
    fail(ErrorKind::Data, "Hermitian matrix has non-finite entries");
  }
  const double scale = m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
  const double skew = m.size() == 0 ? 0.0 : (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (skew > 1e-12 * scale) {
    fail(ErrorKind::Data, "matrix is not Hermitian (skew " + std::to_string(skew) + ")");
  }
  data_ = (m + m.adjoint()) * 0.5;
}

HermitianMatrix HermitianMatrix::symmetrize(const CMatrix& m) {
  if (m.rows() != m.cols()) {
    fail(ErrorKind::InvalidArgument, "Hermitian matrix must be square");
  }
  HermitianMatrix h;
  h.data_ = (m + m.adjoint()) * 0.5;
  return h;
}

EigenPairs hermitian_eig_desc(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  if (es.info() != Eigen::Success) {
    fail(ErrorKind::Numeric, "Hermitian eigendecomposition did not converge");
  }
  EigenPairs out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

std::optional<double> try_log_det_pd(const CMatrix& m) {
  Eigen::LLT<CMatrix> llt(m);
  if (llt.info() == Eigen::Success) {
    const auto diag = llt.matrixLLT().diagonal().real();
    if ((diag.array() > 0.0).all()) {
      return 2.0 * diag.array().log().sum();
    }
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    return std::nullopt;
  }
  const RVector& ev = es.eigenvalues();
  const double largest = ev.maxCoeff();
  if (!(largest > 0.0) || ev.minCoeff() <= 1e-12 * largest) {
    return std::nullopt;
  }
  return ev.array().log().sum();
}

double log_det_pd(const CMatrix& m, std::string_view what) {
  if (auto v = try_log_det_pd(m)) {
    return *v;
  }
  fail(ErrorKind::Numeric, std::string(what) + " is not positive definite");
}

CMatrix psd_project(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es((m + m.adjoint()) * 0.5);
  if (es.info() != Eigen::Success) {
    fail(ErrorKind::Numeric, "Hermitian eigendecomposition did not converge");
  }
  const RVector clipped = es.eigenvalues().cwiseMax(0.0);
  CMatrix out = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
  return (out + out.adjoint()) * 0.5;
}

double hermitian_condition(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    return std::numeric_limits<double>::infinity();
  }
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) {
    return std::numeric_limits<double>::infinity();
  }
  return hi / lo;
}

}  // namespace nudoa
