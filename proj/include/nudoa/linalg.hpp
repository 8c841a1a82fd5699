#pragma once

#include <complex>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

namespace nudoa {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Square complex matrix that is Hermitian by construction.
///
/// The checked constructor accepts inputs whose anti-Hermitian part is at
/// most 1e-12 of the largest entry and then stores the exact Hermitian part,
/// so downstream eigen-solvers see a symmetric matrix bit for bit.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const CMatrix& m);

  /// (m + m^H) / 2 without a tolerance check.
  static HermitianMatrix symmetrize(const CMatrix& m);

  const CMatrix& matrix() const noexcept { return data_; }
  Eigen::Index size() const noexcept { return data_.rows(); }
  Complex operator()(Eigen::Index r, Eigen::Index c) const { return data_(r, c); }

 private:
  CMatrix data_;
};

/// Eigenpairs of a Hermitian matrix, eigenvalues in descending order.
struct EigenPairs {
  RVector values;
  CMatrix vectors;
};

EigenPairs hermitian_eig_desc(const CMatrix& m);

/// ln det of a Hermitian positive definite matrix.
///
/// Cholesky first; if that fails, falls back to the eigenvalues and rejects
/// the matrix when any eigenvalue is <= 1e-12 times the largest one.
std::optional<double> try_log_det_pd(const CMatrix& m);

/// Throwing variant of try_log_det_pd; `what` names the matrix in the message.
double log_det_pd(const CMatrix& m, std::string_view what);

/// Clips negative eigenvalues at zero and re-symmetrizes.
CMatrix psd_project(const CMatrix& m);

/// Largest over smallest eigenvalue of a Hermitian matrix; +inf when the
/// smallest eigenvalue is not positive.
double hermitian_condition(const CMatrix& m);

}  // namespace nudoa
