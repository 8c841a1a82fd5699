#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "nudoa/array_model.hpp"
#include "nudoa/likelihood.hpp"

namespace nudoa {

enum class DoaMethod { Sml, Dml };

DoaMethod parse_doa_method(std::string_view name);
const char* to_string(DoaMethod method) noexcept;

struct SearchOptions {
  double coarse_step_deg = 0.1;
  double refine_tol_deg = 0.01;
  int max_cycles = 20;
  double lower_deg = -90.0;  // exclusive
  double upper_deg = 90.0;   // exclusive
  /// Half-width of the window around already placed sources that the
  /// sequential initialization skips.
  double exclusion_deg = 0.5;

  void validate() const;
};

struct DoaResult {
  std::vector<double> psi_hat_deg;  // ascending
  double criterion_value = 0.0;
  int cycles = 0;
  DoaMethod method = DoaMethod::Sml;
  ModelFit fit;
  /// Criterion after initialization, then after every refinement cycle.
  std::vector<double> cycle_values;
};

/// Stochastic concentrated criterion; `include_log_det_q = false` drops the
/// angle-independent ln det Q term.
double sml_criterion(const ArrayGeometry& geometry, std::span<const double> psi_deg,
                     const NoiseDiag& q_hat, const HermitianMatrix& r_hat,
                     bool include_log_det_q = true);

/// Deterministic criterion tr[(I - P_A~) R~] in the Q-whitened domain.
double dml_criterion(const ArrayGeometry& geometry, std::span<const double> psi_deg,
                     const NoiseDiag& q_hat, const HermitianMatrix& r_hat);

/// Criterion evaluator used inside the search. Works on q x q reductions of
/// the whitened problem and returns +inf instead of throwing when the
/// angles are degenerate or out of range.
class CriterionEvaluator {
 public:
  CriterionEvaluator(const ArrayGeometry& geometry, const HermitianMatrix& r_hat,
                     const NoiseDiag& q_hat, DoaMethod method);

  double operator()(std::span<const double> psi_deg) const;

 private:
  std::vector<double> positions_;
  RVector inv_sqrt_noise_;
  CMatrix r_tilde_;
  double log_det_q_;
  DoaMethod method_;
};

/// Alternating one-angle-at-a-time minimization (AM for SML, AP for DML).
///
/// Sources are placed one by one with a coarse scan over the bounds; then
/// each angle is re-optimized in turn (coarse scan of +-2 steps, re-centred
/// while the best point is on the window edge, then
/// golden-section refinement). With two or more sources each cycle ends with a
/// line search along the cycle's net displacement, accepted only if it lowers
/// the criterion. Cycles stop once no angle moves by more than refine_tol_deg
/// or max_cycles is reached.
DoaResult estimate_doa(const ArrayGeometry& geometry, const HermitianMatrix& r_hat, int q,
                       const NoiseDiag& q_hat, DoaMethod method, const SearchOptions& opts = {});

}  // namespace nudoa
