#include "nudoa/doa_est.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/QR>

#include "nudoa/error.hpp"

namespace nudoa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxGramCondition = 1e12;

struct Candidate {
  double angle;
  double value;
};

// Golden-section minimization of f over [lo, hi] down to width tol.
template <class F>
Candidate golden_section(F&& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? Candidate{c, fc} : Candidate{d, fd};
}

}  // namespace

DoaMethod parse_doa_method(std::string_view name) {
  if (name == "sml") return DoaMethod::Sml;
  if (name == "dml") return DoaMethod::Dml;
  fail(ErrorKind::Config, "unknown DOA method '" + std::string(name) + "'");
}

const char* to_string(DoaMethod method) noexcept {
  return method == DoaMethod::Sml ? "sml" : "dml";
}

void SearchOptions::validate() const {
  if (!(coarse_step_deg > 0.0)) fail(ErrorKind::Config, "coarse_step_deg must be > 0");
  if (!(refine_tol_deg > 0.0) || !(refine_tol_deg < coarse_step_deg)) {
    fail(ErrorKind::Config, "refine_tol_deg must lie in (0, coarse_step_deg)");
  }
  if (max_cycles < 1) fail(ErrorKind::Config, "max_cycles must be >= 1");
  if (!(lower_deg >= -90.0) || !(upper_deg <= 90.0) || !(lower_deg < upper_deg)) {
    fail(ErrorKind::Config, "angle bounds must satisfy -90 <= lower < upper <= 90");
  }
  if (!(exclusion_deg >= 0.0)) fail(ErrorKind::Config, "exclusion_deg must be >= 0");
}

double sml_criterion(const ArrayGeometry& geometry, std::span<const double> psi_deg,
                     const NoiseDiag& q_hat, const HermitianMatrix& r_hat,
                     bool include_log_det_q) {
  const double value = concentrated_criterion(geometry, psi_deg, q_hat, r_hat);
  return include_log_det_q ? value : value - q_hat.log_det();
}

double dml_criterion(const ArrayGeometry& geometry, std::span<const double> psi_deg,
                     const NoiseDiag& q_hat, const HermitianMatrix& r_hat) {
  const WhitenedPair pair = whiten(steering_matrix(geometry, psi_deg), r_hat, q_hat);
  const Eigen::Index m = r_hat.size();
  const HermitianMatrix proj = projector(pair.a_tilde);
  return ((CMatrix::Identity(m, m) - proj.matrix()) * pair.r_tilde.matrix()).trace().real();
}

CriterionEvaluator::CriterionEvaluator(const ArrayGeometry& geometry,
                                       const HermitianMatrix& r_hat, const NoiseDiag& q_hat,
                                       DoaMethod method)
    : positions_(geometry.positions().begin(), geometry.positions().end()),
      inv_sqrt_noise_(q_hat.vector().cwiseSqrt().cwiseInverse()),
      log_det_q_(q_hat.log_det()),
      method_(method) {
  if (r_hat.size() != geometry.sensors() || q_hat.size() != geometry.sensors()) {
    fail(ErrorKind::InvalidArgument, "covariance, noise and geometry sizes differ");
  }
  const auto d = inv_sqrt_noise_.cast<Complex>().asDiagonal();
  r_tilde_ = d * r_hat.matrix() * d;
  r_tilde_ = (r_tilde_ + r_tilde_.adjoint()).eval() * 0.5;
}

double CriterionEvaluator::operator()(std::span<const double> psi_deg) const {
  const auto m = static_cast<Eigen::Index>(positions_.size());
  const auto q = static_cast<Eigen::Index>(psi_deg.size());
  if (q == 0 || q >= m) return kInf;

  CMatrix a(m, q);
  for (Eigen::Index l = 0; l < q; ++l) {
    const double psi = psi_deg[static_cast<std::size_t>(l)];
    if (!(psi > -90.0 && psi < 90.0)) return kInf;
    // Same arithmetic as steering_matrix followed by whiten, so the guard
    // below agrees bit for bit with the one in estimate_signal_covariance.
    const double s = std::sin(deg_to_rad(psi));
    for (Eigen::Index i = 0; i < m; ++i) {
      a(i, l) = Complex(inv_sqrt_noise_(i), 0.0) *
                std::polar(1.0, std::numbers::pi * positions_[static_cast<std::size_t>(i)] * s);
    }
  }

  const CMatrix gram = a.adjoint() * a;
  if (hermitian_condition(gram) > kMaxGramCondition) return kInf;

  // With an orthonormal basis [U V] adapted to span(A~):
  //   ln det H - ln det G = ln det(U^H R~ U),  tr R~ - tr(G^-1 H) = tr(V^H R~ V).
  // Both sides avoid G^-1, which matters when Q has tiny entries and R~ is huge.
  const Eigen::HouseholderQR<CMatrix> qr(a);
  const CMatrix basis = qr.householderQ();
  const auto u = basis.leftCols(q);
  const auto v = basis.rightCols(m - q);
  const double residual = (v.adjoint() * r_tilde_ * v).trace().real();
  if (method_ == DoaMethod::Dml) return residual;

  const CMatrix inner = u.adjoint() * r_tilde_ * u;
  const auto log_det_inner = try_log_det_pd((inner + inner.adjoint()) * 0.5);
  if (!log_det_inner) return kInf;
  return log_det_q_ + *log_det_inner + residual + static_cast<double>(q);
}

DoaResult estimate_doa(const ArrayGeometry& geometry, const HermitianMatrix& r_hat, int q,
                       const NoiseDiag& q_hat, DoaMethod method, const SearchOptions& opts) {
  opts.validate();
  const int m = geometry.sensors();
  if (q < 1 || q >= m) {
    fail(ErrorKind::Domain, "DOA estimation needs 1 <= q < M, got q = " + std::to_string(q));
  }
  const CriterionEvaluator criterion(geometry, r_hat, q_hat, method);
  const double step = opts.coarse_step_deg;
  const double lo = opts.lower_deg;
  const double hi = opts.upper_deg;

  std::vector<double> grid;
  for (long k = 1;; ++k) {
    const double g = lo + static_cast<double>(k) * step;
    if (g >= hi - 1e-12) break;
    grid.push_back(g);
  }

  std::vector<double> psi;
  psi.reserve(static_cast<std::size_t>(q));
  std::vector<double> trial;
  for (int l = 0; l < q; ++l) {
    Candidate best{0.0, kInf};
    trial = psi;
    trial.push_back(0.0);
    for (double g : grid) {
      const bool excluded = std::any_of(psi.begin(), psi.end(), [&](double p) {
        return std::abs(g - p) <= opts.exclusion_deg;
      });
      if (excluded) continue;
      trial.back() = g;
      const double v = criterion(trial);
      if (v < best.value) best = {g, v};
    }
    if (!std::isfinite(best.value)) {
      fail(ErrorKind::Numeric, "DOA criterion is non-finite over the whole search grid");
    }
    psi.push_back(best.angle);
  }

  DoaResult result;
  result.method = method;
  double current = criterion(psi);
  result.cycle_values.push_back(current);

  for (int cycle = 1; cycle <= opts.max_cycles; ++cycle) {
    double max_move = 0.0;
    const std::vector<double> cycle_start = psi;
    for (int l = 0; l < q; ++l) {
      const auto li = static_cast<std::size_t>(l);
      trial = psi;
      auto at = [&](double angle) {
        trial[li] = angle;
        return criterion(trial);
      };
      const double center = psi[li];
      // The +-2 step window is re-centred while its best point sits on the
      // window edge, so one angle update reaches the 1-D local minimum.
      Candidate local{center, current};
      for (;;) {
        const double c = local.angle;
        for (int k = -2; k <= 2; ++k) {
          if (k == 0) continue;
          const double g = c + k * step;
          if (g <= lo || g >= hi) continue;
          const double v = at(g);
          if (v < local.value) local = {g, v};
        }
        if (std::abs(local.angle - c) < 1.5 * step) break;
      }
      const double a = std::max(local.angle - step, lo + 1e-9);
      const double b = std::min(local.angle + step, hi - 1e-9);
      const Candidate refined = golden_section(at, a, b, opts.refine_tol_deg);
      if (refined.value < local.value) local = refined;
      if (local.value < current) {
        max_move = std::max(max_move, std::abs(local.angle - center));
        psi[li] = local.angle;
        current = local.value;
      }
    }
    // Pattern move along the net displacement of this cycle. Coupled angles
    // otherwise zigzag down a narrow valley in sub-tolerance steps.
    if (q >= 2) {
      std::vector<double> dir(psi.size());
      double norm = 0.0;
      for (std::size_t i = 0; i < psi.size(); ++i) {
        dir[i] = psi[i] - cycle_start[i];
        norm = std::max(norm, std::abs(dir[i]));
      }
      if (norm > 0.0) {
        auto along = [&](double t) {
          for (std::size_t i = 0; i < psi.size(); ++i) trial[i] = psi[i] + t * dir[i];
          return criterion(trial);
        };
        trial = psi;
        double t_hi = 1.0;
        double prev = current;
        for (double v = along(t_hi); v < prev && t_hi * norm < 90.0; v = along(t_hi)) {
          prev = v;
          t_hi *= 2.0;
        }
        if (t_hi > 1.0) {
          const Candidate best = golden_section(along, 0.0, t_hi, opts.refine_tol_deg / (10.0 * norm));
          if (best.value < current) {
            max_move = std::max(max_move, best.angle * norm);
            for (std::size_t i = 0; i < psi.size(); ++i) psi[i] += best.angle * dir[i];
            current = best.value;
          }
        }
      }
    }
    result.cycle_values.push_back(current);
    result.cycles = cycle;
    if (max_move <= opts.refine_tol_deg) break;
  }

  // The fit is evaluated in search order, where the criterion guard already
  // accepted the gram matrix, then permuted to ascending angles.
  const WhitenedPair pair = whiten(steering_matrix(geometry, psi), r_hat, q_hat);
  const CMatrix p_search = estimate_signal_covariance(pair).matrix();
  const double lprime = method == DoaMethod::Sml
                            ? current
                            : CriterionEvaluator(geometry, r_hat, q_hat, DoaMethod::Sml)(psi);
  std::vector<int> order(static_cast<std::size_t>(q));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    return psi[static_cast<std::size_t>(x)] < psi[static_cast<std::size_t>(y)];
  });
  std::vector<double> sorted(static_cast<std::size_t>(q));
  CMatrix p_hat(q, q);
  for (int i = 0; i < q; ++i) {
    sorted[static_cast<std::size_t>(i)] = psi[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    for (int j = 0; j < q; ++j) {
      p_hat(i, j) = p_search(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
  }

  result.psi_hat_deg = sorted;
  result.criterion_value = current;
  result.fit.psi_hat_deg = sorted;
  result.fit.q_hat = q_hat;
  result.fit.p_hat = p_hat;
  result.fit.lprime = lprime;
  return result;
}

}  // namespace nudoa
