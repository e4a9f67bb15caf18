#pragma once

// The three core recursions in normalized, underflow-safe form:
//
//   filter    pi_n = G(Y_n) L* pi_{n-1} / |G(Y_n) L* pi_{n-1}|
//   Zakai     log|rho_n| accumulated as the sum of the normalization factors
//   wedge     Q_n = G(Y_n) L* Q_{n-1} L G(Y_n), kept at unit entrywise-L1
//             norm with its own log accumulator
//
// plus the sandwich inequality linking |pi - pi_bar| to |Q|/(|rho||rho_bar|).
// All norms are L1 (sum of absolute entries; the wedge norm runs over all d^2
// entries).
//
// The wedge step writes only the upper triangle and mirrors it, so the state
// stays exactly antisymmetric. Conjugation preserves antisymmetry only in
// exact arithmetic: a spurious symmetric component injected by roundoff grows
// at rate lambda_1 - lambda_2 and takes over the recursion within a few
// hundred steps if it is not projected out.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "filterstab/matrix.hpp"
#include "filterstab/model.hpp"
#include "filterstab/noise.hpp"

namespace filterstab {

// One-step predictor L^{eps*} pi.
inline SimplexVector predict(const TransitionMatrix &lam_eps, const SimplexVector &pi) {
  if (lam_eps.dim() != pi.dim()) throw WrongDimension("predict: dimension mismatch");
  return SimplexVector::unchecked(matvec_transposed(lam_eps.rows(), pi.span()));
}

class FilterState {
public:
  explicit FilterState(const SimplexVector &nu)
      : pi_(nu.entries()), pred_(nu.dim(), 0.0), dens_(nu.dim(), 0.0) {}

  const std::vector<double> &pi() const { return pi_; }
  SimplexVector pi_simplex() const { return SimplexVector::unchecked(pi_); }
  double log_norm() const { return log_norm_; }

  // Advances one step given precomputed densities g_i(y); returns the log
  // increment log|G(y) L* pi|.
  double step_with_densities(const TransitionMatrix &lam_eps, std::span<const double> dens) {
    const std::size_t d = pi_.size();
    for (std::size_t i = 0; i < d; ++i) pred_[i] = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double pj = pi_[j];
      const auto row = lam_eps.row(j);
      for (std::size_t i = 0; i < d; ++i) pred_[i] += row[i] * pj;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      pred_[i] *= dens[i];
      sum += pred_[i];
    }
    if (sum <= 0.0)
      throw ZeroLikelihood("filter step: |G(y) L* pi| = 0 (common-support assumption violated)");
    for (std::size_t i = 0; i < d; ++i) pi_[i] = pred_[i] / sum;
    const double inc = std::log(sum);
    log_norm_ += inc;
    return inc;
  }

  double step(const TransitionMatrix &lam_eps, const NoiseModel &noise, double y) {
    noise.densities(y, dens_);
    return step_with_densities(lam_eps, dens_);
  }

private:
  std::vector<double> pi_;
  std::vector<double> pred_;
  std::vector<double> dens_;
  double log_norm_ = 0.0;
};

inline double filter_step(const TransitionMatrix &lam_eps, const NoiseModel &noise,
                          FilterState &state, double y) {
  return state.step(lam_eps, noise, y);
}

inline double filter_distance_l1(const FilterState &a, const FilterState &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.pi().size(); ++i) s += std::abs(a.pi()[i] - b.pi()[i]);
  return s;
}

class WedgeState {
public:
  // Q_0 = nu ^ nu_bar = (nu nu_bar^T - nu_bar nu^T) / 2, normalized to unit
  // entrywise L1 with the pre-normalization norm moved into the accumulator.
  WedgeState(const SimplexVector &nu, const SimplexVector &nu_bar)
      : pi_(nu.dim(), nu.dim(), 0.0), tmp_(nu.dim(), nu.dim(), 0.0), dens_(nu.dim(), 0.0) {
    if (nu.dim() != nu_bar.dim()) throw WrongDimension("wedge: dimension mismatch");
    const std::size_t d = nu.dim();
    double norm = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) {
        const double v = 0.5 * (nu[i] * nu_bar[j] - nu_bar[i] * nu[j]);
        pi_(i, j) = v;
        pi_(j, i) = -v;
        norm += 2.0 * std::abs(v);
      }
    if (norm == 0.0) throw DegenerateWedge("wedge init: nu = nu_bar gives Q_0 = 0");
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) {
        pi_(i, j) /= norm;
        pi_(j, i) = -pi_(i, j);
      }
    log_norm_ = std::log(norm);
  }

  const Matrix &pi() const { return pi_; }
  double log_norm() const { return log_norm_; }

  // Q <- G(y) L* Q L G(y), renormalized; returns the log increment.
  double step_with_densities(const TransitionMatrix &lam_eps, std::span<const double> dens) {
    const std::size_t d = pi_.rows();
    const Matrix &lam = lam_eps.rows();
    // tmp = L* Q  (tmp_ij = sum_k lam_ki Q_kj)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) tmp_(i, j) = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const auto lam_row = lam.row(k);
      const auto q_row = pi_.row(k);
      for (std::size_t i = 0; i < d; ++i) {
        const double lki = lam_row[i];
        if (lki == 0.0) continue;
        for (std::size_t j = 0; j < d; ++j) tmp_(i, j) += lki * q_row[j];
      }
    }
    // upper triangle of G (tmp L) G, mirrored to keep exact antisymmetry
    double norm = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) {
        double u = 0.0;
        for (std::size_t l = 0; l < d; ++l) u += tmp_(i, l) * lam(l, j);
        const double v = dens[i] * dens[j] * u;
        pi_(i, j) = v;
        norm += 2.0 * std::abs(v);
      }
    if (norm == 0.0)
      throw ZeroLikelihood("wedge step: image is the zero matrix");
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) {
        pi_(i, j) /= norm;
        pi_(j, i) = -pi_(i, j);
      }
    const double inc = std::log(norm);
    log_norm_ += inc;
    return inc;
  }

  double step(const TransitionMatrix &lam_eps, const NoiseModel &noise, double y) {
    noise.densities(y, dens_);
    return step_with_densities(lam_eps, dens_);
  }

private:
  Matrix pi_;
  Matrix tmp_;
  std::vector<double> dens_;
  double log_norm_ = 0.0;
};

inline WedgeState wedge_init(const SimplexVector &nu, const SimplexVector &nu_bar) {
  return WedgeState(nu, nu_bar);
}

inline double wedge_step(const TransitionMatrix &lam_eps, const NoiseModel &noise,
                         WedgeState &state, double y) {
  return state.step(lam_eps, noise, y);
}

// wedge_ratio <= |pi - pi_bar|_1 <= 2 * wedge_ratio, with relative slack
// 1e-9. wedge_ratio = exp(wedge.log_norm - rho.log_norm - rho_bar.log_norm)
// from synchronized recursions. Both sides below 1e-250 count as coupled.
inline bool sandwich_check(const SimplexVector &pi, const SimplexVector &pi_bar,
                           double wedge_ratio) {
  double dist = 0.0;
  for (std::size_t i = 0; i < pi.dim(); ++i) dist += std::abs(pi[i] - pi_bar[i]);
  constexpr double kRel = 1e-9;
  constexpr double kCoupled = 1e-250;
  if (dist <= kCoupled && 2.0 * wedge_ratio <= kCoupled) return true;
  return wedge_ratio <= dist * (1.0 + kRel) && dist <= 2.0 * wedge_ratio * (1.0 + kRel);
}

} // namespace filterstab
