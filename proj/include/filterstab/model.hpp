#pragma once

// Finite-state Markov chain models: validated transition matrices, stationary
// distributions, ergodicity (primitivity) checks, the slow-chain transform
// lambda^eps, and the assembled hidden Markov model specification.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "filterstab/errors.hpp"
#include "filterstab/matrix.hpp"
#include "filterstab/noise.hpp"

namespace filterstab {

// Point of the probability simplex; entries >= 0 summing to 1 within 1e-12.
class SimplexVector {
public:
  static SimplexVector validated(std::vector<double> entries, double tol = 1e-12) {
    double sum = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i] < 0.0)
        throw NegativeEntry("simplex vector: negative entry at " + std::to_string(i));
      sum += entries[i];
    }
    if (entries.empty() || std::abs(sum - 1.0) > tol)
      throw Error("simplex vector: entries sum to " + std::to_string(sum));
    return SimplexVector(std::move(entries));
  }

  // No validation; caller guarantees the invariant (hot paths, exact cases).
  static SimplexVector unchecked(std::vector<double> entries) {
    return SimplexVector(std::move(entries));
  }

  static SimplexVector uniform(std::size_t d) {
    return SimplexVector(std::vector<double>(d, 1.0 / static_cast<double>(d)));
  }

  static SimplexVector point_mass(std::size_t d, std::size_t i) {
    std::vector<double> e(d, 0.0);
    e.at(i) = 1.0;
    return SimplexVector(std::move(e));
  }

  std::size_t dim() const { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<double> &entries() const { return entries_; }
  std::span<const double> span() const { return entries_; }

  friend bool operator==(const SimplexVector &, const SimplexVector &) = default;

private:
  explicit SimplexVector(std::vector<double> e) : entries_(std::move(e)) {}
  std::vector<double> entries_;
};

class TransitionMatrix {
public:
  // Validates entries in [0,1] and unit row sums (tolerance 1e-12); rows
  // within tolerance are renormalized, anything worse is rejected.
  static TransitionMatrix validated(Matrix rows) {
    if (!rows.square() || rows.rows() < 2)
      throw Error("transition matrix must be square with d >= 2");
    NoiseModel::validate_stochastic_rows(rows, "transition matrix");
    return TransitionMatrix(std::move(rows));
  }

  std::size_t dim() const { return rows_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return rows_(i, j); }
  const Matrix &rows() const { return rows_; }
  std::span<const double> row(std::size_t i) const { return rows_.row(i); }

  friend bool operator==(const TransitionMatrix &, const TransitionMatrix &) = default;

private:
  explicit TransitionMatrix(Matrix m) : rows_(std::move(m)) {}
  Matrix rows_;
};

inline TransitionMatrix validate_transition_matrix(Matrix rows) {
  return TransitionMatrix::validated(std::move(rows));
}

// Largest admissible slow-chain parameter: 1 / max_i sum_{l != i} lambda_il.
inline double max_eps(const TransitionMatrix &base) {
  double worst = 0.0;
  for (std::size_t i = 0; i < base.dim(); ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < base.dim(); ++j)
      if (j != i) off += base(i, j);
    worst = std::max(worst, off);
  }
  return worst == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / worst;
}

// lambda^eps: off-diagonal entries eps*lambda_ij, diagonal 1 - eps * (row sum
// of the off-diagonal part). eps = 0 freezes the chain.
inline TransitionMatrix slow_chain(const TransitionMatrix &base, double eps) {
  const std::size_t d = base.dim();
  if (eps < 0.0) throw EpsOutOfRange("eps must be nonnegative");
  Matrix out(d, d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (j == i) continue;
      out(i, j) = eps * base(i, j);
      off += eps * base(i, j);
    }
    const double diag = 1.0 - off;
    if (diag < 0.0)
      throw EpsOutOfRange("eps " + std::to_string(eps) + " makes diagonal of row " +
                          std::to_string(i) + " negative (max eps " +
                          std::to_string(max_eps(base)) + ")");
    out(i, i) = diag;
  }
  return TransitionMatrix::validated(std::move(out));
}

// True iff some power Lambda^q, q <= q_max, has all entries positive.
// Default q_max is Wielandt's primitivity bound d^2 - 2d + 2.
inline bool is_ergodic(const TransitionMatrix &lam, long q_max = -1) {
  const std::size_t d = lam.dim();
  if (q_max < 0) q_max = static_cast<long>(d * d - 2 * d + 2);
  if (q_max < 1) throw Error("is_ergodic: q_max must be >= 1");
  std::vector<std::uint8_t> base(d * d), pow(d * d), next(d * d);
  for (std::size_t i = 0; i < d * d; ++i)
    base[i] = lam.rows().data()[i] > 0.0 ? 1 : 0;
  pow = base;
  auto all_positive = [&](const std::vector<std::uint8_t> &m) {
    for (auto v : m)
      if (!v) return false;
    return true;
  };
  for (long q = 1; q <= q_max; ++q) {
    if (all_positive(pow)) return true;
    // pow <- base * pow (boolean)
    std::fill(next.begin(), next.end(), 0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k)
        if (base[i * d + k])
          for (std::size_t j = 0; j < d; ++j) next[i * d + j] |= pow[k * d + j];
    pow.swap(next);
  }
  return false;
}

namespace detail {

inline std::optional<std::vector<double>> stationary_by_power_iteration(
    const TransitionMatrix &lam, double tol = 1e-13, std::size_t max_iter = 1000000) {
  const std::size_t d = lam.dim();
  std::vector<double> mu(d, 1.0 / static_cast<double>(d)), next(d, 0.0);
  for (std::size_t it = 0; it < max_iter; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      const double mi = mu[i];
      for (std::size_t j = 0; j < d; ++j) next[j] += mi * lam(i, j);
    }
    const double norm = l1_norm(next);
    for (double &v : next) v /= norm;
    double diff = 0.0;
    for (std::size_t j = 0; j < d; ++j) diff = std::max(diff, std::abs(next[j] - mu[j]));
    mu.swap(next);
    if (diff < tol) return mu;
  }
  return std::nullopt;
}

inline double stationarity_residual(const TransitionMatrix &lam, std::span<const double> mu) {
  double worst = 0.0;
  for (std::size_t j = 0; j < lam.dim(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < lam.dim(); ++i) s += mu[i] * lam(i, j);
    worst = std::max(worst, std::abs(s - mu[j]));
  }
  return worst;
}

} // namespace detail

// Unique mu with mu^T Lambda = mu^T, by a dense solve of (Lambda^T - I) with
// the normalization row appended; power iteration as fallback.
inline SimplexVector stationary_distribution(const TransitionMatrix &lam) {
  const std::size_t d = lam.dim();
  Matrix a(d, d, 0.0);
  for (std::size_t i = 0; i + 1 < d; ++i)
    for (std::size_t j = 0; j < d; ++j) a(i, j) = lam(j, i) - (i == j ? 1.0 : 0.0);
  for (std::size_t j = 0; j < d; ++j) a(d - 1, j) = 1.0;
  std::vector<double> b(d, 0.0);
  b[d - 1] = 1.0;

  auto acceptable = [&](const std::vector<double> &mu) {
    for (double v : mu)
      if (v < -1e-12) return false;
    return detail::stationarity_residual(lam, mu) <= 1e-10;
  };

  auto solved = solve_linear(std::move(a), std::move(b));
  if (!solved || !acceptable(*solved)) {
    solved = detail::stationary_by_power_iteration(lam);
    if (!solved || !acceptable(*solved))
      throw NotErgodic("stationary distribution is not unique or does not exist");
  }
  std::vector<double> mu = *solved;
  double sum = 0.0;
  for (double &v : mu) {
    v = std::max(v, 0.0);
    sum += v;
  }
  for (double &v : mu) v /= sum;
  return SimplexVector::validated(std::move(mu));
}

// Full model: state labels, base transition matrix, noise family, and the
// slow-chain parameter. Immutable after construction.
class HmmSpec {
public:
  HmmSpec(std::vector<double> states, TransitionMatrix base, NoiseModel noise, double eps)
      : states_(std::move(states)),
        base_(std::move(base)),
        noise_(std::move(noise)),
        eps_(eps),
        transitions_eps_(slow_chain(base_, eps)) {
    if (states_.size() != base_.dim())
      throw WrongDimension("state labels and transition matrix disagree");
    if (noise_.state_count() != base_.dim())
      throw WrongDimension("noise model and transition matrix disagree");
  }

  std::size_t dim() const { return base_.dim(); }
  const std::vector<double> &states() const { return states_; }
  const TransitionMatrix &base_transitions() const { return base_; }
  const NoiseModel &noise() const { return noise_; }
  double eps() const { return eps_; }
  // The slow chain lambda^eps actually driving the signal.
  const TransitionMatrix &transitions_eps() const { return transitions_eps_; }

  HmmSpec with_eps(double eps) const { return HmmSpec(states_, base_, noise_, eps); }

private:
  std::vector<double> states_;
  TransitionMatrix base_;
  NoiseModel noise_;
  double eps_;
  TransitionMatrix transitions_eps_;
};

} // namespace filterstab
