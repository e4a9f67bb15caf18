#pragma once

// Closed-form evaluation of the analytic quantities the estimators are
// checked against: the KL upper bound on gamma and its exact d = 2 limit, the
// wedge-rate bounds, the small-eps limit of lambda_1, the Gaussian high-SNR
// bound, and the binary-symmetric-channel toolkit.
//
// All logarithms are natural. Asymptotic o(1) terms are always dropped from
// returned values; comparisons against Monte Carlo use explicit tolerances in
// the tests. A bound that diverges to -inf is reported as an empty optional,
// never as a floating-point infinity.

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "filterstab/model.hpp"
#include "filterstab/noise.hpp"

namespace filterstab {

namespace detail {

// -sum_i mu_i min_{j != i} D(g_i || g_j); empty when some state has only
// divergent alternatives (the bound is -inf).
inline std::optional<double> kl_min_sum(const HmmSpec &spec) {
  const SimplexVector mu = stationary_distribution(spec.base_transitions());
  const NoiseModel &noise = spec.noise();
  double total = 0.0;
  for (std::size_t i = 0; i < spec.dim(); ++i) {
    std::optional<double> best;
    for (std::size_t j = 0; j < spec.dim(); ++j) {
      if (j == i) continue;
      const auto kl = noise.kl_divergence(i, j);
      if (kl && (!best || *kl < *best)) best = *kl;
    }
    if (!best) return std::nullopt;
    total += mu[i] * *best;
  }
  return -total;
}

} // namespace detail

// Upper bound -sum_i mu_i min_{j != i} D(g_i || g_j) (o(1) dropped).
inline std::optional<double> theorem1_upper_bound(const HmmSpec &spec) {
  return detail::kl_min_sum(spec);
}

// Exact d = 2 limit -mu_1 D(g_1||g_2) - mu_2 D(g_2||g_1); for d = 2 the min
// over the single alternative makes this the same accumulation as the bound.
inline std::optional<double> theorem1_exact_d2(const HmmSpec &spec) {
  if (spec.dim() != 2) throw WrongDimension("theorem1_exact_d2 requires d = 2");
  return detail::kl_min_sum(spec);
}

// sum_i mu_i max_{k != m} int g_i log(g_m g_k) dphi (o(1) dropped); pairs are
// enumerated unordered since the integrand is symmetric in (k, m).
inline std::optional<double> lemma2_upper_bound(const HmmSpec &spec) {
  const SimplexVector mu = stationary_distribution(spec.base_transitions());
  const NoiseModel &noise = spec.noise();
  double total = 0.0;
  for (std::size_t i = 0; i < spec.dim(); ++i) {
    std::optional<double> best;
    for (std::size_t k = 0; k < spec.dim(); ++k)
      for (std::size_t m = k + 1; m < spec.dim(); ++m) {
        const auto a = noise.cross_entropy_integral(i, k);
        const auto b = noise.cross_entropy_integral(i, m);
        if (!a || !b) continue; // pair diverges to -inf, loses the max
        const double v = *a + *b;
        if (!best || v > *best) best = v;
      }
    if (!best) return std::nullopt;
    total += mu[i] * *best;
  }
  return total;
}

// Exact d = 2 wedge rate at a given eps:
//   log(1 - eps l_12 - eps l_21) + sum_i mu_i int g_i log(g_1 g_2) dphi.
inline std::optional<double> lemma2_exact_d2(const HmmSpec &spec, double eps) {
  if (spec.dim() != 2) throw WrongDimension("lemma2_exact_d2 requires d = 2");
  if (eps < 0.0) throw EpsOutOfRange("eps must be nonnegative");
  const double det = 1.0 - eps * spec.base_transitions()(0, 1) - eps * spec.base_transitions()(1, 0);
  if (det <= 0.0)
    throw EpsOutOfRange("eps " + std::to_string(eps) + " gives nonpositive 1 - eps(l12 + l21)");
  const SimplexVector mu = stationary_distribution(spec.base_transitions());
  const NoiseModel &noise = spec.noise();
  double total = std::log(det);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto a = noise.cross_entropy_integral(i, 0);
    const auto b = noise.cross_entropy_integral(i, 1);
    if (!a || !b) return std::nullopt;
    total += mu[i] * (*a + *b);
  }
  return total;
}

// Small-eps limit of lambda_1: sum_i mu_i int g_i log g_i dphi.
inline double lambda1_limit(const HmmSpec &spec) {
  const SimplexVector mu = stationary_distribution(spec.base_transitions());
  double total = 0.0;
  for (std::size_t i = 0; i < spec.dim(); ++i)
    total += mu[i] * *spec.noise().cross_entropy_integral(i, i);
  return total;
}

// High-SNR Gaussian bound constant: -1/2 sum_i mu_i min_{j != i} (h_i - h_j)^2.
inline double az_gaussian_bound(const HmmSpec &spec) {
  const auto *g = std::get_if<GaussianEmission>(&spec.noise().variant());
  if (!g) throw NotGaussian("az_gaussian_bound requires a Gaussian noise model");
  const SimplexVector mu = stationary_distribution(spec.base_transitions());
  double total = 0.0;
  for (std::size_t i = 0; i < spec.dim(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < spec.dim(); ++j) {
      if (j == i) continue;
      const double gap = g->means[i] - g->means[j];
      best = std::min(best, gap * gap);
    }
    total += mu[i] * best;
  }
  return -0.5 * total;
}

// Coarse symmetric d = 2 bound log(1 - 2 eps lambda).
inline double coarse_upper_bound_d2(double eps, double lambda) {
  if (eps < 0.0) throw EpsOutOfRange("eps must be nonnegative");
  if (2.0 * eps * lambda >= 1.0)
    throw EpsOutOfRange("2 eps lambda >= 1: the coarse bound diverges");
  return std::log(1.0 - 2.0 * eps * lambda);
}

// Binary entropy in nats with the 0 log 0 = 0 convention.
inline double binary_entropy(double x) {
  if (x < 0.0 || x > 1.0) throw POutOfRange("binary_entropy: argument outside [0,1]");
  double h = 0.0;
  if (x > 0.0) h -= x * std::log(x);
  if (x < 1.0) h -= (1.0 - x) * std::log(1.0 - x);
  return h;
}

struct BscQuantities {
  double d_p; // D_p = p log(p/(1-p)) + (1-p) log((1-p)/p)
  double h_p; // binary entropy h(p)
};

inline BscQuantities bsc_quantities(double p) {
  if (!(p > 0.0 && p < 0.5)) throw POutOfRange("bsc_quantities: p must lie in (0, 1/2)");
  const double d_p = p * std::log(p / (1.0 - p)) + (1.0 - p) * std::log((1.0 - p) / p);
  return {d_p, binary_entropy(p)};
}

// H(p, q) = h((1-p) q + p (1-q)).
inline double bsc_H(double p, double q) {
  if (p < 0.0 || p > 1.0 || q < 0.0 || q > 1.0)
    throw POutOfRange("bsc_H: arguments outside [0,1]");
  return binary_entropy((1.0 - p) * q + p * (1.0 - q));
}

// Two-term lower bound on gamma(eps) for the BSC (the o(1) factor dropped):
//   -D_p + (4 lambda (log 2 - h(p)) / D_p) eps log(1/eps).
inline double bsc_lower_bound_curve(double p, double lambda, double eps) {
  const BscQuantities q = bsc_quantities(p);
  if (!(eps > 0.0 && eps < 1.0)) throw EpsOutOfRange("bsc_lower_bound_curve: eps must lie in (0,1)");
  const double correction =
      4.0 * lambda * (std::log(2.0) - q.h_p) / q.d_p * eps * std::log(1.0 / eps);
  return -q.d_p + correction;
}

// Misclassification asymptotic (lambda / D_p) eps log(1/eps).
inline double kz_asymptotic(double p, double lambda, double eps) {
  if (!(p > 0.0 && p < 1.0) || p == 0.5)
    throw POutOfRange("kz_asymptotic: p must lie in (0,1) and differ from 1/2");
  if (!(eps > 0.0 && eps < 1.0)) throw EpsOutOfRange("kz_asymptotic: eps must lie in (0,1)");
  const double d_p = p * std::log(p / (1.0 - p)) + (1.0 - p) * std::log((1.0 - p) / p);
  return lambda / d_p * eps * std::log(1.0 / eps);
}

struct BoundReport {
  std::optional<double> theorem1_bound;  // empty: bound is -inf
  std::optional<double> d2_exact_limit;  // d = 2 only
  std::optional<double> lemma2_bound;    // empty: bound is -inf
  std::optional<double> lemma2_exact_d2; // d = 2 only, at the spec's eps
  double lambda1_limit = 0.0;
  std::optional<double> coarse_d2_bound; // symmetric d = 2 only, at the spec's eps
};

inline BoundReport bound_report(const HmmSpec &spec) {
  BoundReport rep;
  rep.theorem1_bound = theorem1_upper_bound(spec);
  rep.lemma2_bound = lemma2_upper_bound(spec);
  rep.lambda1_limit = lambda1_limit(spec);
  if (spec.dim() == 2) {
    rep.d2_exact_limit = theorem1_exact_d2(spec);
    try {
      rep.lemma2_exact_d2 = lemma2_exact_d2(spec, spec.eps());
    } catch (const EpsOutOfRange &) {
    }
    const double l01 = spec.base_transitions()(0, 1);
    const double l10 = spec.base_transitions()(1, 0);
    if (std::abs(l01 - l10) <= 1e-12 && 2.0 * spec.eps() * l01 < 1.0)
      rep.coarse_d2_bound = coarse_upper_bound_d2(spec.eps(), l01);
  }
  return rep;
}

// Unwraps a divergence-flagged bound where a numeric value is required.
inline double require_finite(const std::optional<double> &value, const std::string &what) {
  if (!value) throw DivergentEntropy(what + " diverges to -inf");
  return *value;
}

} // namespace filterstab
