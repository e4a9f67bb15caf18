#pragma once

// Long-horizon Monte Carlo estimators of the exponential rates: lambda_1, the
// wedge rate lambda_1 + lambda_2, the stability index gamma (via the exact
// decomposition gamma = wedge rate - 2 lambda_1 on one shared trajectory),
// the entropy rate, the misclassification probability, and the concentration
// functional. Uncertainty comes from batch means over the post-burn-in
// increments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "filterstab/filter.hpp"
#include "filterstab/model.hpp"
#include "filterstab/sim.hpp"

namespace filterstab {

struct RateEstimate {
  double value = 0.0;     // per-step exponential rate, nats
  double std_error = 0.0; // batch-means standard error
  std::size_t n = 0;      // horizon used
  std::size_t burn_in = 0;
  std::uint64_t seed = 0;
  std::string method;
};

namespace detail {

inline void check_partition_shape(std::size_t length, std::size_t batches) {
  if (batches < 20) throw BadPartition("batch means needs >= 20 batches");
  if (length == 0 || length % batches != 0)
    throw BadPartition("sample count " + std::to_string(length) +
                       " is not divisible into " + std::to_string(batches) + " batches");
}

// Streams increments, discards the burn-in prefix, and folds the rest into
// equal batches.
class BatchAccumulator {
public:
  BatchAccumulator(std::size_t total, std::size_t burn_in, std::size_t batches)
      : burn_in_(burn_in), batches_(batches) {
    if (total <= burn_in) throw BadPartition("horizon does not exceed burn-in");
    check_partition_shape(total - burn_in, batches);
    batch_size_ = (total - burn_in) / batches;
    means_.reserve(batches);
  }

  void add(double v) {
    if (seen_++ < burn_in_) return;
    // Kahan-compensated batch sums; a criterion pins deterministic increment
    // sequences to 1e-13, which plain sequential summation does not reach.
    const double y = v - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
    if (++in_batch_ == batch_size_) {
      means_.push_back(sum_ / static_cast<double>(batch_size_));
      sum_ = 0.0;
      comp_ = 0.0;
      in_batch_ = 0;
    }
  }

  bool complete() const { return means_.size() == batches_; }

  double mean() const {
    double s = 0.0;
    for (double m : means_) s += m;
    return s / static_cast<double>(means_.size());
  }

  double std_error() const {
    // Bit-identical batch means have zero sample variance; skip the rounding
    // noise the mean subtraction would inject.
    bool all_equal = true;
    for (double v : means_)
      if (v != means_.front()) {
        all_equal = false;
        break;
      }
    if (all_equal) return 0.0;
    const double m = mean();
    double ss = 0.0;
    for (double v : means_) ss += (v - m) * (v - m);
    const double b = static_cast<double>(means_.size());
    return std::sqrt(ss / (b - 1.0) / b);
  }

  std::span<const double> batch_means() const { return means_; }

private:
  std::size_t burn_in_;
  std::size_t batches_;
  std::size_t batch_size_ = 0;
  std::size_t seen_ = 0;
  std::size_t in_batch_ = 0;
  double sum_ = 0.0;
  double comp_ = 0.0;
  std::vector<double> means_;
};

} // namespace detail

// Overall mean and batch-means standard error of a stored increment sequence.
inline std::pair<double, double> batch_means(std::span<const double> increments,
                                             std::size_t batches) {
  detail::check_partition_shape(increments.size(), batches);
  detail::BatchAccumulator acc(increments.size(), 0, batches);
  for (double v : increments) acc.add(v);
  return {acc.mean(), acc.std_error()};
}

struct EstimatorConfig {
  std::size_t n = 0;
  std::size_t burn_in = 0;
  std::size_t batches = 40;
  std::uint64_t seed = 0;
  std::optional<SimplexVector> nu;     // default: stationary mu
  std::optional<SimplexVector> nu_bar; // default: point mass at state 0

  // Horizon max(1e6, 100/eps) so a run sees >= 100 expected jumps; burn-in
  // max(1e4, 10/eps) so the chain mixes and the filter forgets nu. The
  // horizon is rounded up to make (n - burn_in) divisible into batches.
  static EstimatorConfig auto_for(const HmmSpec &spec, std::uint64_t seed,
                                  std::size_t batches = 40) {
    EstimatorConfig cfg;
    cfg.seed = seed;
    cfg.batches = batches;
    const double eps = spec.eps();
    if (eps > 0.0) {
      cfg.burn_in = std::max<std::size_t>(10000, 10 * static_cast<std::size_t>(std::ceil(1.0 / eps)));
      cfg.n = std::max<std::size_t>(1000000, static_cast<std::size_t>(std::ceil(100.0 / eps)));
    } else {
      cfg.burn_in = 10000;
      cfg.n = 1000000;
    }
    if (cfg.n <= cfg.burn_in) cfg.n = cfg.burn_in + batches;
    const std::size_t rem = (cfg.n - cfg.burn_in) % batches;
    if (rem != 0) cfg.n += batches - rem;
    return cfg;
  }

  void validate(const HmmSpec &spec) const {
    if (n <= burn_in) throw BadPartition("horizon does not exceed burn-in");
    detail::check_partition_shape(n - burn_in, batches);
    if (nu && nu->dim() != spec.dim()) throw WrongDimension("nu dimension mismatch");
    if (nu_bar && nu_bar->dim() != spec.dim()) throw WrongDimension("nu_bar dimension mismatch");
  }

  SimplexVector resolved_nu(const HmmSpec &spec) const {
    return nu ? *nu : stationary_distribution(spec.base_transitions());
  }
  SimplexVector resolved_nu_bar(const HmmSpec &spec) const {
    return nu_bar ? *nu_bar : SimplexVector::point_mass(spec.dim(), 0);
  }
};

namespace detail {

inline void require_positive_eps(const HmmSpec &spec) {
  // gamma(0) = 0 trivially and the stationary limits need eps > 0.
  if (!(spec.eps() > 0.0))
    throw EpsOutOfRange("rate estimators require eps > 0");
}

inline RateEstimate finish(const BatchAccumulator &acc, const EstimatorConfig &cfg,
                           std::string method) {
  return {acc.mean(), acc.std_error(), cfg.n, cfg.burn_in, cfg.seed, std::move(method)};
}

} // namespace detail

// Top Lyapunov exponent lambda_1 as the time average of the filter log-norm
// increments log|G(Y_k) L* pi_{k-1}|.
inline RateEstimate estimate_lambda1(const HmmSpec &spec, const EstimatorConfig &cfg) {
  detail::require_positive_eps(spec);
  cfg.validate(spec);
  const SimplexVector mu = stationary_distribution(spec.base_transitions());
  TrajectoryStream stream(spec, mu, cfg.seed);
  FilterState filter(cfg.resolved_nu(spec));
  const TransitionMatrix &lam = spec.transitions_eps();
  const NoiseModel &noise = spec.noise();
  std::vector<double> dens(spec.dim());
  detail::BatchAccumulator acc(cfg.n, cfg.burn_in, cfg.batches);
  for (std::size_t k = 0; k < cfg.n; ++k) {
    noise.densities(stream.next().obs, dens);
    acc.add(filter.step_with_densities(lam, dens));
  }
  return detail::finish(acc, cfg, "lambda1");
}

// Wedge rate lambda_1 + lambda_2 from the log increments of the Q recursion.
inline RateEstimate estimate_wedge_rate(const HmmSpec &spec, const EstimatorConfig &cfg) {
  detail::require_positive_eps(spec);
  cfg.validate(spec);
  const SimplexVector mu = stationary_distribution(spec.base_transitions());
  TrajectoryStream stream(spec, mu, cfg.seed);
  WedgeState wedge(cfg.resolved_nu(spec), cfg.resolved_nu_bar(spec));
  const TransitionMatrix &lam = spec.transitions_eps();
  const NoiseModel &noise = spec.noise();
  std::vector<double> dens(spec.dim());
  detail::BatchAccumulator acc(cfg.n, cfg.burn_in, cfg.batches);
  for (std::size_t k = 0; k < cfg.n; ++k) {
    noise.densities(stream.next().obs, dens);
    acc.add(wedge.step_with_densities(lam, dens));
  }
  return detail::finish(acc, cfg, "wedge");
}

// Stability index via the decomposition: on one shared trajectory, run the
// wedge recursion and the two filters and average
//   (wedge increment) - (rho increment) - (rho_bar increment).
inline RateEstimate estimate_gamma(const HmmSpec &spec, const EstimatorConfig &cfg) {
  detail::require_positive_eps(spec);
  cfg.validate(spec);
  const SimplexVector nu = cfg.resolved_nu(spec);
  const SimplexVector nu_bar = cfg.resolved_nu_bar(spec);
  const SimplexVector mu = stationary_distribution(spec.base_transitions());
  TrajectoryStream stream(spec, mu, cfg.seed);
  FilterState fa(nu), fb(nu_bar);
  WedgeState wedge(nu, nu_bar);
  const TransitionMatrix &lam = spec.transitions_eps();
  const NoiseModel &noise = spec.noise();
  std::vector<double> dens(spec.dim());
  detail::BatchAccumulator acc(cfg.n, cfg.burn_in, cfg.batches);
  for (std::size_t k = 0; k < cfg.n; ++k) {
    noise.densities(stream.next().obs, dens);
    const double da = fa.step_with_densities(lam, dens);
    const double db = fb.step_with_densities(lam, dens);
    const double dw = wedge.step_with_densities(lam, dens);
    acc.add(dw - da - db);
  }
  return detail::finish(acc, cfg, "wedge-decomposition");
}

// Short-horizon cross-check: least-squares slope of log|pi_n - pi_bar_n|
// against n, using only steps before the distance falls below the floor.
// Accepts eps = 0 (frozen chain) since the contraction study is meaningful
// there as well.
inline RateEstimate estimate_gamma_direct(const HmmSpec &spec, const EstimatorConfig &cfg,
                                          double underflow_floor = 1e-250) {
  const SimplexVector nu = cfg.resolved_nu(spec);
  const SimplexVector nu_bar = cfg.resolved_nu_bar(spec);
  if (nu.entries() == nu_bar.entries())
    throw DegenerateWedge("direct gamma: nu = nu_bar gives zero distance at n = 0");
  const SimplexVector mu = stationary_distribution(spec.base_transitions());
  TrajectoryStream stream(spec, mu, cfg.seed, /*allow_frozen=*/true);
  FilterState fa(nu), fb(nu_bar);
  const TransitionMatrix &lam = spec.transitions_eps();
  const NoiseModel &noise = spec.noise();
  std::vector<double> dens(spec.dim());
  std::vector<double> log_dist;
  double d0 = 0.0;
  for (std::size_t i = 0; i < nu.dim(); ++i) d0 += std::abs(nu[i] - nu_bar[i]);
  log_dist.push_back(std::log(d0));
  for (std::size_t k = 0; k < cfg.n; ++k) {
    noise.densities(stream.next().obs, dens);
    fa.step_with_densities(lam, dens);
    fb.step_with_densities(lam, dens);
    const double dist = filter_distance_l1(fa, fb);
    if (dist < underflow_floor) break;
    log_dist.push_back(std::log(dist));
  }
  const std::size_t m = log_dist.size() - 1; // usable steps
  if (m < 100)
    throw HorizonTooShort("direct gamma: only " + std::to_string(m) + " usable steps");
  // OLS slope over (k, log D_k), k = 0..m
  const double kbar = 0.5 * static_cast<double>(m);
  double ybar = 0.0;
  for (double v : log_dist) ybar += v;
  ybar /= static_cast<double>(m + 1);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k <= m; ++k) {
    const double dx = static_cast<double>(k) - kbar;
    sxy += dx * (log_dist[k] - ybar);
    sxx += dx * dx;
  }
  const double slope = sxy / sxx;
  // uncertainty from batch means of the one-step log-distance increments
  std::vector<double> diffs(m);
  for (std::size_t k = 0; k < m; ++k) diffs[k] = log_dist[k + 1] - log_dist[k];
  const std::size_t batches = 20;
  const std::size_t usable = m - (m % batches);
  const auto [unused_mean, se] = batch_means(std::span(diffs).subspan(0, usable), batches);
  (void)unused_mean;
  return {slope, se, m, 0, cfg.seed, "direct-distance"};
}

// Entropy rate of the observation process (discrete noise): the per-step
// predictive log-probabilities are exactly the negated filter increments, so
// this is -estimate_lambda1 increment by increment.
inline RateEstimate estimate_entropy_rate(const HmmSpec &spec, const EstimatorConfig &cfg) {
  if (!spec.noise().is_discrete())
    throw NotDiscrete("entropy rate requires a discrete noise model");
  RateEstimate r = estimate_lambda1(spec, cfg);
  r.value = -r.value;
  r.method = "entropy-rate";
  return r;
}

struct MisclassificationEstimate {
  RateEstimate posterior_min; // time average of min(pi, 1 - pi)
  RateEstimate argmax_error;  // frequency of X_k != argmax_i pi_k(i)
};

// d = 2 misclassification functionals of the stationary filter. Argmax ties
// break toward the lower state index.
inline MisclassificationEstimate estimate_misclassification(const HmmSpec &spec,
                                                            const EstimatorConfig &cfg) {
  if (spec.dim() != 2) throw WrongDimension("misclassification estimator requires d = 2");
  detail::require_positive_eps(spec);
  cfg.validate(spec);
  const SimplexVector mu = stationary_distribution(spec.base_transitions());
  TrajectoryStream stream(spec, mu, cfg.seed);
  FilterState filter(cfg.resolved_nu(spec));
  const TransitionMatrix &lam = spec.transitions_eps();
  const NoiseModel &noise = spec.noise();
  std::vector<double> dens(2);
  detail::BatchAccumulator acc_min(cfg.n, cfg.burn_in, cfg.batches);
  detail::BatchAccumulator acc_err(cfg.n, cfg.burn_in, cfg.batches);
  for (std::size_t k = 0; k < cfg.n; ++k) {
    const StepSample s = stream.next();
    noise.densities(s.obs, dens);
    filter.step_with_densities(lam, dens);
    const auto &pi = filter.pi();
    acc_min.add(std::min(pi[0], pi[1]));
    const int am = pi[1] > pi[0] ? 1 : 0;
    acc_err.add(am != s.state ? 1.0 : 0.0);
  }
  return {detail::finish(acc_min, cfg, "posterior-min"),
          detail::finish(acc_err, cfg, "argmax-error")};
}

// Concentration functional: per class J, the time average of
// (1{X_k in J} - sum_{l in J} pi_k(l))^2.
inline std::vector<RateEstimate> estimate_concentration(
    const HmmSpec &spec, const EstimatorConfig &cfg,
    const std::vector<std::vector<std::size_t>> &sets) {
  detail::require_positive_eps(spec);
  cfg.validate(spec);
  std::vector<int> owner(spec.dim(), -1);
  for (std::size_t s = 0; s < sets.size(); ++s)
    for (std::size_t state : sets[s]) {
      if (state >= spec.dim() || owner[state] != -1)
        throw BadPartition("concentration sets must partition the state space");
      owner[state] = static_cast<int>(s);
    }
  for (int o : owner)
    if (o == -1) throw BadPartition("concentration sets must cover every state");

  const SimplexVector mu = stationary_distribution(spec.base_transitions());
  TrajectoryStream stream(spec, mu, cfg.seed);
  FilterState filter(cfg.resolved_nu(spec));
  const TransitionMatrix &lam = spec.transitions_eps();
  const NoiseModel &noise = spec.noise();
  std::vector<double> dens(spec.dim());
  std::vector<detail::BatchAccumulator> accs;
  accs.reserve(sets.size());
  for (std::size_t s = 0; s < sets.size(); ++s)
    accs.emplace_back(cfg.n, cfg.burn_in, cfg.batches);
  for (std::size_t k = 0; k < cfg.n; ++k) {
    const StepSample smp = stream.next();
    noise.densities(smp.obs, dens);
    filter.step_with_densities(lam, dens);
    const auto &pi = filter.pi();
    for (std::size_t s = 0; s < sets.size(); ++s) {
      double mass = 0.0;
      bool member = false;
      for (std::size_t state : sets[s]) {
        mass += pi[state];
        member |= (static_cast<std::size_t>(smp.state) == state);
      }
      const double diff = (member ? 1.0 : 0.0) - mass;
      accs[s].add(diff * diff);
    }
  }
  std::vector<RateEstimate> out;
  out.reserve(sets.size());
  for (auto &acc : accs) out.push_back(detail::finish(acc, cfg, "concentration"));
  return out;
}

} // namespace filterstab
