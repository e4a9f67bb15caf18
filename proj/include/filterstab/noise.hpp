#pragma once

// Observation-noise families g_i(u): density evaluation, sampling, the
// admissibility checks, and the information integrals consumed by the
// closed-form bounds. Three variants share one interface:
//   - DiscreteEmission: finite alphabet, reference measure = counting measure
//   - GaussianEmission: common-variance normal family, reference = Lebesgue
//   - TabulatedEmission: per-state densities on a weighted grid (quadrature
//     oracle; the grid weights approximate the reference measure)
//
// Divergent integrals (support mismatch) are reported as an explicit flag
// (empty optional), never as a floating-point infinity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "filterstab/errors.hpp"
#include "filterstab/matrix.hpp"
#include "filterstab/rng.hpp"

namespace filterstab {

struct DiscreteEmission {
  std::vector<double> alphabet; // observation labels b_1..b_{d'}
  Matrix emission;              // d x d' row-stochastic
};

struct GaussianEmission {
  std::vector<double> means; // h(a_i)
  double sigma = 1.0;        // common standard deviation
};

struct TabulatedEmission {
  std::vector<double> grid;    // strictly increasing observation points
  std::vector<double> weights; // grid masses approximating the reference measure
  Matrix values;               // d x K density values g_i(grid[k])
};

struct AssumptionReport {
  bool a1_bounded = true;
  bool a2_common_support = true;
  bool a3_finite_cross_entropies = true;
  // State pairs (i,j) with support/integrability violations.
  std::vector<std::pair<std::size_t, std::size_t>> witnesses;

  bool admissible() const { return a1_bounded && a2_common_support && a3_finite_cross_entropies; }
};

class NoiseModel {
public:
  static NoiseModel discrete(std::vector<double> alphabet, Matrix emission) {
    if (emission.cols() != alphabet.size())
      throw Error("discrete noise: alphabet size does not match emission columns");
    if (emission.rows() < 1) throw Error("discrete noise: no states");
    validate_stochastic_rows(emission, "emission");
    return NoiseModel(DiscreteEmission{std::move(alphabet), std::move(emission)});
  }

  static NoiseModel gaussian(std::vector<double> means, double sigma) {
    if (means.empty()) throw Error("gaussian noise: no states");
    if (!(sigma > 0.0)) throw Error("gaussian noise: sigma must be positive");
    return NoiseModel(GaussianEmission{std::move(means), sigma});
  }

  static NoiseModel tabulated(std::vector<double> grid, std::vector<double> weights,
                              Matrix values) {
    if (grid.size() != weights.size() || values.cols() != grid.size())
      throw Error("tabulated noise: grid/weights/values size mismatch");
    for (std::size_t k = 0; k + 1 < grid.size(); ++k)
      if (!(grid[k] < grid[k + 1])) throw Error("tabulated noise: grid must be increasing");
    for (std::size_t i = 0; i < values.rows(); ++i) {
      double mass = 0.0;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        if (values(i, k) < 0.0) throw NegativeEntry("tabulated noise: negative density value");
        if (weights[k] < 0.0) throw NegativeEntry("tabulated noise: negative grid weight");
        mass += values(i, k) * weights[k];
      }
      if (std::abs(mass - 1.0) > 1e-8)
        throw Error("tabulated noise: state " + std::to_string(i) + " grid mass " +
                    std::to_string(mass) + " is not 1 within 1e-8");
    }
    return NoiseModel(TabulatedEmission{std::move(grid), std::move(weights), std::move(values)});
  }

  std::size_t state_count() const {
    if (const auto *g = std::get_if<GaussianEmission>(&variant_)) return g->means.size();
    if (const auto *d = std::get_if<DiscreteEmission>(&variant_)) return d->emission.rows();
    return std::get<TabulatedEmission>(variant_).values.rows();
  }

  bool is_discrete() const { return std::holds_alternative<DiscreteEmission>(variant_); }
  bool is_gaussian() const { return std::holds_alternative<GaussianEmission>(variant_); }
  bool is_tabulated() const { return std::holds_alternative<TabulatedEmission>(variant_); }

  const std::variant<DiscreteEmission, GaussianEmission, TabulatedEmission> &variant() const {
    return variant_;
  }

  // Index of a discrete/tabulated observation label, or -1 when absent.
  long symbol_index(double y) const {
    if (const auto *d = std::get_if<DiscreteEmission>(&variant_)) {
      for (std::size_t k = 0; k < d->alphabet.size(); ++k)
        if (d->alphabet[k] == y) return static_cast<long>(k);
      return -1;
    }
    if (const auto *t = std::get_if<TabulatedEmission>(&variant_)) {
      const auto it = std::lower_bound(t->grid.begin(), t->grid.end(), y);
      if (it != t->grid.end() && *it == y) return it - t->grid.begin();
      return -1;
    }
    return -1;
  }

  double density(std::size_t i, double y) const {
    if (const auto *g = std::get_if<GaussianEmission>(&variant_)) {
      const double z = (y - g->means[i]) / g->sigma;
      return gaussian_norm(g->sigma) * std::exp(-0.5 * z * z);
    }
    const long k = symbol_index(y);
    if (k < 0) throw UnknownSymbol("observation " + std::to_string(y) + " is not in the alphabet");
    if (const auto *d = std::get_if<DiscreteEmission>(&variant_))
      return d->emission(i, static_cast<std::size_t>(k));
    return std::get<TabulatedEmission>(variant_).values(i, static_cast<std::size_t>(k));
  }

  // Fills out[i] = g_i(y) for every state; the filter hot path.
  void densities(double y, std::span<double> out) const {
    if (const auto *g = std::get_if<GaussianEmission>(&variant_)) {
      const double norm = gaussian_norm(g->sigma);
      const double inv = 1.0 / g->sigma;
      for (std::size_t i = 0; i < g->means.size(); ++i) {
        const double z = (y - g->means[i]) * inv;
        out[i] = norm * std::exp(-0.5 * z * z);
      }
      return;
    }
    const long k = symbol_index(y);
    if (k < 0) throw UnknownSymbol("observation " + std::to_string(y) + " is not in the alphabet");
    const Matrix &tab = std::holds_alternative<DiscreteEmission>(variant_)
                            ? std::get<DiscreteEmission>(variant_).emission
                            : std::get<TabulatedEmission>(variant_).values;
    for (std::size_t i = 0; i < tab.rows(); ++i) out[i] = tab(i, static_cast<std::size_t>(k));
  }

  double sample(std::size_t i, RandomStream &rng) const {
    if (const auto *g = std::get_if<GaussianEmission>(&variant_))
      return rng.normal(g->means[i], g->sigma);
    if (const auto *d = std::get_if<DiscreteEmission>(&variant_))
      return d->alphabet[rng.categorical(d->emission.row(i))];
    const auto &t = std::get<TabulatedEmission>(variant_);
    return t.grid[rng.categorical(sample_probs_[i])];
  }

  // \int g_i log g_j dphi; empty optional when the integral diverges to -inf.
  std::optional<double> cross_entropy_integral(std::size_t i, std::size_t j) const {
    if (const auto *g = std::get_if<GaussianEmission>(&variant_)) {
      const double s2 = g->sigma * g->sigma;
      const double gap = g->means[i] - g->means[j];
      return -0.5 * std::log(2.0 * std::numbers::pi * s2) - (s2 + gap * gap) / (2.0 * s2);
    }
    const Matrix &tab = std::holds_alternative<DiscreteEmission>(variant_)
                            ? std::get<DiscreteEmission>(variant_).emission
                            : std::get<TabulatedEmission>(variant_).values;
    const std::vector<double> *w = std::holds_alternative<TabulatedEmission>(variant_)
                                       ? &std::get<TabulatedEmission>(variant_).weights
                                       : nullptr;
    double sum = 0.0;
    for (std::size_t k = 0; k < tab.cols(); ++k) {
      const double gi = tab(i, k);
      if (gi == 0.0) continue; // 0 log 0 == 0
      const double gj = tab(j, k);
      if (gj == 0.0) return std::nullopt; // diverges
      sum += (w ? gi * (*w)[k] : gi) * std::log(gj);
    }
    return sum;
  }

  // D(g_i || g_j) >= 0; empty optional when infinite (assumption a3 fails).
  std::optional<double> kl_divergence(std::size_t i, std::size_t j) const {
    const auto self = cross_entropy_integral(i, i);
    const auto cross = cross_entropy_integral(i, j);
    if (!cross) return std::nullopt;
    return *self - *cross;
  }

  AssumptionReport validate_assumptions() const {
    AssumptionReport rep;
    const std::size_t d = state_count();
    // a1: all three families have bounded densities by construction.
    rep.a1_bounded = true;
    if (is_gaussian()) return rep; // full support, finite integrals
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        if (i == j) continue;
        bool bad = false;
        if (!supports_equal(i, j)) {
          rep.a2_common_support = false;
          bad = true;
        }
        if (!cross_entropy_integral(i, j)) {
          rep.a3_finite_cross_entropies = false;
          bad = true;
        }
        if (bad) rep.witnesses.emplace_back(i, j);
      }
    }
    return rep;
  }

  // Exact zero-pattern equality of the supports of g_i and g_j.
  bool supports_equal(std::size_t i, std::size_t j) const {
    if (is_gaussian()) return true;
    const Matrix &tab = std::holds_alternative<DiscreteEmission>(variant_)
                            ? std::get<DiscreteEmission>(variant_).emission
                            : std::get<TabulatedEmission>(variant_).values;
    for (std::size_t k = 0; k < tab.cols(); ++k)
      if ((tab(i, k) == 0.0) != (tab(j, k) == 0.0)) return false;
    return true;
  }

  // Exact density equality (the D(g_i||g_j) = 0 case).
  bool densities_equal(std::size_t i, std::size_t j) const {
    if (const auto *g = std::get_if<GaussianEmission>(&variant_))
      return g->means[i] == g->means[j];
    const Matrix &tab = std::holds_alternative<DiscreteEmission>(variant_)
                            ? std::get<DiscreteEmission>(variant_).emission
                            : std::get<TabulatedEmission>(variant_).values;
    for (std::size_t k = 0; k < tab.cols(); ++k)
      if (tab(i, k) != tab(j, k)) return false;
    return true;
  }

  static void validate_stochastic_rows(Matrix &m, const std::string &what, double tol = 1e-12) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < m.cols(); ++j) {
        if (m(i, j) < 0.0)
          throw NegativeEntry(what + ": negative entry at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
        sum += m(i, j);
      }
      if (std::abs(sum - 1.0) > tol)
        throw RowSumViolation(what + ": row " + std::to_string(i) + " sums to " +
                              std::to_string(sum) + " (deviation " + std::to_string(sum - 1.0) +
                              ")");
      if (sum != 1.0)
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) /= sum;
    }
  }

private:
  explicit NoiseModel(std::variant<DiscreteEmission, GaussianEmission, TabulatedEmission> v)
      : variant_(std::move(v)) {
    if (const auto *t = std::get_if<TabulatedEmission>(&variant_)) {
      // Per-state sampling probabilities q_ik = g_i(y_k) w_k, renormalized.
      sample_probs_.resize(t->values.rows());
      for (std::size_t i = 0; i < t->values.rows(); ++i) {
        auto &row = sample_probs_[i];
        row.resize(t->grid.size());
        double mass = 0.0;
        for (std::size_t k = 0; k < t->grid.size(); ++k) {
          row[k] = t->values(i, k) * t->weights[k];
          mass += row[k];
        }
        for (double &p : row) p /= mass;
      }
    }
  }

  static double gaussian_norm(double sigma) {
    return 1.0 / std::sqrt(2.0 * std::numbers::pi * sigma * sigma);
  }

  std::variant<DiscreteEmission, GaussianEmission, TabulatedEmission> variant_;
  std::vector<std::vector<double>> sample_probs_; // tabulated only
};

// Zero-KL equivalence classes of states (states with identical noise rows).
inline std::vector<std::vector<std::size_t>> noise_classes(const NoiseModel &noise) {
  const std::size_t d = noise.state_count();
  std::vector<std::vector<std::size_t>> classes;
  std::vector<bool> assigned(d, false);
  for (std::size_t i = 0; i < d; ++i) {
    if (assigned[i]) continue;
    std::vector<std::size_t> cls{i};
    assigned[i] = true;
    for (std::size_t j = i + 1; j < d; ++j)
      if (!assigned[j] && noise.densities_equal(i, j)) {
        cls.push_back(j);
        assigned[j] = true;
      }
    classes.push_back(std::move(cls));
  }
  return classes;
}

} // namespace filterstab
