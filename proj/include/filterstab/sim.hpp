#pragma once

// Seeded generation of chain/observation trajectories (X^eps, Y^eps).
// TrajectoryStream produces steps one at a time so horizons up to 1e8 never
// materialize observation arrays; simulate() materializes a Trajectory.

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <variant>
#include <vector>

#include "filterstab/model.hpp"
#include "filterstab/rng.hpp"

namespace filterstab {

struct Trajectory {
  std::vector<int> states;          // X_1..X_n (state indices)
  std::vector<double> observations; // Y_1..Y_n
  int x0 = 0;                       // initial state index
  std::uint64_t seed = 0;
};

struct StepSample {
  int state;
  double obs;
};

// Initial condition: a fixed state index or a distribution to draw from.
using InitialLaw = std::variant<int, SimplexVector>;

class TrajectoryStream {
public:
  // The spec must outlive the stream. eps = 0 (frozen chain) is rejected
  // unless allow_frozen is set.
  TrajectoryStream(const HmmSpec &spec, const InitialLaw &init, std::uint64_t seed,
                   bool allow_frozen = false)
      : spec_(&spec), rng_(derive_seed(seed, 0, StreamPurpose::trajectory)), seed_(seed) {
    if (spec.eps() == 0.0 && !allow_frozen)
      throw EpsOutOfRange("eps = 0 (frozen chain) requires allow_frozen");
    if (const int *fixed = std::get_if<int>(&init)) {
      if (*fixed < 0 || static_cast<std::size_t>(*fixed) >= spec.dim())
        throw WrongDimension("initial state index out of range");
      x_ = *fixed;
    } else {
      const auto &law = std::get<SimplexVector>(init);
      if (law.dim() != spec.dim()) throw WrongDimension("initial law dimension mismatch");
      x_ = static_cast<int>(rng_.categorical(law.span()));
    }
    x0_ = x_;
  }

  int state() const { return x_; }
  int initial_state() const { return x0_; }
  std::uint64_t seed() const { return seed_; }

  StepSample next() {
    const auto &lam = spec_->transitions_eps();
    x_ = static_cast<int>(rng_.categorical(lam.row(static_cast<std::size_t>(x_))));
    const double y = spec_->noise().sample(static_cast<std::size_t>(x_), rng_);
    return {x_, y};
  }

private:
  const HmmSpec *spec_;
  RandomStream rng_;
  std::uint64_t seed_;
  int x_ = 0;
  int x0_ = 0;
};

// Materialized simulation; identical (spec, n, init, seed) give bit-identical
// output.
inline Trajectory simulate(const HmmSpec &spec, std::size_t n, const InitialLaw &init,
                           std::uint64_t seed, bool allow_frozen = false) {
  if (n < 1) throw Error("simulate: horizon must be >= 1");
  TrajectoryStream stream(spec, init, seed, allow_frozen);
  Trajectory out;
  out.x0 = stream.initial_state();
  out.seed = seed;
  out.states.reserve(n);
  out.observations.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const StepSample s = stream.next();
    out.states.push_back(s.state);
    out.observations.push_back(s.obs);
  }
  return out;
}

// Debug dump: CSV columns k, x_k, y_k (k = 0 row holds the initial state).
inline void write_trajectory_csv(const Trajectory &traj, std::ostream &os) {
  os << "k,x,y\n";
  os << "0," << traj.x0 << ",\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", traj.observations[k]);
    os << (k + 1) << ',' << traj.states[k] << ',' << buf << '\n';
  }
}

} // namespace filterstab
