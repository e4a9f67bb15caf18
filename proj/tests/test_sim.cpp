#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "filterstab/sim.hpp"
#include "oracles.hpp"

using namespace filterstab;

TEST_CASE("simulation is deterministic in the seed") {
  const auto spec = oracles::bsc_spec(0.2, 0.5, 0.1);
  const auto a = simulate(spec, 5000, SimplexVector::uniform(2), 123);
  const auto b = simulate(spec, 5000, SimplexVector::uniform(2), 123);
  CHECK(a.states == b.states);
  CHECK(a.observations == b.observations);
  CHECK(a.x0 == b.x0);
  const auto c = simulate(spec, 5000, SimplexVector::uniform(2), 124);
  CHECK(a.observations != c.observations);
}

TEST_CASE("frozen chain stays in its initial state") {
  const auto spec = oracles::bsc_spec(0.2, 0.5, 0.0);
  CHECK_THROWS_AS(simulate(spec, 10, 1, 5), EpsOutOfRange);
  const auto traj = simulate(spec, 200, 1, 5, /*allow_frozen=*/true);
  CHECK(traj.x0 == 1);
  for (int x : traj.states) CHECK(x == 1);
}

TEST_CASE("noiseless channel reproduces the state sequence") {
  const auto spec = oracles::bsc_spec(1e-300, 0.5, 0.5);
  const auto traj = simulate(spec, 2000, 0, 7);
  for (std::size_t k = 0; k < traj.states.size(); ++k)
    CHECK(traj.observations[k] == spec.states()[static_cast<std::size_t>(traj.states[k])]);
}

TEST_CASE("occupation frequencies match the stationary distribution") {
  const auto spec = oracles::asym_spec(0.5);
  const SimplexVector mu = stationary_distribution(spec.base_transitions());
  TrajectoryStream stream(spec, mu, 31);
  const std::size_t n = 1000000;
  std::size_t in0 = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (stream.next().state == 0) ++in0;
  const double frac = static_cast<double>(in0) / static_cast<double>(n);
  // effective sample size is reduced by the chain autocorrelation; at
  // eps = 0.5 the relaxation factor is 1 - l01^eps - l10^eps = 0.6
  const double rho = 0.6;
  const double se =
      std::sqrt(mu[0] * mu[1] / static_cast<double>(n) * (1.0 + rho) / (1.0 - rho));
  CHECK(std::abs(frac - mu[0]) <= 4.0 * se);
}

TEST_CASE("one-step transition counts match the slow chain") {
  const auto spec = oracles::bsc_spec(0.2, 0.5, 0.5);
  const auto &lam = spec.transitions_eps();
  TrajectoryStream stream(spec, SimplexVector::uniform(2), 17);
  const std::size_t n = 1000000;
  std::size_t from0 = 0, moved0 = 0;
  int prev = stream.state();
  for (std::size_t k = 0; k < n; ++k) {
    const int x = stream.next().state;
    if (prev == 0) {
      ++from0;
      if (x == 1) ++moved0;
    }
    prev = x;
  }
  const double frac = static_cast<double>(moved0) / static_cast<double>(from0);
  const double p = lam(0, 1);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(from0));
  CHECK(std::abs(frac - p) <= 4.0 * se);
}

TEST_CASE("trajectory csv dump") {
  const auto spec = oracles::bsc_spec(0.2, 0.5, 0.5);
  const auto traj = simulate(spec, 3, 0, 9);
  std::ostringstream os;
  write_trajectory_csv(traj, os);
  const std::string text = os.str();
  CHECK(text.rfind("k,x,y\n0,0,\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}

TEST_CASE("initial law variants") {
  const auto spec = oracles::bsc_spec(0.2, 0.5, 0.1);
  CHECK_THROWS_AS(TrajectoryStream(spec, 5, 1), WrongDimension);
  CHECK_THROWS_AS(TrajectoryStream(spec, SimplexVector::uniform(3), 1), WrongDimension);
  TrajectoryStream fixed(spec, 1, 1);
  CHECK(fixed.initial_state() == 1);
}
