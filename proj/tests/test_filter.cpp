#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "filterstab/filter.hpp"
#include "filterstab/sim.hpp"
#include "oracles.hpp"

using namespace filterstab;

TEST_CASE("predict") {
  const auto ident = slow_chain(oracles::symmetric_chain(0.5), 0.0);
  const auto pi = SimplexVector::validated({0.3, 0.7});
  CHECK(predict(ident, pi).entries() == pi.entries());

  const auto lam = slow_chain(oracles::symmetric_chain(0.5), 0.1); // eps*lambda = 0.05
  const auto out = predict(lam, SimplexVector::point_mass(2, 0));
  CHECK(out[0] == Catch::Approx(0.95).margin(1e-15));
  CHECK(out[1] == Catch::Approx(0.05).margin(1e-15));

  // stochasticity: output sums to 1
  const auto big = oracles::discrete3_spec(0.37).transitions_eps();
  const auto o3 = predict(big, SimplexVector::validated({0.2, 0.5, 0.3}));
  CHECK(o3[0] + o3[1] + o3[2] == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("filter step hand example") {
  // BSC p = 0.2, frozen chain, uniform prior, observe symbol 1
  const auto spec = oracles::bsc_spec(0.2, 0.5, 0.0);
  FilterState f(SimplexVector::uniform(2));
  const double inc = f.step(spec.transitions_eps(), spec.noise(), 1.0);
  CHECK(f.pi()[0] == Catch::Approx(0.2).margin(1e-15));
  CHECK(f.pi()[1] == Catch::Approx(0.8).margin(1e-15));
  CHECK(inc == Catch::Approx(std::log(0.5)).margin(1e-15));
  CHECK(f.log_norm() == inc);
}

TEST_CASE("uninformative observations reduce to prediction") {
  // identical densities: pi' = predict(pi), increment = log g(y)
  Matrix em(2, 2, 0.5);
  const auto noise = NoiseModel::discrete({0.0, 1.0}, std::move(em));
  const HmmSpec spec({0.0, 1.0}, oracles::symmetric_chain(0.5), noise, 0.2);
  const auto prior = SimplexVector::validated({0.3, 0.7});
  FilterState f(prior);
  const double inc = f.step(spec.transitions_eps(), noise, 1.0);
  const auto expected = predict(spec.transitions_eps(), prior);
  CHECK(f.pi()[0] == Catch::Approx(expected[0]).margin(1e-14));
  CHECK(inc == Catch::Approx(std::log(0.5)).margin(1e-14));
}

TEST_CASE("point mass is absorbing under the frozen chain") {
  const auto spec = oracles::bsc_spec(0.2, 0.5, 0.0);
  FilterState f(SimplexVector::point_mass(2, 0));
  for (double y : {0.0, 1.0, 0.0, 0.0, 1.0}) {
    f.step(spec.transitions_eps(), spec.noise(), y);
    CHECK(f.pi()[0] == 1.0);
    CHECK(f.pi()[1] == 0.0);
  }
}

TEST_CASE("zero likelihood is an error") {
  Matrix em(2, 2);
  em(0, 0) = 1.0;
  em(1, 1) = 1.0;
  const auto noise = NoiseModel::discrete({0.0, 1.0}, std::move(em));
  const HmmSpec spec({0.0, 1.0}, oracles::symmetric_chain(0.5), noise, 0.0);
  FilterState f(SimplexVector::point_mass(2, 0));
  CHECK_THROWS_AS(f.step(spec.transitions_eps(), noise, 1.0), ZeroLikelihood);
}

TEST_CASE("wedge init") {
  const auto w = wedge_init(SimplexVector::point_mass(2, 0), SimplexVector::point_mass(2, 1));
  CHECK(w.pi()(0, 1) == 0.5);
  CHECK(w.pi()(1, 0) == -0.5);
  CHECK(w.pi()(0, 0) == 0.0);
  CHECK(w.log_norm() == 0.0); // |Q_0| = 1 for this pair

  CHECK_THROWS_AS(wedge_init(SimplexVector::uniform(2), SimplexVector::uniform(2)),
                  DegenerateWedge);

  // generic pair: antisymmetric with unit L1 norm
  const auto w3 = wedge_init(SimplexVector::validated({0.2, 0.5, 0.3}),
                             SimplexVector::validated({0.6, 0.1, 0.3}));
  double norm = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      norm += std::abs(w3.pi()(i, j));
      CHECK(w3.pi()(i, j) == -w3.pi()(j, i));
    }
  CHECK(norm == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("d = 2 wedge increments are deterministic") {
  const auto spec = oracles::bsc_spec(0.2, 0.5, 0.05);
  WedgeState w(SimplexVector::point_mass(2, 0), SimplexVector::point_mass(2, 1));
  const double expected = std::log(0.16 * 0.95);
  for (double y : {0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0}) {
    const double inc = w.step(spec.transitions_eps(), spec.noise(), y);
    CHECK(std::abs(inc - expected) <= 1e-14);
  }
}

TEST_CASE("conjugation by scalar matrices leaves the wedge direction alone") {
  // frozen chain, identical constant densities: increment = 2 log c
  Matrix em(2, 2, 0.5);
  const auto noise = NoiseModel::discrete({0.0, 1.0}, std::move(em));
  const HmmSpec spec({0.0, 1.0}, oracles::symmetric_chain(0.5), noise, 0.0);
  WedgeState w(SimplexVector::point_mass(2, 0), SimplexVector::point_mass(2, 1));
  const double inc = w.step(spec.transitions_eps(), noise, 0.0);
  CHECK(inc == Catch::Approx(2.0 * std::log(0.5)).margin(1e-14));
  CHECK(w.pi()(0, 1) == 0.5);
}

TEST_CASE("simplex and antisymmetry preservation over long runs") {
  const auto spec = oracles::discrete3_spec(0.3);
  TrajectoryStream stream(spec, SimplexVector::uniform(3), 3);
  FilterState f(SimplexVector::point_mass(3, 1));
  WedgeState w(SimplexVector::point_mass(3, 0), SimplexVector::uniform(3));
  for (int k = 0; k < 5000; ++k) {
    const double y = stream.next().obs;
    f.step(spec.transitions_eps(), spec.noise(), y);
    w.step(spec.transitions_eps(), spec.noise(), y);
  }
  double pi_sum = 0.0;
  for (double v : f.pi()) {
    CHECK(v >= 0.0);
    pi_sum += v;
  }
  CHECK(std::abs(pi_sum - 1.0) <= 1e-12);
  double wnorm = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(std::abs(w.pi()(i, j) + w.pi()(j, i)) <= 1e-12);
      wnorm += std::abs(w.pi()(i, j));
    }
  CHECK(std::abs(wnorm - 1.0) <= 1e-12);
}

TEST_CASE("log accumulators match unnormalized products at short horizons") {
  for (const auto &spec : {oracles::bsc_spec(0.2, 0.5, 0.05), oracles::asym_spec(0.1)}) {
    const auto nu = SimplexVector::validated({0.9, 0.1});
    const auto nu_bar = SimplexVector::validated({0.25, 0.75});
    const auto traj = simulate(spec, 20, SimplexVector::uniform(2), 77);
    FilterState f(nu);
    WedgeState w(nu, nu_bar);
    for (double y : traj.observations) {
      f.step(spec.transitions_eps(), spec.noise(), y);
      w.step(spec.transitions_eps(), spec.noise(), y);
    }
    const double zakai = static_cast<double>(
        std::log(oracles::unnormalized_zakai_norm(spec, nu, traj.observations)));
    const double wedge = static_cast<double>(
        std::log(oracles::unnormalized_wedge_norm(spec, nu, nu_bar, traj.observations)));
    CHECK(f.log_norm() == Catch::Approx(zakai).epsilon(1e-10));
    CHECK(w.log_norm() == Catch::Approx(wedge).epsilon(1e-10));
  }
}

TEST_CASE("sandwich inequality at n = 0") {
  // nu = (1,0), nu_bar = (0,1): distance 2, ratio 1, so 1 <= 2 <= 2
  const auto nu = SimplexVector::point_mass(2, 0);
  const auto nu_bar = SimplexVector::point_mass(2, 1);
  const WedgeState w(nu, nu_bar);
  const double ratio = std::exp(w.log_norm() - 0.0 - 0.0);
  CHECK(ratio == Catch::Approx(1.0).margin(1e-15));
  CHECK(sandwich_check(nu, nu_bar, ratio));
  CHECK_FALSE(sandwich_check(nu, nu_bar, 3.0));   // distance below the lower edge
  CHECK_FALSE(sandwich_check(nu, nu_bar, 0.9));   // distance above twice the ratio
  // coupled filters: both sides at zero
  CHECK(sandwich_check(nu, nu, 0.0));
}

TEST_CASE("sandwich inequality along random trajectories") {
  const auto spec = oracles::bsc_spec(0.2, 0.5, 0.1);
  const auto nu = SimplexVector::validated({0.7, 0.3});
  const auto nu_bar = SimplexVector::validated({0.2, 0.8});
  const auto traj = simulate(spec, 20, SimplexVector::uniform(2), 101);
  FilterState fa(nu), fb(nu_bar);
  WedgeState w(nu, nu_bar);
  for (double y : traj.observations) {
    fa.step(spec.transitions_eps(), spec.noise(), y);
    fb.step(spec.transitions_eps(), spec.noise(), y);
    w.step(spec.transitions_eps(), spec.noise(), y);
    const double ratio = std::exp(w.log_norm() - fa.log_norm() - fb.log_norm());
    CHECK(sandwich_check(fa.pi_simplex(), fb.pi_simplex(), ratio));
  }
}
