#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "filterstab/noise.hpp"
#include "oracles.hpp"

using namespace filterstab;

TEST_CASE("discrete density evaluation") {
  const auto noise = oracles::bsc_noise(0.2);
  CHECK(noise.density(0, 1.0) == 0.2);
  CHECK(noise.density(0, 0.0) == 0.8);
  CHECK_THROWS_AS(noise.density(0, 0.5), UnknownSymbol);
  // rows integrate to 1 over the counting measure
  CHECK(noise.density(1, 0.0) + noise.density(1, 1.0) == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("gaussian density evaluation") {
  const auto noise = NoiseModel::gaussian({0.0, 1.0}, 1.0);
  CHECK(noise.density(0, 0.0) ==
        Catch::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
  CHECK_THROWS_AS(NoiseModel::gaussian({0.0}, 0.0), Error);
}

TEST_CASE("discrete sampling") {
  RandomStream rng(7);
  // noiseless channel: sampling from state 0 always yields symbol 0
  const auto clean = oracles::bsc_noise(1e-300);
  for (int k = 0; k < 50; ++k) CHECK(clean.sample(0, rng) == 0.0);

  const auto noise = oracles::bsc_noise(0.2);
  const std::size_t n = 1000000;
  std::size_t zeros = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (noise.sample(1, rng) == 0.0) ++zeros;
  const double frac = static_cast<double>(zeros) / static_cast<double>(n);
  const double se = std::sqrt(0.2 * 0.8 / static_cast<double>(n));
  CHECK(std::abs(frac - 0.2) <= 3.0 * se);
}

TEST_CASE("gaussian sampling hits its mean") {
  RandomStream rng(11);
  const auto noise = NoiseModel::gaussian({0.0, 1.0}, 1.0);
  const std::size_t n = 1000000;
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += noise.sample(1, rng);
  CHECK(std::abs(sum / static_cast<double>(n) - 1.0) <= 3.0 / 1000.0);
}

TEST_CASE("cross entropy closed forms") {
  const auto bsc = oracles::bsc_noise(0.2);
  const double h02 = -(0.8 * std::log(0.8) + 0.2 * std::log(0.2));
  CHECK(*bsc.cross_entropy_integral(0, 0) == Catch::Approx(-h02).epsilon(1e-14));
  CHECK(*bsc.cross_entropy_integral(0, 0) == Catch::Approx(-0.50040).margin(5e-6));

  const auto gauss = NoiseModel::gaussian({0.0, 1.0}, 1.0);
  CHECK(*gauss.cross_entropy_integral(0, 1) ==
        Catch::Approx(-0.5 * std::log(2.0 * std::numbers::pi) - 1.0).epsilon(1e-14));
  CHECK(*gauss.cross_entropy_integral(0, 1) == Catch::Approx(-1.91894).margin(5e-6));

  // disjoint supports diverge
  Matrix em(2, 2);
  em(0, 0) = 1.0;
  em(1, 1) = 1.0;
  const auto disjoint = NoiseModel::discrete({0.0, 1.0}, std::move(em));
  CHECK_FALSE(disjoint.cross_entropy_integral(0, 1).has_value());
}

TEST_CASE("kl divergence") {
  const auto bsc = oracles::bsc_noise(0.2);
  CHECK(*bsc.kl_divergence(0, 0) == 0.0);
  CHECK(*bsc.kl_divergence(0, 1) == Catch::Approx(0.6 * std::log(4.0)).epsilon(1e-14));
  CHECK(*bsc.kl_divergence(0, 1) == Catch::Approx(0.83178).margin(5e-6));

  const auto gauss = NoiseModel::gaussian({0.0, 1.0}, 1.0);
  CHECK(*gauss.kl_divergence(0, 1) == Catch::Approx(0.5).epsilon(1e-14));

  Matrix em(2, 2);
  em(0, 0) = 1.0;
  em(1, 1) = 1.0;
  const auto disjoint = NoiseModel::discrete({0.0, 1.0}, std::move(em));
  CHECK_FALSE(disjoint.kl_divergence(0, 1).has_value());

  // nonnegativity across a model zoo
  for (const auto &spec :
       {oracles::asym_spec(0.1), oracles::discrete3_spec(0.1), oracles::gaussian_spec({0, 1, 3}, 1.0, 0.1)}) {
    const auto &n = spec.noise();
    for (std::size_t i = 0; i < n.state_count(); ++i)
      for (std::size_t j = 0; j < n.state_count(); ++j) {
        const auto kl = n.kl_divergence(i, j);
        REQUIRE(kl.has_value());
        CHECK(*kl >= 0.0);
        if (i == j) CHECK(*kl == 0.0);
      }
  }
}

TEST_CASE("assumption report") {
  CHECK(oracles::bsc_noise(0.2).validate_assumptions().admissible());
  CHECK(NoiseModel::gaussian({0.0, 5.0, -3.0}, 0.3).validate_assumptions().admissible());

  Matrix em(2, 2);
  em(0, 0) = 1.0;
  em(1, 1) = 1.0;
  const auto rep = NoiseModel::discrete({0.0, 1.0}, std::move(em)).validate_assumptions();
  CHECK(rep.a1_bounded);
  CHECK_FALSE(rep.a2_common_support);
  CHECK_FALSE(rep.a3_finite_cross_entropies);
  CHECK_FALSE(rep.admissible());
  REQUIRE(rep.witnesses.size() == 2);
  CHECK(rep.witnesses[0] == std::pair<std::size_t, std::size_t>{0, 1});
  CHECK(rep.witnesses[1] == std::pair<std::size_t, std::size_t>{1, 0});
}

TEST_CASE("quadrature copies match closed forms") {
  // discrete copy is exact up to the summation order
  const auto bsc = oracles::bsc_noise(0.2);
  const auto tab = oracles::tabulate_discrete(bsc);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(*tab.cross_entropy_integral(i, j) ==
            Catch::Approx(*bsc.cross_entropy_integral(i, j)).margin(1e-12));

  // Gaussian midpoint quadrature on +/- 10 sigma with 1e5 points
  const auto gauss = NoiseModel::gaussian({0.0, 1.0}, 1.0);
  const auto gtab = oracles::tabulate_gaussian(gauss);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(*gtab.cross_entropy_integral(i, j) ==
            Catch::Approx(*gauss.cross_entropy_integral(i, j)).margin(1e-6));
      CHECK(*gtab.kl_divergence(i, j) ==
            Catch::Approx(*gauss.kl_divergence(i, j)).margin(1e-6));
    }
}

TEST_CASE("empirical log-density average matches the integral") {
  const auto noise = oracles::bsc_noise(0.2);
  RandomStream rng(5);
  const std::size_t n = 1000000;
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double v = std::log(noise.density(1, noise.sample(0, rng)));
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / static_cast<double>(n);
  const double var = sumsq / static_cast<double>(n) - mean * mean;
  const double se = std::sqrt(var / static_cast<double>(n));
  CHECK(std::abs(mean - *noise.cross_entropy_integral(0, 1)) <= 4.0 * se);
}

TEST_CASE("noise classes merge identical rows") {
  Matrix em(3, 2);
  em(0, 0) = 0.8;
  em(0, 1) = 0.2;
  em(1, 0) = 0.8;
  em(1, 1) = 0.2;
  em(2, 0) = 0.3;
  em(2, 1) = 0.7;
  const auto noise = NoiseModel::discrete({0.0, 1.0}, std::move(em));
  const auto classes = noise_classes(noise);
  REQUIRE(classes.size() == 2);
  CHECK(classes[0] == std::vector<std::size_t>{0, 1});
  CHECK(classes[1] == std::vector<std::size_t>{2});

  const auto distinct = oracles::discrete3_spec(0.1).noise();
  CHECK(noise_classes(distinct).size() == 3);
}

TEST_CASE("tabulated model validation") {
  CHECK_THROWS_AS(NoiseModel::tabulated({0.0, 1.0}, {1.0, 1.0}, Matrix(1, 2, 0.3)), Error);
  CHECK_THROWS_AS(NoiseModel::tabulated({1.0, 0.0}, {1.0, 1.0}, Matrix(1, 2, 0.5)), Error);
  CHECK_NOTHROW(NoiseModel::tabulated({0.0, 1.0}, {1.0, 1.0}, Matrix(1, 2, 0.5)));
}
