#include <catch2/catch_amalgamated.hpp>

#include "filterstab/model.hpp"
#include "oracles.hpp"

using namespace filterstab;

namespace {

Matrix make2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

} // namespace

TEST_CASE("transition matrix validation") {
  CHECK_NOTHROW(TransitionMatrix::validated(make2(1, 0, 0, 1)));
  CHECK_NOTHROW(TransitionMatrix::validated(make2(0.9, 0.1, 0.3, 0.7)));
  CHECK_THROWS_AS(TransitionMatrix::validated(make2(0.9, 0.2, 0.3, 0.7)), RowSumViolation);
  CHECK_THROWS_AS(TransitionMatrix::validated(make2(1.1, -0.1, 0.3, 0.7)), NegativeEntry);
  CHECK_THROWS_AS(TransitionMatrix::validated(Matrix(1, 1, 1.0)), Error);

  // rows within tolerance are renormalized to exactly 1
  Matrix close = make2(0.9 + 4e-13, 0.1, 0.3, 0.7);
  const TransitionMatrix t = TransitionMatrix::validated(close);
  CHECK(t(0, 0) + t(0, 1) == 1.0);
}

TEST_CASE("row sum violation names the offending row") {
  try {
    TransitionMatrix::validated(make2(0.9, 0.2, 0.3, 0.7));
    FAIL("expected RowSumViolation");
  } catch (const RowSumViolation &e) {
    CHECK(std::string(e.what()).find("row 0") != std::string::npos);
  }
}

TEST_CASE("stationary distribution") {
  const auto sym = oracles::symmetric_chain(0.3);
  const SimplexVector mu_sym = stationary_distribution(sym);
  CHECK(mu_sym[0] == Catch::Approx(0.5).margin(1e-12));

  const auto lam = TransitionMatrix::validated(make2(0.9, 0.1, 0.3, 0.7));
  const SimplexVector mu = stationary_distribution(lam);
  CHECK(mu[0] == Catch::Approx(0.75).margin(1e-12));
  CHECK(mu[1] == Catch::Approx(0.25).margin(1e-12));

  CHECK_THROWS_AS(stationary_distribution(TransitionMatrix::validated(make2(1, 0, 0, 1))),
                  NotErgodic);
}

TEST_CASE("slow chain preserves the stationary distribution") {
  const auto lam = oracles::discrete3_spec(1.0).base_transitions();
  const SimplexVector mu = stationary_distribution(lam);
  for (double eps : {0.0001, 0.01, 0.3, 1.0}) {
    const SimplexVector mu_eps = stationary_distribution(slow_chain(lam, eps));
    for (std::size_t i = 0; i < 3; ++i) CHECK(mu_eps[i] == Catch::Approx(mu[i]).margin(1e-10));
  }
}

TEST_CASE("is_ergodic") {
  CHECK_FALSE(is_ergodic(TransitionMatrix::validated(make2(0, 1, 1, 0)))); // period 2
  CHECK(is_ergodic(TransitionMatrix::validated(make2(0.9, 0.1, 0.3, 0.7))));
  CHECK_FALSE(is_ergodic(TransitionMatrix::validated(make2(1, 0, 0, 1)))); // reducible
  CHECK_THROWS_AS(is_ergodic(oracles::symmetric_chain(0.5), 0), Error);
}

TEST_CASE("is_ergodic is monotone in q_max") {
  // becomes positive at some q >= 2 and stays positive afterwards
  Matrix m(3, 3, 0.0);
  m(0, 1) = 1.0;
  m(1, 0) = 0.5;
  m(1, 2) = 0.5;
  m(2, 0) = 0.5;
  m(2, 2) = 0.5;
  const auto lam = TransitionMatrix::validated(std::move(m));
  bool seen_true = false;
  for (long q = 1; q <= 9; ++q) {
    const bool e = is_ergodic(lam, q);
    if (seen_true) CHECK(e);
    seen_true = seen_true || e;
  }
  CHECK(seen_true);
}

TEST_CASE("slow chain definition") {
  const auto lam = TransitionMatrix::validated(make2(0.9, 0.1, 0.3, 0.7));
  const auto s = slow_chain(lam, 0.1);
  CHECK(s(0, 0) == Catch::Approx(0.99).margin(1e-15));
  CHECK(s(0, 1) == Catch::Approx(0.01).margin(1e-15));
  CHECK(s(1, 0) == Catch::Approx(0.03).margin(1e-15));
  CHECK(s(1, 1) == Catch::Approx(0.97).margin(1e-15));

  // eps = 0 freezes the chain
  const auto frozen = slow_chain(lam, 0.0);
  CHECK(frozen == TransitionMatrix::validated(make2(1, 0, 0, 1)));

  // eps = 1 with zero diagonal reproduces the base matrix
  const auto jump = TransitionMatrix::validated(make2(0, 1, 1, 0));
  CHECK(slow_chain(jump, 1.0) == jump);

  // rows sum to 1 within 1e-14 across the valid range
  for (double eps : {1e-4, 0.37, 0.9, 1.0}) {
    const auto se = slow_chain(oracles::discrete3_spec(1.0).base_transitions(), eps);
    for (std::size_t i = 0; i < 3; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < 3; ++j) sum += se(i, j);
      CHECK(std::abs(sum - 1.0) <= 1e-14);
    }
  }

  CHECK_THROWS_AS(slow_chain(jump, 1.5), EpsOutOfRange);
  CHECK_THROWS_AS(slow_chain(lam, -0.1), EpsOutOfRange);
  CHECK(max_eps(jump) == Catch::Approx(1.0));
}

TEST_CASE("simplex vector validation") {
  CHECK_NOTHROW(SimplexVector::validated({0.25, 0.75}));
  CHECK_THROWS_AS(SimplexVector::validated({-0.1, 1.1}), NegativeEntry);
  CHECK_THROWS_AS(SimplexVector::validated({0.5, 0.4}), Error);
  CHECK(SimplexVector::uniform(4)[2] == 0.25);
  CHECK(SimplexVector::point_mass(3, 1)[1] == 1.0);
}

TEST_CASE("hmm spec wiring") {
  CHECK_NOTHROW(oracles::bsc_spec(0.2, 0.5, 0.05));
  CHECK_THROWS_AS(HmmSpec({0.0}, oracles::symmetric_chain(0.5), oracles::bsc_noise(0.2), 0.1),
                  WrongDimension);
  CHECK_THROWS_AS(HmmSpec({0.0, 1.0, 2.0}, oracles::discrete3_spec(0.1).base_transitions(),
                          oracles::bsc_noise(0.2), 0.1),
                  WrongDimension);
  CHECK_THROWS_AS(oracles::bsc_spec(0.2, 0.5, 2.5), EpsOutOfRange);
  const auto spec = oracles::bsc_spec(0.2, 0.5, 0.05);
  CHECK(spec.transitions_eps()(0, 1) == Catch::Approx(0.025).margin(1e-15));
}
