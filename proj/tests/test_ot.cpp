#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "ot_oracle.hpp"
#include "wwls/ot.hpp"

using namespace wwls;
using wwls_test::lp_oracle;
using wwls_test::random_costs;
using wwls_test::random_simplex;

TEST_CASE("inputs are validated") {
  CHECK_THROWS_AS(Histogram({0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(Histogram({-0.5, 1.5}), std::invalid_argument);
  CHECK_THROWS_AS(Histogram(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(CostMatrix(2, 2, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(CostMatrix(1, 2, {1.0, -2.0}), std::invalid_argument);
  Histogram a({0.5, 0.5});
  Histogram b({1.0});
  CostMatrix c(2, 2, {0.0, 1.0, 1.0, 0.0});
  CHECK_THROWS_AS(emd(a, b, c), std::invalid_argument);
  CHECK_THROWS_AS(sinkhorn(a, b, c, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(sinkhorn(a, a, c, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(sinkhorn(a, a, c, 0.1, 0), std::invalid_argument);
}

TEST_CASE("identity transport is free") {
  Histogram a({0.25, 0.75});
  CostMatrix c(2, 2, {0.0, 3.0, 3.0, 0.0});
  const auto plan = emd(a, a, c);
  CHECK(plan.cost == doctest::Approx(0.0));
  CHECK(plan.at(0, 0) == doctest::Approx(0.25));
  CHECK(plan.at(1, 1) == doctest::Approx(0.75));
}

TEST_CASE("forced single-route transport") {
  Histogram a({1.0});
  Histogram b({0.4, 0.6});
  CostMatrix c(1, 2, {2.0, 5.0});
  const auto plan = emd(a, b, c);
  CHECK(plan.cost == doctest::Approx(0.4 * 2.0 + 0.6 * 5.0));
  const auto cols = plan.col_marginals();
  CHECK(cols[0] == doctest::Approx(0.4));
  CHECK(cols[1] == doctest::Approx(0.6));
}

TEST_CASE("plan marginals match the inputs") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_simplex(5, rng);
    const auto b = random_simplex(7, rng);
    const auto c = random_costs(35, rng);
    const auto plan = emd(Histogram(a), Histogram(b), CostMatrix(5, 7, c));
    const auto rows = plan.row_marginals();
    const auto cols = plan.col_marginals();
    for (std::size_t i = 0; i < 5; ++i)
      CHECK(rows[i] == doctest::Approx(a[i]).epsilon(1e-9));
    for (std::size_t j = 0; j < 7; ++j)
      CHECK(cols[j] == doctest::Approx(b[j]).epsilon(1e-9));
    for (double f : plan.plan) CHECK(f >= -1e-12);
    // Reported cost equals the plan contracted with the costs.
    double recomputed = 0.0;
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 7; ++j)
        recomputed += plan.at(i, j) * c[i * 7 + j];
    CHECK(plan.cost == doctest::Approx(recomputed).epsilon(1e-12));
  }
}

TEST_CASE("exact solver agrees with basis enumeration") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t m = 3, n = 3;
    const auto a = random_simplex(m, rng);
    const auto b = random_simplex(n, rng);
    const auto c = random_costs(m * n, rng);
    const double oracle = lp_oracle(a, b, c);
    const auto plan = emd(Histogram(a), Histogram(b), CostMatrix(m, n, c));
    CHECK(plan.cost == doctest::Approx(oracle).epsilon(1e-9));
  }
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t m = 4, n = 4;
    const auto a = random_simplex(m, rng);
    const auto b = random_simplex(n, rng);
    const auto c = random_costs(m * n, rng);
    const double oracle = lp_oracle(a, b, c);
    const auto plan = emd(Histogram(a), Histogram(b), CostMatrix(m, n, c));
    CHECK(plan.cost == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("transport cost is symmetric and scales with the costs") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_simplex(4, rng);
    const auto b = random_simplex(6, rng);
    const auto c = random_costs(24, rng);
    std::vector<double> ct(24);  // transpose
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 6; ++j) ct[j * 4 + i] = c[i * 6 + j];
    const double fwd =
        emd(Histogram(a), Histogram(b), CostMatrix(4, 6, c)).cost;
    const double bwd =
        emd(Histogram(b), Histogram(a), CostMatrix(6, 4, ct)).cost;
    CHECK(fwd == doctest::Approx(bwd).epsilon(1e-12));

    std::vector<double> scaled(c);
    for (double& x : scaled) x *= 3.5;
    const double big =
        emd(Histogram(a), Histogram(b), CostMatrix(4, 6, scaled)).cost;
    CHECK(big == doctest::Approx(3.5 * fwd).epsilon(1e-12));
  }
}

TEST_CASE("integer transport is exact") {
  // 2x2 with known optimum: supplies (3, 1), demands (2, 2).
  const auto result = detail::solve_int_transport({3, 1}, {2, 2},
                                                  {1, 4, 7, 2});
  CHECK(result.total_cost == 1 * 2 + 4 * 1 + 2 * 1);
  CHECK(result.flow == std::vector<std::int64_t>{2, 1, 0, 1});
  CHECK_THROWS_AS(detail::solve_int_transport({1}, {2}, {1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(detail::solve_int_transport({1}, {1}, {-1}),
                  std::invalid_argument);
}

TEST_CASE("sinkhorn approaches the exact optimum") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_simplex(6, rng);
    const auto b = random_simplex(6, rng);
    const auto c = random_costs(36, rng);
    const double exact =
        emd(Histogram(a), Histogram(b), CostMatrix(6, 6, c)).cost;
    const auto approx = sinkhorn(Histogram(a), Histogram(b),
                                 CostMatrix(6, 6, c), 1e-3, 200000, 1e-9);
    CHECK(std::abs(approx.cost - exact) <= 0.02 * std::max(exact, 1e-6));
    // Rows end exact; columns within the tolerance achieved.
    const auto rows = approx.row_marginals();
    for (std::size_t i = 0; i < 6; ++i)
      CHECK(rows[i] == doctest::Approx(a[i]).epsilon(1e-9));
  }
}

TEST_CASE("sinkhorn flags non-convergence instead of hiding it") {
  std::mt19937_64 rng(19);
  const auto a = random_simplex(5, rng);
  const auto b = random_simplex(5, rng);
  const auto c = random_costs(25, rng);
  const auto plan =
      sinkhorn(Histogram(a), Histogram(b), CostMatrix(5, 5, c), 1e-4, 1, 1e-12);
  CHECK_FALSE(plan.converged);
  CHECK(plan.iterations == 1);
  CHECK(std::isfinite(plan.cost));
}

TEST_CASE("sinkhorn handles zero-weight bins") {
  Histogram a({0.0, 1.0});
  Histogram b({0.5, 0.5});
  CostMatrix c(2, 2, {0.0, 1.0, 1.0, 0.0});
  const auto plan = sinkhorn(a, b, c, 1e-2, 10000, 1e-10);
  CHECK(plan.at(0, 0) == 0.0);
  CHECK(plan.at(0, 1) == 0.0);
  CHECK(plan.cost == doctest::Approx(0.5).epsilon(1e-3));
}
