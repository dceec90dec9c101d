#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "sltm/probability.hpp"

using namespace sltm;

TEST_CASE("queue distribution construction and basics") {
  QueueDistribution d(3);
  CHECK(d.capacity() == 3);
  CHECK(d.prob_empty() == 1.0);
  CHECK(d.mean() == 0.0);
  CHECK(d.is_valid());

  QueueDistribution p = QueueDistribution::point_mass(4, 2);
  CHECK(p[2] == 1.0);
  CHECK(p.mean() == 2.0);
  CHECK(p.prob_full() == 0.0);

  CHECK_THROWS_AS(QueueDistribution(0), std::invalid_argument);
  CHECK_THROWS_AS(QueueDistribution::point_mass(3, 4), std::invalid_argument);
  CHECK_THROWS_AS(QueueDistribution::from_probs({1.0}), std::invalid_argument);

  QueueDistribution f = QueueDistribution::from_probs({0.2, 0.2, 0.6});
  CHECK(f.mean() == doctest::Approx(1.4));
}

TEST_CASE("renormalize clamps negatives and warns on large deviation") {
  QueueDistribution d = QueueDistribution::point_mass(2, 1);
  d.mutable_probs() = {0.5, -0.1, 0.5};
  Diagnostics diag;
  d.renormalize(&diag);
  CHECK(d.is_valid());
  CHECK(d[1] == 0.0);
  CHECK(d[0] == doctest::Approx(0.5));
  CHECK(!diag.warnings.empty());

  QueueDistribution tiny = QueueDistribution::point_mass(2, 1);
  tiny.mutable_probs() = {0.0, 0.0, 0.0};
  CHECK_THROWS(tiny.renormalize());
}

TEST_CASE("poisson pmf frozen values") {
  CHECK(poisson_pmf(0.0, 0) == 1.0);
  CHECK(poisson_pmf(0.0, 3) == 0.0);
  // e^{-2} 2^2 / 2!
  CHECK(poisson_pmf(2.0, 2) == doctest::Approx(0.2706705664732254).epsilon(1e-12));
  CHECK(poisson_pmf(1.5, 0) == doctest::Approx(std::exp(-1.5)).epsilon(1e-12));

  double tail = poisson_pmf(1.0, 300);
  CHECK(std::isfinite(tail));
  CHECK(tail >= 0.0);
  CHECK(tail < 1e-300);

  CHECK_THROWS_AS(poisson_pmf(-1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(poisson_pmf(1.0, -1), std::invalid_argument);
}

TEST_CASE("poisson pmf partial sums are monotone toward 1") {
  for (double mean : {0.3, 2.0, 17.5}) {
    double sum = 0.0;
    for (long n = 0; n <= 200; ++n) {
      sum += poisson_pmf(mean, n);
      CHECK(sum <= 1.0 + 1e-12);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("conditional multinomial frozen values") {
  CHECK(conditional_multinomial(0, {0, 0}, {1.0, 1.0}) == 1.0);
  CHECK(conditional_multinomial(2, {2, 0}, {1.0, 1.0}) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(conditional_multinomial(3, {0, 3}, {1.0, 2.0}) ==
        doctest::Approx(8.0 / 27.0).epsilon(1e-12));
  // zero cell probability with a positive count is impossible
  CHECK(conditional_multinomial(2, {1, 1}, {0.0, 1.0}) == 0.0);

  CHECK_THROWS_AS(conditional_multinomial(2, {1, 0}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(conditional_multinomial(1, {1}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(conditional_multinomial(1, {-1, 2}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("conditional multinomial sums to 1 over all count splits") {
  std::vector<double> rates = {0.4, 1.3, 2.1};
  for (long total : {1L, 5L, 12L}) {
    double sum = 0.0;
    for (long a = 0; a <= total; ++a)
      for (long b = 0; a + b <= total; ++b)
        sum += conditional_multinomial(total, {a, b, total - a - b}, rates);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("propagation with zero generator is the identity") {
  QueueDistribution d = QueueDistribution::from_probs({0.2, 0.5, 0.3});
  QueueDistribution out = propagate_birth_death(d, 0.0, 0.0, 1.0);
  for (int n = 0; n <= 2; ++n) CHECK(out[n] == d[n]);
}

TEST_CASE("propagation argument guards") {
  QueueDistribution d(2);
  CHECK_THROWS_AS(propagate_birth_death(d, 1.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(propagate_birth_death(d, -1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(propagate_birth_death(d, 1.0, std::nan(""), 1.0), std::invalid_argument);
}

TEST_CASE("pure birth with capacity 1 absorbs at the top") {
  QueueDistribution d(1);
  QueueDistribution out = propagate_birth_death(d, 1.0, 0.0, 50.0);
  CHECK(out[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two-state chain matches the closed-form matrix exponential") {
  // occupancy of {0,1} from empty: p1(t) = b/(b+d) (1 - exp(-(b+d) t))
  const std::vector<std::array<double, 3>> cases = {
      {0.7, 0.3, 2.0}, {1.5, 0.0, 0.4}, {0.2, 1.9, 11.0}};
  for (auto [b, dth, t] : cases) {
    QueueDistribution d(1);
    QueueDistribution out = propagate_birth_death(d, b, dth, t);
    double p1 = b / (b + dth) * (1.0 - std::exp(-(b + dth) * t));
    CHECK(out[1] == doctest::Approx(p1).epsilon(1e-10));
  }
}

TEST_CASE("long propagation reaches the truncated-geometric stationary law") {
  const int capacity = 6;
  const double lambda = 0.3, mu = 0.5;
  QueueDistribution d(capacity);
  QueueDistribution prev = d;
  for (int iter = 0; iter < 10000; ++iter) {
    QueueDistribution next = propagate_birth_death(d, lambda, mu, 5.0);
    double diff = 0.0;
    for (int n = 0; n <= capacity; ++n) diff = std::max(diff, std::abs(next[n] - d[n]));
    d = next;
    if (diff < 1e-12) break;
  }
  auto stat = oracles::stationary_single_server(capacity, lambda, mu);
  for (int n = 0; n <= capacity; ++n)
    CHECK(d[n] == doctest::Approx(stat[n]).epsilon(1e-8));
}

TEST_CASE("propagation agrees with a dense matrix-exponential oracle") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> rate(0.0, 2.0);
  std::uniform_real_distribution<double> time(0.05, 5.0);
  std::uniform_int_distribution<int> cap(1, 8);
  for (int c = 0; c < 100; ++c) {
    int capacity = cap(rng);
    auto start = oracles::random_distribution(rng, capacity);
    double birth = rate(rng), death = rate(rng), dt = time(rng);
    QueueDistribution d = QueueDistribution::from_probs(start);
    QueueDistribution out = propagate_birth_death(d, birth, death, dt);
    auto expect = oracles::expm_birth_death(d.probs(), birth, death, dt);
    for (int n = 0; n <= capacity; ++n)
      CHECK(std::abs(out[n] - expect[static_cast<size_t>(n)]) < 1e-8);
  }
}

TEST_CASE("propagation keeps distributions normalized and nonnegative") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> rate(0.0, 5.0);
  for (int c = 0; c < 200; ++c) {
    auto start = oracles::random_distribution(rng, 10);
    QueueDistribution d = QueueDistribution::from_probs(start);
    QueueDistribution out = propagate_birth_death(d, rate(rng), rate(rng), 0.1);
    CHECK(out.is_valid(1e-9));
  }
}
