#include <doctest.h>

#include <cmath>
#include <random>

#include "domino/errors.hpp"
#include "domino/stats.hpp"

using namespace domino;

TEST_CASE("compensated sum") {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1000.0);
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  CHECK(compensated_mean(xs) == 2.5);
}

TEST_CASE("histogram") {
  const std::vector<std::size_t> xs{0, 0, 2, 5};
  const auto h = make_histogram(xs);
  CHECK(h.total == 4);
  CHECK(h.counts == std::vector<std::size_t>{2, 0, 1, 0, 0, 1});
  CHECK(h.mean() == doctest::Approx(7.0 / 4));
}

TEST_CASE("poisson fit") {
  const std::vector<std::size_t> zeros(100, 0);
  const auto z = poisson_fit(zeros);
  CHECK(z.lambda == 0.0);
  CHECK(z.degenerate);

  std::mt19937_64 rng(3);
  std::poisson_distribution<std::size_t> pois(2.7);
  std::vector<std::size_t> xs(10000);
  for (auto& x : xs) x = pois(rng);
  const auto f = poisson_fit(xs);
  CHECK(std::abs(f.lambda - 2.7) < 3.0 * std::sqrt(2.7 / 1e4));
  CHECK(f.p_value > 0.01);
  CHECK(f.dof == f.bins - 2);
  CHECK(poisson_gof(xs, 2.7).p_value > 0.01);
  CHECK(poisson_gof(xs, 3.0).p_value < 1e-6);

  std::vector<std::size_t> few(10, 1);
  CHECK_THROWS_AS(poisson_fit(few), InsufficientDataError);
}

TEST_CASE("chi square statistic by hand") {
  // 40 zeros, 60 ones against Poisson(1), n = 100
  // expected 36.8, 36.8, 18.4, then 8.0 for the open tail {3, 4, ...}
  std::vector<std::size_t> xs(40, 0);
  xs.insert(xs.end(), 60, 1);
  const auto f = poisson_gof(xs, 1.0);
  const double e0 = 100 * std::exp(-1.0);
  const double e1 = e0;
  const double e2 = e0 / 2;
  const double e3 = 100 - e0 - e1 - e2;
  const double chi = std::pow(40 - e0, 2) / e0 + std::pow(60 - e1, 2) / e1 + e2 + e3;
  CHECK(f.bins == 4);
  CHECK(f.dof == 3);
  CHECK(f.chi_square == doctest::Approx(chi).epsilon(1e-12));
  // chi-square survival, 3 dof
  const double p3 = std::erfc(std::sqrt(chi / 2)) + std::sqrt(2 * chi / M_PI) * std::exp(-chi / 2);
  CHECK(f.p_value == doctest::Approx(p3).epsilon(1e-10));
}

TEST_CASE("power law fit") {
  std::vector<double> f;
  for (int i = 1; i <= 12; ++i) f.push_back(std::pow(i, -2.0));
  const auto p = powerlaw_fit(f);
  CHECK(p.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(p.r_squared == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> scaled;
  for (double x : f) scaled.push_back(7.0 * x);
  const auto q = powerlaw_fit(scaled);
  CHECK(q.slope == doctest::Approx(p.slope).epsilon(1e-12));
  CHECK(q.r_squared == doctest::Approx(p.r_squared).epsilon(1e-12));
  CHECK(q.intercept == doctest::Approx(p.intercept + std::log(7.0)).epsilon(1e-12));

  std::vector<double> e;
  for (int i = 1; i <= 12; ++i) e.push_back(std::exp(-static_cast<double>(i)));
  CHECK(powerlaw_fit(e).r_squared < 0.9);

  std::vector<double> gaps{0.5, 0.0, 0.2, 0.0, 0.1};
  const auto g = powerlaw_fit(gaps);
  CHECK(g.n == 3);
  CHECK(g.excluded == 2);
  CHECK_THROWS_AS(powerlaw_fit(std::vector<double>{0.9, 0.1}), InsufficientDataError);
}

TEST_CASE("db increase") {
  const std::vector<double> same{0.01, 0.1};
  const auto none = power_increase_db(same, same);
  CHECK(none.mean_db_all == 0.0);
  CHECK(none.mean_db_changed == 0.0);

  const auto one = power_increase_db(std::vector<double>{0.01}, std::vector<double>{0.1});
  CHECK(one.mean_db_changed == doctest::Approx(10.0));

  const auto two = power_increase_db(same, std::vector<double>{0.06, 0.15});
  CHECK(two.per_link[0] == doctest::Approx(7.7815).epsilon(1e-4));
  CHECK(two.per_link[1] == doctest::Approx(1.7609).epsilon(1e-4));
}

TEST_CASE("round distributions") {
  const std::vector<std::vector<std::size_t>> empty(5);
  const auto e = round_count_distributions(empty);
  CHECK(e.total.counts == std::vector<std::size_t>{5});

  const std::vector<std::vector<std::size_t>> rc{{3, 1}, {2}, {}, {4, 2, 1}};
  const auto d = round_count_distributions(rc);
  double sum = 0.0;
  for (double m : d.mean_per_round) sum += m;
  CHECK(sum == doctest::Approx(d.mean_total).epsilon(1e-14));
  CHECK(d.mean_total == doctest::Approx(13.0 / 4));
  CHECK(d.per_round[2].total == 4);

  const auto fr = round_fractions(rc);
  CHECK(fr[0] == doctest::Approx((0.75 + 1.0 + 4.0 / 7) / 3));
}

TEST_CASE("ks and rank sum") {
  std::vector<double> even;
  for (int i = 0; i < 1000; ++i) even.push_back((i + 0.5) / 1000);
  CHECK(ks_uniform(even).p_value > 0.99);
  std::vector<double> squared;
  for (double u : even) squared.push_back(u * u);
  CHECK(ks_uniform(squared).p_value < 1e-6);

  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01;
  std::vector<double> x(300);
  std::vector<double> y(300);
  for (auto& v : x) v = n01(rng);
  for (auto& v : y) v = n01(rng) + 0.5;
  CHECK(rank_sum_greater(x, y).p_value < 0.01);
  CHECK(rank_sum_greater(y, x).p_value > 0.5);
}
