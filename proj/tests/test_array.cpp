#include <doctest.h>

#include <cmath>
#include <vector>

#include "domino/array_model.hpp"
#include "domino/errors.hpp"

using namespace domino;

namespace {

// plain O(n^2) recursion, no shortcuts
std::vector<double> naive(double a1, double alpha, std::size_t n) {
  std::vector<double> a{1.0};
  for (std::size_t k = 1; k <= n; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += a[j] * std::pow(static_cast<double>(k - j), -alpha);
    a.push_back(a1 * s);
  }
  return a;
}

}  // namespace

TEST_CASE("recursion terms") {
  const auto r = array_cascade(0.7, 1e-12, 3.0, 40);
  const auto ref = naive(0.7, 3.0, 40);
  REQUIRE(r.a.size() == ref.size());
  for (std::size_t n = 0; n < ref.size(); ++n) CHECK(r.a[n] == doctest::Approx(ref[n]).epsilon(1e-13));

  // second transmitter, alpha = 2: a1^2 + a1 / 4
  const auto two = array_cascade(0.3, 1e-9, 2.0, 3);
  CHECK(two.a[2] == doctest::Approx(0.3 * 0.3 + 0.3 / 4).epsilon(1e-15));
}

TEST_CASE("small steps stop immediately") {
  CHECK(array_cascade(0.01, 0.01, 3.0, 100).affected_count == 0);
  CHECK(array_cascade(0.005, 0.01, 3.0, 100).affected_count == 0);
  CHECK(array_cascade(0.005, 0.01, 3.0, 100).finite());
}

TEST_CASE("counts the terms above delta") {
  const auto ref = naive(0.5, 3.0, 200);
  std::size_t expected = 0;
  while (ref[expected + 1] > 0.01) ++expected;
  const auto r = array_cascade(0.5, 0.01, 3.0, 10000);
  CHECK(r.finite());
  CHECK(r.affected_count == expected);
}

TEST_CASE("unit coupling grows") {
  const auto r = array_cascade(1.0, 0.01, 3.0, 10000);
  REQUIRE(r.a.size() > 3);
  CHECK(r.a[2] == doctest::Approx(1.125));
  CHECK(r.a[2] > r.a[1]);
  CHECK(r.diverged());
}

TEST_CASE("critical coupling") {
  CHECK(critical_coupling(3.0) == doctest::Approx(1.0 / 1.2020569031595942).epsilon(1e-14));
  CHECK(critical_coupling(2.0) == doctest::Approx(6.0 / (M_PI * M_PI)).epsilon(1e-14));
}

TEST_CASE("thresholds are ordered and consistent") {
  const double tol = 1e-9;
  const std::size_t n_max = 20000;
  std::vector<double> stars;
  for (double delta : {0.001, 0.01, 0.1}) {
    const double s = find_divergence_threshold(delta, 3.0, tol, n_max);
    CHECK(array_cascade(s - tol, delta, 3.0, n_max).finite());
    CHECK_FALSE(array_cascade(s + tol, delta, 3.0, n_max).finite());
    CHECK(s <= critical_coupling(3.0) + tol);
    stars.push_back(s);
  }
  CHECK(stars[0] < stars[1]);
  CHECK(stars[1] < stars[2]);
}

TEST_CASE("sweep monotonicity") {
  std::vector<double> grid;
  for (int k = 1; k <= 100; ++k) grid.push_back(k / 100.0);
  const std::vector<double> deltas{0.1, 0.01, 0.001};
  const auto t = sweep_affected_counts(grid, deltas, 3.0, 5000);
  auto count = [&](std::size_t d, std::size_t k) {
    return t.counts[d][k] == SweepTable::kNotFinite ? std::numeric_limits<long long>::max()
                                                    : t.counts[d][k];
  };
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    for (std::size_t k = 1; k < grid.size(); ++k) CHECK(count(d, k) >= count(d, k - 1));
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(count(1, k) >= count(0, k));
    CHECK(count(2, k) >= count(1, k));
  }
  // every delta diverges somewhere on the grid
  for (std::size_t d = 0; d < deltas.size(); ++d) CHECK(t.counts[d].back() == SweepTable::kNotFinite);
  CHECK(sweep_csv(t).rfind("# schema: domino-array-sweep v1\n", 0) == 0);
}

TEST_CASE("array preconditions") {
  CHECK_THROWS_AS(array_cascade(0.0, 0.01, 3.0, 10), PreconditionError);
  CHECK_THROWS_AS(array_cascade(0.5, 0.0, 3.0, 10), PreconditionError);
  CHECK_THROWS_AS(find_divergence_threshold(0.01, 3.0, 0.0), PreconditionError);
}
