#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "domino/errors.hpp"
#include "domino/model.hpp"
#include "domino/rng.hpp"

using namespace domino;

TEST_CASE("path loss values") {
  const PathLossModel law{3.0};
  CHECK(path_loss(1.0, law) == 1.0);
  CHECK(path_loss(2.0, law) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(path_loss(46.42, law) == doctest::Approx(1.0e-5).epsilon(1e-3));
  CHECK(path_loss(7.0, PathLossModel{2.5}) == doctest::Approx(std::pow(7.0, -2.5)).epsilon(1e-14));
  CHECK_THROWS_AS(path_loss(0.0, law), DomainError);
  CHECK_THROWS_AS(path_loss(-1.0, law), DomainError);
  CHECK_THROWS_AS(path_loss(std::nan(""), law), DomainError);
}

TEST_CASE("path loss is decreasing") {
  const PathLossModel law{3.0};
  double prev = path_loss(0.5, law);
  for (double d = 1.0; d < 500.0; d *= 1.37) {
    const double g = path_loss(d, law);
    CHECK(g < prev);
    prev = g;
  }
}

TEST_CASE("ppp sampling") {
  const Window w{1000.0, 1000.0};
  CHECK(sample_ppp(0.0, w, 7).empty());

  const auto a = sample_ppp(4e-4, w, 11);
  const auto b = sample_ppp(4e-4, w, 11);
  CHECK(a == b);
  for (const auto& p : a) CHECK(w.contains(p));

  // mean count over many seeds vs lambda * area
  const int seeds = 10000;
  double sum = 0.0;
  for (int s = 0; s < seeds; ++s) sum += static_cast<double>(sample_ppp(4e-4, w, derive_seed(99, s)).size());
  const double mean = sum / seeds;
  const double se = std::sqrt(400.0 / seeds);
  CHECK(std::abs(mean - 400.0) < 3.0 * se);
}

TEST_CASE("build network geometry") {
  NetworkParams params;
  const std::vector<Point2D> one{{5.0, 5.0}};
  CHECK(build_network(one, params, 1).size() == 1);

  const auto pts = sample_ppp(4e-4, params.window, 21);
  const auto net = build_network(pts, params, 22);
  REQUIRE(net.size() == pts.size());
  for (const auto& l : net.links) CHECK(distance(l.tx, l.rx) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK_NOTHROW(validate(net));
}

TEST_CASE("receiver angles are uniform") {
  // 10^4 links, KS distance against U[0, 2pi), computed here directly
  std::vector<Point2D> pts(10000);
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {static_cast<double>(i), 0.0};
  const auto net = build_network(pts, NetworkParams{}, 5);
  std::vector<double> u;
  for (const auto& l : net.links) {
    double theta = std::atan2(l.rx.y - l.tx.y, l.rx.x - l.tx.x);
    if (theta < 0) theta += 2 * std::numbers::pi;
    u.push_back(theta / (2 * std::numbers::pi));
  }
  std::sort(u.begin(), u.end());
  double d = 0.0;
  const double n = static_cast<double>(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    d = std::max({d, (i + 1) / n - u[i], u[i] - i / n});
  }
  // asymptotic 1% critical value
  CHECK(d * std::sqrt(n) < 1.628);
}

TEST_CASE("network json round trip") {
  NetworkParams params;
  params.window = {300.0, 200.0};
  const auto net = build_network(sample_ppp(1e-3, params.window, 3), params, 4);
  const auto back = network_from_json(to_json(net));
  CHECK(back == net);
}

TEST_CASE("derived seeds differ") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(5, 9) == derive_seed(5, 9));
}
