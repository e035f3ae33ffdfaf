#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "domino/errors.hpp"
#include "domino/percolation.hpp"
#include "domino/rng.hpp"
#include "domino/stats.hpp"

using namespace domino;

TEST_CASE("existence density") {
  const double c = 10.0 / (2.0 * std::sqrt(2.0));
  CHECK(lattice_cell(1.0, 10.0, 0.01, 3.0) == doctest::Approx(c).epsilon(1e-14));
  CHECK(existence_density(1.0, 10.0, 0.01, 3.0) == doctest::Approx(std::log(2.0) / 12.5).epsilon(1e-13));
  CHECK(std::abs(existence_density(1.0, 10.0, 0.01, 3.0) - 0.055452) < 1e-6);
  // scales as 1 / d_ii^2, does not depend on delta
  CHECK(existence_density(1.0, 20.0, 0.01, 3.0) ==
        doctest::Approx(existence_density(1.0, 10.0, 0.01, 3.0) / 4.0).epsilon(1e-13));
  CHECK(existence_density(1.0, 10.0, 0.1, 3.0) ==
        doctest::Approx(existence_density(1.0, 10.0, 0.001, 3.0)).epsilon(1e-13));
  CHECK(existence_density(2.0, 10.0, 0.01, 3.0) ==
        doctest::Approx(existence_density(1.0, 10.0, 0.01, 3.0) * std::pow(2.0, -2.0 / 3.0))
            .epsilon(1e-13));
}

TEST_CASE("delta sequence first terms") {
  const PercolationParams p;
  const auto s = delta_n_sequence(p, 100);
  CHECK(s.delta_n[0] == 1.0);
  CHECK(s.r_n[0] == doctest::Approx(46.4159).epsilon(1e-5));
  CHECK(s.delta_n[1] == doctest::Approx(8.0 * (1.0 / 1e5 + 0.01)).epsilon(1e-12));
  CHECK(s.delta_n[1] == doctest::Approx(0.08008).epsilon(1e-9));
}

TEST_CASE("delta sequence stays under the series bound") {
  Rng rng(17);
  for (int k = 0; k < 20; ++k) {
    PercolationParams p;
    p.delta = std::pow(10.0, -1.0 - 2.0 * uniform01(rng));
    p.beta = 0.5 + 2.0 * uniform01(rng);
    p.d_ii = 5.0 + 20.0 * uniform01(rng);
    p.alpha = 2.2 + 1.8 * uniform01(rng);
    const auto s = delta_n_sequence(p, 2000);
    REQUIRE(s.r2_condition);
    CHECK(s.bounded);
    // sum_{j=i}^{n-1} r_j >= (n - i) r_min
    const double r_min = *std::min_element(s.r_n.begin(), s.r_n.end());
    double zeta = 0.0;
    for (int m = 1; m < 200000; ++m) zeta += std::pow(m, -p.alpha);
    const double bound = std::pow(2.0, p.alpha) *
                         (p.delta_update / std::pow(s.r_n[0], p.alpha) + p.delta +
                          p.delta * zeta / std::pow(r_min, p.alpha));
    for (std::size_t n = 1; n < s.delta_n.size(); ++n) CHECK(s.delta_n[n] <= bound * (1.0 + 1e-9));
  }
}

TEST_CASE("absence density bracket") {
  const PercolationParams p;
  const double absent = absence_density(p);
  const double r0 = 10.0 * std::cbrt(100.0);
  CHECK(absent <= (1.0 + 1e-12) / (std::numbers::pi * r0 * r0));
  CHECK(absent < existence_density(p.beta, p.d_ii, p.delta, p.alpha));

  double prev = 0.0;
  for (double delta : {0.001, 0.01, 0.1}) {
    PercolationParams q = p;
    q.delta = delta;
    const double a = absence_density(q);
    CHECK(a > prev);
    prev = a;
  }
  const auto b = percolation_bounds(p);
  const auto j = to_json(b);
  for (const char* key : {"params", "r_delta", "cell", "lambda_exist", "r0", "r_sup", "lambda_absent", "bounded"}) {
    CHECK(j.contains(key));
  }
}

TEST_CASE("lattice bonds tile the rotated lattice") {
  const std::size_t cells = 6;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t a = 0; a < cells; ++a) {
    for (std::size_t b = 0; b < cells; ++b) {
      const Bond e = cell_bond(a, b, cells);
      CHECK(seen.insert({std::min(e.u, e.v), std::max(e.u, e.v)}).second);
      const Point2D pu = lattice_vertex_position(e.u, cells);
      const Point2D pv = lattice_vertex_position(e.v, cells);
      CHECK(distance(pu, pv) == doctest::Approx(std::sqrt(2.0)));
      CHECK((pu.x + pv.x) / 2 == doctest::Approx(a + 0.5));
      CHECK((pu.y + pv.y) / 2 == doctest::Approx(b + 0.5));
      CHECK(static_cast<long>(std::lround(pu.x + pu.y)) % 2 == 0);
    }
  }
}

TEST_CASE("empty lattice") {
  const auto s = lattice_percolation_sample({0.0, 3.5, 50}, 1);
  CHECK(s.open_edges == 0);
  CHECK_FALSE(s.spanning);
}

TEST_CASE("open edge frequency") {
  const double c = 10.0 / (2.0 * std::sqrt(2.0));
  for (double q : {0.2, 0.5, 0.8}) {
    const double lambda = -std::log1p(-q) / (c * c);
    CHECK(edge_probability(lambda, c) == doctest::Approx(q).epsilon(1e-12));
    const auto rows = lattice_percolation_mc({lambda, c, 100}, 200, 7);
    double open = 0.0;
    for (const auto& r : rows) open += r.p_edge_empirical;
    const double edges = 200.0 * 100 * 100;
    const double freq = open / 200.0;
    CHECK(std::abs(freq - q) < 3.0 * std::sqrt(q * (1 - q) / edges));
  }
}

TEST_CASE("spanning across p_c") {
  const double c = 3.5;
  auto spanning_rate = [&](double q) {
    const auto rows = lattice_percolation_mc({-std::log1p(-q) / (c * c), c, 100}, 200, 11);
    double s = 0;
    for (const auto& r : rows) s += r.spanning;
    return s / 200.0;
  };
  CHECK(spanning_rate(0.8) >= 0.95);
  CHECK(spanning_rate(0.2) <= 0.05);
}

TEST_CASE("disk graph") {
  const std::vector<Point2D> pts{{0, 0}, {1, 0}, {2, 0}, {10, 0}};
  CHECK(disk_graph_components(pts, 0.0) == std::vector<std::size_t>{1, 1, 1, 1});
  CHECK(disk_graph_components(pts, 1.0 + 1e-9) == std::vector<std::size_t>{3, 1});
  CHECK(disk_graph_component_of(pts, 1.0 + 1e-9, 3) == 1);
  CHECK(disk_graph_components(pts, 0.999) == std::vector<std::size_t>{1, 1, 1, 1});
}

TEST_CASE("origin component grows with density") {
  const Window w{300.0, 300.0};
  std::vector<double> sparse;
  std::vector<double> dense;
  for (std::size_t t = 0; t < 1000; ++t) {
    for (double lambda : {2e-3, 4e-3}) {
      auto pts = sample_ppp(lambda, w, derive_seed(lambda > 3e-3 ? 2 : 1, t));
      pts.insert(pts.begin(), Point2D{150.0, 150.0});
      const double size = static_cast<double>(disk_graph_component_of(pts, 15.0, 0));
      (lambda > 3e-3 ? dense : sparse).push_back(size);
    }
  }
  CHECK(rank_sum_greater(sparse, dense).p_value < 0.01);
}
