#include "domino/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "domino/cascade.hpp"
#include "domino/errors.hpp"
#include "domino/parallel.hpp"
#include "domino/rng.hpp"
#include "domino/union_find.hpp"

namespace domino {
namespace {

constexpr double kBoundedTolerance = 1e-6;

void check(const PercolationParams& p) {
  if (!(p.delta_update > 0.0)) throw PreconditionError("percolation: Delta must be > 0");
  if (!(p.delta > 0.0)) throw PreconditionError("percolation: delta must be > 0");
  if (!(p.beta > 0.0) || !(p.d_ii > 0.0)) {
    throw PreconditionError("percolation: beta and d_ii must be > 0");
  }
  if (!(p.alpha > 1.0)) throw PreconditionError("percolation: alpha must be > 1");
}

}  // namespace

double lattice_cell(double beta, double d_ii, double delta, double alpha) {
  // Every relay moves by at least delta, so xi = delta.
  const double r_delta = affected_radius(delta, beta, d_ii, delta, PathLossModel{alpha});
  return r_delta / (2.0 * std::numbers::sqrt2);
}

double existence_density(double beta, double d_ii, double delta, double alpha) {
  if (!(delta > 0.0)) throw PreconditionError("existence_density: delta must be > 0");
  const double c = lattice_cell(beta, d_ii, delta, alpha);
  return std::numbers::ln2 / (c * c);
}

DeltaSequence delta_n_sequence(const PercolationParams& params, std::size_t n_max) {
  check(params);
  if (n_max < 10) throw PreconditionError("delta_n_sequence: n_max must be >= 10");
  const PathLossModel law{params.alpha};  // law.gain(x) == x^-alpha
  const double spread = std::pow(2.0, params.alpha);
  auto radius = [&](double xi) {
    return affected_radius(xi, params.beta, params.d_ii, params.delta, law);
  };

  DeltaSequence seq;
  seq.delta_n.reserve(n_max + 1);
  seq.r_n.reserve(n_max + 1);
  seq.delta_n.push_back(params.delta_update);
  seq.r_n.push_back(radius(params.delta_update));

  double total_r = seq.r_n[0];  // sum_{j<n} r_j
  bool finite = true;
  for (std::size_t n = 1; n <= n_max; ++n) {
    double relays = 0.0;
    double tail = 0.0;  // sum_{j=i}^{n-1} r_j, built from the back
    for (std::size_t i = n - 1; i >= 1; --i) {
      tail += seq.r_n[i];
      relays += params.delta * law.gain(tail);
    }
    const double dn = spread * (params.delta_update * law.gain(total_r) + relays + params.delta);
    if (!std::isfinite(dn)) {
      finite = false;
      break;
    }
    seq.delta_n.push_back(dn);
    seq.r_n.push_back(radius(dn));
    total_r += seq.r_n.back();
    if (!std::isfinite(total_r)) {
      finite = false;
      break;
    }
  }

  seq.r2_condition = seq.r_n.size() > 2 && seq.r_n[2] >= 2.0;
  if (finite) {
    const std::size_t n = seq.delta_n.size();
    const std::size_t w = std::max<std::size_t>(1, n / 10);
    const double prev = *std::max_element(seq.delta_n.end() - 2 * static_cast<std::ptrdiff_t>(w),
                                          seq.delta_n.end() - static_cast<std::ptrdiff_t>(w));
    const double last = *std::max_element(seq.delta_n.end() - static_cast<std::ptrdiff_t>(w),
                                          seq.delta_n.end());
    seq.bounded = std::abs(last - prev) <= kBoundedTolerance * last;
  }
  return seq;
}

double absence_density(const PercolationParams& params, std::size_t n_max) {
  const DeltaSequence seq = delta_n_sequence(params, n_max);
  if (!seq.bounded) throw DomainError("absence_density: Delta_n sequence is not bounded");
  const double r_sup = *std::max_element(seq.r_n.begin(), seq.r_n.end());
  return 1.0 / (std::numbers::pi * r_sup * r_sup);
}

PercolationBounds percolation_bounds(const PercolationParams& params, std::size_t n_max) {
  check(params);
  PercolationBounds b;
  b.params = params;
  b.r_delta = affected_radius(params.delta, params.beta, params.d_ii, params.delta,
                              PathLossModel{params.alpha});
  b.cell = lattice_cell(params.beta, params.d_ii, params.delta, params.alpha);
  b.lambda_exist = existence_density(params.beta, params.d_ii, params.delta, params.alpha);
  b.sequence = delta_n_sequence(params, n_max);
  b.r0 = b.sequence.r_n.front();
  b.r_sup = *std::max_element(b.sequence.r_n.begin(), b.sequence.r_n.end());
  b.bounded = b.sequence.bounded;
  b.r2_condition = b.sequence.r2_condition;
  b.lambda_absent = b.bounded ? 1.0 / (std::numbers::pi * b.r_sup * b.r_sup) : 0.0;
  return b;
}

nlohmann::json to_json(const PercolationBounds& b) {
  const auto& p = b.params;
  return {{"params",
           {{"Delta", p.delta_update},
            {"delta", p.delta},
            {"beta", p.beta},
            {"d_ii", p.d_ii},
            {"alpha", p.alpha}}},
          {"r_delta", b.r_delta},
          {"cell", b.cell},
          {"lambda_exist", b.lambda_exist},
          {"r0", b.r0},
          {"r_sup", b.r_sup},
          {"lambda_absent", b.bounded ? nlohmann::json(b.lambda_absent) : nlohmann::json(nullptr)},
          {"bounded", b.bounded},
          {"r2_condition", b.r2_condition},
          {"n_terms", b.sequence.delta_n.size()}};
}

// --------------------------------------------------------------------------

double edge_probability(double lambda, double cell) { return -std::expm1(-lambda * cell * cell); }

Bond cell_bond(std::size_t a, std::size_t b, std::size_t cells) {
  const std::size_t stride = cells + 1;
  if ((a + b) % 2 == 0) return {b * stride + a, (b + 1) * stride + (a + 1)};
  return {b * stride + (a + 1), (b + 1) * stride + a};
}

Point2D lattice_vertex_position(std::size_t vertex, std::size_t cells) {
  const std::size_t stride = cells + 1;
  return {static_cast<double>(vertex % stride), static_cast<double>(vertex / stride)};
}

LatticeSample lattice_percolation_sample(const LatticeConfig& config, std::uint64_t seed) {
  if (!(config.cell > 0.0) || config.cells < 1) {
    throw PreconditionError("lattice: cell and cells must be positive");
  }
  const std::size_t m = config.cells;
  const double side = config.cell * static_cast<double>(m);
  LatticeSample out;
  out.points = sample_ppp(config.lambda, Window{side, side}, seed);
  out.total_edges = m * m;

  std::vector<char> open(m * m, 0);
  for (const Point2D& pt : out.points) {
    const auto a = std::min(m - 1, static_cast<std::size_t>(pt.x / config.cell));
    const auto b = std::min(m - 1, static_cast<std::size_t>(pt.y / config.cell));
    open[b * m + a] = 1;
  }

  const std::size_t stride = m + 1;
  const std::size_t n_vertices = stride * stride;
  const std::size_t left = n_vertices;
  const std::size_t right = n_vertices + 1;
  UnionFind uf(n_vertices + 2);
  for (std::size_t b = 0; b < m; ++b) {
    for (std::size_t a = 0; a < m; ++a) {
      if (!open[b * m + a]) continue;
      ++out.open_edges;
      const Bond bond = cell_bond(a, b, m);
      uf.unite(bond.u, bond.v);
      for (std::size_t v : {bond.u, bond.v}) {
        const std::size_t x = v % stride;
        if (x == 0) uf.unite(v, left);
        if (x == m) uf.unite(v, right);
      }
    }
  }
  out.spanning = uf.find(left) == uf.find(right);

  std::unordered_map<std::size_t, std::size_t> edges_per_root;
  std::size_t largest = 0;
  for (std::size_t b = 0; b < m; ++b) {
    for (std::size_t a = 0; a < m; ++a) {
      if (!open[b * m + a]) continue;
      largest = std::max(largest, ++edges_per_root[uf.find(cell_bond(a, b, m).u)]);
    }
  }
  out.largest_cluster_fraction =
      static_cast<double>(largest) / static_cast<double>(out.total_edges);
  return out;
}

std::vector<LatticeMcRow> lattice_percolation_mc(const LatticeConfig& config, std::size_t trials,
                                                 std::uint64_t seed, unsigned workers) {
  std::vector<LatticeMcRow> rows(trials);
  const double p_theory = edge_probability(config.lambda, config.cell);
  parallel_for(trials, resolve_workers(workers), [&](std::size_t t) {
    const LatticeSample s = lattice_percolation_sample(config, derive_seed(seed, t));
    rows[t] = {t, config.lambda, p_theory, s.open_fraction(), s.spanning,
               s.largest_cluster_fraction};
  });
  return rows;
}

// --------------------------------------------------------------------------

namespace {

UnionFind disk_graph(std::span<const Point2D> points, double radius) {
  if (!(radius >= 0.0)) throw PreconditionError("disk_graph: radius must be >= 0");
  UnionFind uf(points.size());
  if (radius == 0.0 || points.size() < 2) return uf;

  auto key = [](long long cx, long long cy) {
    return (static_cast<std::uint64_t>(cx) << 32) ^ static_cast<std::uint64_t>(cy & 0xffffffffLL);
  };
  auto cell_of = [radius](double v) { return static_cast<long long>(std::floor(v / radius)); };
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < points.size(); ++i) {
    buckets[key(cell_of(points[i].x), cell_of(points[i].y))].push_back(i);
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const long long cx = cell_of(points[i].x);
    const long long cy = cell_of(points[i].y);
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        const auto it = buckets.find(key(cx + dx, cy + dy));
        if (it == buckets.end()) continue;
        for (std::size_t j : it->second) {
          if (j > i && distance(points[i], points[j]) <= radius) uf.unite(i, j);
        }
      }
    }
  }
  return uf;
}

}  // namespace

std::vector<std::size_t> disk_graph_components(std::span<const Point2D> points, double radius) {
  UnionFind uf = disk_graph(points, radius);
  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (uf.find(i) == i) sizes.push_back(uf.component_size(i));
  }
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  return sizes;
}

std::size_t disk_graph_component_of(std::span<const Point2D> points, double radius,
                                    std::size_t origin) {
  if (origin >= points.size()) throw PreconditionError("disk_graph: origin out of range");
  UnionFind uf = disk_graph(points, radius);
  return uf.component_size(origin);
}

}  // namespace domino
