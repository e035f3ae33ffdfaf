#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "domino/model.hpp"

namespace domino {

struct PercolationParams {
  double delta_update = 1.0;  // initial step
  double delta = 0.01;        // threshold
  double beta = 1.0;
  double d_ii = 10.0;
  double alpha = 3.0;
};

/// Density above which the lattice argument guarantees an infinite cluster:
/// cells of side c = r(delta) / (2 sqrt 2) are open with probability
/// 1 - exp(-lambda c^2) >= 1/2 iff lambda >= ln 2 / c^2.
double existence_density(double beta, double d_ii, double delta, double alpha);

/// Side of the lattice cell used by the existence bound.
double lattice_cell(double beta, double d_ii, double delta, double alpha);

struct DeltaSequence {
  std::vector<double> delta_n;  // Delta_0 = initial step, Delta_1, ...
  std::vector<double> r_n;      // r_n = affected_radius(Delta_n)
  bool bounded = false;
  bool r2_condition = false;    // r_2 >= 2 (the series-comparison premise)
};

inline constexpr std::size_t kDeltaSequenceTerms = 10000;

/// Worst-case accumulated change seen by the n-th relay when each round
/// affects a single node at the expected distance r/2:
///   Delta_n = 2^alpha ( Delta / (sum_{j<n} r_j)^alpha
///                       + sum_{i=1}^{n-1} delta / (sum_{j=i}^{n-1} r_j)^alpha + delta ).
/// `bounded` is set when the last 10% of terms move by < 1e-6 relative.
DeltaSequence delta_n_sequence(const PercolationParams& params,
                               std::size_t n_max = kDeltaSequenceTerms);

struct PercolationBounds {
  PercolationParams params;
  double r_delta = 0.0;
  double cell = 0.0;
  double lambda_exist = 0.0;
  double r0 = 0.0;
  double r_sup = 0.0;
  double lambda_absent = 0.0;
  bool bounded = false;
  bool r2_condition = false;
  DeltaSequence sequence;
};

/// 1 / (pi r_sup^2), r_sup the largest computed r_n: below it every round of
/// the branching process has fewer than one expected offspring. Throws
/// DomainError if the Delta_n sequence is unbounded.
double absence_density(const PercolationParams& params, std::size_t n_max = kDeltaSequenceTerms);

PercolationBounds percolation_bounds(const PercolationParams& params,
                                     std::size_t n_max = kDeltaSequenceTerms);

nlohmann::json to_json(const PercolationBounds& bounds);

// --------------------------------------------------------------------------
// Lattice mapping
//
// The window is tiled by cells x cells squares of side c. Square (a, b)
// carries the diagonal joining its two corners of even parity, so the
// squares are exactly the bonds of a square lattice (rotated by 45 degrees,
// spacing c sqrt 2) on the even corners. A bond is open iff its square holds
// at least one point. Bonds sharing a vertex come from squares sharing a
// corner, whose points lie within 2 sqrt 2 c of each other.

struct LatticeConfig {
  double lambda = 0.0;
  double cell = 1.0;        // c, meters
  std::size_t cells = 100;  // squares per side
};

struct LatticeSample {
  std::size_t open_edges = 0;
  std::size_t total_edges = 0;
  bool spanning = false;             // open cluster touching left and right sides
  double largest_cluster_fraction = 0.0;  // open edges in the largest cluster / total edges
  std::vector<Point2D> points;

  double open_fraction() const {
    return total_edges ? static_cast<double>(open_edges) / static_cast<double>(total_edges) : 0.0;
  }
};

double edge_probability(double lambda, double cell);

/// Square (a, b) -> its bond as a pair of lattice-vertex indices.
struct Bond {
  std::size_t u;
  std::size_t v;
};
Bond cell_bond(std::size_t a, std::size_t b, std::size_t cells);
/// Corner index -> position in units of c.
Point2D lattice_vertex_position(std::size_t vertex, std::size_t cells);

LatticeSample lattice_percolation_sample(const LatticeConfig& config, std::uint64_t seed);

struct LatticeMcRow {
  std::size_t trial = 0;
  double lambda = 0.0;
  double p_edge_theory = 0.0;
  double p_edge_empirical = 0.0;
  bool spanning = false;
  double largest_cluster_fraction = 0.0;
};

std::vector<LatticeMcRow> lattice_percolation_mc(const LatticeConfig& config, std::size_t trials,
                                                 std::uint64_t seed, unsigned workers = 0);

// --------------------------------------------------------------------------

/// Component sizes (descending) of the graph joining points within `radius`.
std::vector<std::size_t> disk_graph_components(std::span<const Point2D> points, double radius);

/// Size of the component containing points[origin].
std::size_t disk_graph_component_of(std::span<const Point2D> points, double radius,
                                    std::size_t origin);

}  // namespace domino
