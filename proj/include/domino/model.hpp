#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace domino {

struct Point2D {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2D&, const Point2D&) = default;
};

double distance(Point2D a, Point2D b) noexcept;

/// Axis-aligned region [0, width] x [0, height] in meters.
struct Window {
  double width = 0.0;
  double height = 0.0;

  double area() const noexcept { return width * height; }
  bool contains(Point2D p) const noexcept {
    return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
  }
  /// Distance from `p` to the nearest window edge (negative outside).
  double edge_distance(Point2D p) const noexcept;

  friend bool operator==(const Window&, const Window&) = default;
};

/// Deterministic power-law attenuation l(d) = d^-alpha.
struct PathLossModel {
  double alpha = 3.0;

  /// Throws DomainError for d <= 0 or non-finite d.
  double gain(double d) const;

  friend bool operator==(const PathLossModel&, const PathLossModel&) = default;
};

double path_loss(double d, const PathLossModel& model);

struct Link {
  std::size_t id = 0;
  Point2D tx;
  Point2D rx;
  double beta = 1.0;   // SINR target
  double delta = 0.0;  // change threshold, W

  friend bool operator==(const Link&, const Link&) = default;
};

struct NetworkParams {
  double d_ii = 10.0;
  double beta = 1.0;
  double delta = 0.01;
  double noise = 1e-8;
  PathLossModel path_loss{};
  Window window{1000.0, 1000.0};
  double density = 4e-4;
};

struct Network {
  std::vector<Link> links;
  double noise = 1e-8;
  PathLossModel path_loss{};
  Window window{};
  double density = 0.0;
  double d_ii = 10.0;

  std::size_t size() const noexcept { return links.size(); }
  /// l(d_ii), the common direct-link gain.
  double direct_gain() const { return path_loss.gain(d_ii); }
  std::vector<double> betas() const;

  friend bool operator==(const Network&, const Network&) = default;
};

/// Homogeneous PPP of intensity `lambda` (points per m^2) on `window`.
std::vector<Point2D> sample_ppp(double lambda, const Window& window, std::uint64_t seed);

/// Pairs each transmitter with a receiver at distance d_ii in a direction
/// drawn uniformly on [0, 2pi). Transmitter positions are copied unchanged.
Network build_network(std::span<const Point2D> transmitters, const NetworkParams& params,
                      std::uint64_t seed);

/// Throws PreconditionError if any Link/Network invariant is violated.
void validate(const Network& network);

nlohmann::json to_json(const Network& network);
Network network_from_json(const nlohmann::json& doc);

}  // namespace domino
