#include "domino/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "domino/errors.hpp"
#include "domino/rng.hpp"

namespace domino {

double distance(Point2D a, Point2D b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

double Window::edge_distance(Point2D p) const noexcept {
  return std::min({p.x, width - p.x, p.y, height - p.y});
}

double PathLossModel::gain(double d) const {
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw DomainError("path loss undefined for distance " + std::to_string(d));
  }
  // Integer exponents are common and pow() dominates gain-matrix assembly.
  if (alpha == 3.0) return 1.0 / (d * d * d);
  if (alpha == 2.0) return 1.0 / (d * d);
  if (alpha == 4.0) {
    const double d2 = d * d;
    return 1.0 / (d2 * d2);
  }
  return std::pow(d, -alpha);
}

double path_loss(double d, const PathLossModel& model) { return model.gain(d); }

std::vector<double> Network::betas() const {
  std::vector<double> out(links.size());
  std::transform(links.begin(), links.end(), out.begin(), [](const Link& l) { return l.beta; });
  return out;
}

std::vector<Point2D> sample_ppp(double lambda, const Window& window, std::uint64_t seed) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw PreconditionError("sample_ppp: lambda must be finite and >= 0");
  }
  if (!(window.width > 0.0) || !(window.height > 0.0)) {
    throw PreconditionError("sample_ppp: window must have positive area");
  }
  std::vector<Point2D> points;
  if (lambda == 0.0) return points;

  Rng rng(seed);
  std::poisson_distribution<std::size_t> count_dist(lambda * window.area());
  const std::size_t n = count_dist(rng);
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = uniform01(rng) * window.width;
    const double y = uniform01(rng) * window.height;
    points.push_back({x, y});
  }
  return points;
}

Network build_network(std::span<const Point2D> transmitters, const NetworkParams& params,
                      std::uint64_t seed) {
  if (!(params.d_ii > 0.0)) throw PreconditionError("build_network: d_ii must be > 0");
  if (!(params.beta > 0.0)) throw PreconditionError("build_network: beta must be > 0");
  if (!(params.delta >= 0.0)) throw PreconditionError("build_network: delta must be >= 0");

  Network net;
  net.noise = params.noise;
  net.path_loss = params.path_loss;
  net.window = params.window;
  net.density = params.density;
  net.d_ii = params.d_ii;
  net.links.reserve(transmitters.size());

  Rng rng(seed);
  for (std::size_t i = 0; i < transmitters.size(); ++i) {
    const double theta = 2.0 * std::numbers::pi * uniform01(rng);
    const Point2D tx = transmitters[i];
    const Point2D rx{tx.x + params.d_ii * std::cos(theta), tx.y + params.d_ii * std::sin(theta)};
    net.links.push_back({i, tx, rx, params.beta, params.delta});
  }
  return net;
}

void validate(const Network& network) {
  if (!(network.d_ii > 0.0)) throw PreconditionError("network: d_ii must be > 0");
  if (!(network.path_loss.alpha > 0.0)) throw PreconditionError("network: alpha must be > 0");
  if (!(network.noise >= 0.0)) throw PreconditionError("network: noise must be >= 0");
  for (std::size_t i = 0; i < network.links.size(); ++i) {
    const Link& l = network.links[i];
    const std::string where = "network.links[" + std::to_string(i) + "]";
    if (l.id != i) throw PreconditionError(where + ": ids must be 0..N-1 in order");
    if (!std::isfinite(l.tx.x) || !std::isfinite(l.tx.y) || !std::isfinite(l.rx.x) ||
        !std::isfinite(l.rx.y)) {
      throw PreconditionError(where + ": non-finite coordinate");
    }
    if (!(l.beta > 0.0)) throw PreconditionError(where + ": beta must be > 0");
    if (!(l.delta >= 0.0)) throw PreconditionError(where + ": delta must be >= 0");
    if (std::abs(distance(l.tx, l.rx) - network.d_ii) > 1e-9 * network.d_ii) {
      throw PreconditionError(where + ": tx-rx distance differs from d_ii");
    }
    if (!network.window.contains(l.tx)) {
      throw PreconditionError(where + ": transmitter outside window");
    }
  }
}

nlohmann::json to_json(const Network& network) {
  nlohmann::json links = nlohmann::json::array();
  for (const Link& l : network.links) {
    links.push_back({{"id", l.id},
                     {"tx", {l.tx.x, l.tx.y}},
                     {"rx", {l.rx.x, l.rx.y}},
                     {"beta", l.beta},
                     {"delta", l.delta}});
  }
  return {{"alpha", network.path_loss.alpha},
          {"noise", network.noise},
          {"d_ii", network.d_ii},
          {"density", network.density},
          {"window", {network.window.width, network.window.height}},
          {"links", std::move(links)}};
}

Network network_from_json(const nlohmann::json& doc) {
  Network net;
  try {
    net.path_loss.alpha = doc.at("alpha").get<double>();
    net.noise = doc.at("noise").get<double>();
    net.d_ii = doc.at("d_ii").get<double>();
    net.density = doc.value("density", 0.0);
    const auto& w = doc.at("window");
    net.window = {w.at(0).get<double>(), w.at(1).get<double>()};
    for (const auto& jl : doc.at("links")) {
      Link l;
      l.id = jl.at("id").get<std::size_t>();
      l.tx = {jl.at("tx").at(0).get<double>(), jl.at("tx").at(1).get<double>()};
      l.rx = {jl.at("rx").at(0).get<double>(), jl.at("rx").at(1).get<double>()};
      l.beta = jl.at("beta").get<double>();
      l.delta = jl.at("delta").get<double>();
      net.links.push_back(l);
    }
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("network json: ") + e.what());
  }
  validate(net);
  return net;
}

}  // namespace domino
