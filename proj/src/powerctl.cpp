#include "domino/powerctl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Eigenvalues>

#include "domino/errors.hpp"

namespace domino {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr std::size_t kDenseEigenMax = 64;
constexpr double kSpectralTolerance = 1e-9;
constexpr std::size_t kSpectralMaxIterations = 10000;
constexpr std::size_t kDirectMax = 2000;

void check_sizes(const GainMatrix& gain, std::span<const double> beta) {
  if (beta.size() != gain.size()) {
    throw PreconditionError("beta has " + std::to_string(beta.size()) + " entries, gain matrix " +
                            std::to_string(gain.size()));
  }
}

VectorXd noise_term(const GainMatrix& gain, std::span<const double> beta, double noise) {
  VectorXd u(static_cast<Index>(gain.size()));
  for (std::size_t i = 0; i < gain.size(); ++i) {
    u(static_cast<Index>(i)) = beta[i] * noise / gain.direct(i);
  }
  return u;
}

bool relative_change_below(const VectorXd& next, const VectorXd& prev, double tol) {
  for (Index i = 0; i < next.size(); ++i) {
    const double scale = std::max(std::abs(next(i)), std::abs(prev(i)));
    if (scale == 0.0) continue;
    if (std::abs(next(i) - prev(i)) > tol * scale) return false;
  }
  return true;
}

std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

GainMatrix gain_matrix(const Network& network) {
  const std::size_t n = network.size();
  const double direct = network.direct_gain();
  MatrixXd g(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const Point2D rx = network.links[i].rx;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        g(static_cast<Index>(j), static_cast<Index>(i)) = direct;
        continue;
      }
      const double d = distance(network.links[j].tx, rx);
      if (!(d > 0.0)) {
        throw DegenerateGeometryError("transmitter " + std::to_string(j) +
                                      " coincides with receiver " + std::to_string(i));
      }
      g(static_cast<Index>(j), static_cast<Index>(i)) = network.path_loss.gain(d);
    }
  }
  return GainMatrix(std::move(g));
}

MatrixXd normalized_interference(const GainMatrix& gain, std::span<const double> beta) {
  check_sizes(gain, beta);
  const MatrixXd& g = gain.matrix();
  const Index n = g.rows();
  MatrixXd f(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      f(i, j) = (i == j) ? 0.0 : beta[static_cast<std::size_t>(i)] * g(j, i) / g(i, i);
    }
  }
  return f;
}

double spectral_radius(const MatrixXd& a) {
  const Index n = a.rows();
  if (n == 0) return 0.0;
  if (static_cast<std::size_t>(n) <= kDenseEigenMax) {
    Eigen::EigenSolver<MatrixXd> solver(a, /*computeEigenvectors=*/false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  // For non-negative A and positive x: min_i (Bx)_i/x_i <= rho(B) <= max_i (Bx)_i/x_i.
  // B = I + A is primitive when A is irreducible, so the bracket closes.
  VectorXd x = VectorXd::Ones(n);
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < kSpectralMaxIterations; ++it) {
    VectorXd y = x + a * x;
    const VectorXd ratio = y.cwiseQuotient(x);
    lower = std::max(lower, ratio.minCoeff());
    upper = std::min(upper, ratio.maxCoeff());
    if (upper - lower <= kSpectralTolerance * upper) break;
    x = y / y.maxCoeff();
    // Components that underflow to zero break the ratio bounds.
    x = x.cwiseMax(std::numeric_limits<double>::min());
  }
  return 0.5 * (lower + upper) - 1.0;
}

Feasibility feasibility(const GainMatrix& gain, std::span<const double> beta) {
  const double rho = spectral_radius(normalized_interference(gain, beta));
  return {rho, rho < 1.0};
}

PowerVector solve_iterative(const GainMatrix& gain, std::span<const double> beta, double noise,
                            const SolverOptions& options,
                            const std::function<void(std::span<const double>)>& on_iterate) {
  check_sizes(gain, beta);
  const MatrixXd f = normalized_interference(gain, beta);
  const VectorXd u = noise_term(gain, beta, noise);
  VectorXd p = VectorXd::Zero(u.size());
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    VectorXd next = u + f * p;
    if (!next.allFinite()) {
      throw NonConvergenceError("iterative power update overflowed", it);
    }
    if (on_iterate) on_iterate({next.data(), static_cast<std::size_t>(next.size())});
    const bool done = relative_change_below(next, p, options.relative_tolerance);
    p = std::move(next);
    if (done) return {to_std(p), true, it, PowerKind::Minimal, 0};
  }
  throw NonConvergenceError("iterative power update hit the iteration cap", options.max_iterations);
}

PowerVector solve_direct(const GainMatrix& gain, std::span<const double> beta, double noise) {
  check_sizes(gain, beta);
  const Index n = static_cast<Index>(gain.size());
  const MatrixXd system = MatrixXd::Identity(n, n) - normalized_interference(gain, beta);
  const VectorXd p = system.partialPivLu().solve(noise_term(gain, beta, noise));
  return {to_std(p), true, 1, PowerKind::Minimal, 0};
}

PowerVector solve_min_power(const GainMatrix& gain, std::span<const double> beta, double noise,
                            Backend backend, const SolverOptions& options) {
  const Feasibility feas = feasibility(gain, beta);
  if (!feas.feasible) {
    throw InfeasibleError("SINR targets infeasible: spectral radius " +
                              std::to_string(feas.spectral_radius) + " >= 1",
                          feas.spectral_radius);
  }
  if (backend == Backend::Auto) {
    backend = gain.size() <= kDirectMax ? Backend::Direct : Backend::Iterative;
  }
  return backend == Backend::Direct ? solve_direct(gain, beta, noise)
                                    : solve_iterative(gain, beta, noise, options);
}

PowerVector solve_capped_power(const GainMatrix& gain, std::span<const double> beta, double noise,
                               double p_max, const SolverOptions& options) {
  check_sizes(gain, beta);
  if (!(p_max > 0.0) || !std::isfinite(p_max)) {
    throw PreconditionError("solve_capped_power: p_max must be finite and > 0");
  }
  const MatrixXd f = normalized_interference(gain, beta);
  const VectorXd u = noise_term(gain, beta, noise);
  const Index n = u.size();

  auto count_saturated = [&](const VectorXd& p) {
    return static_cast<std::size_t>((p.array() >= p_max).count());
  };

  // Candidate from an active set: links in `saturated` pinned at p_max, the
  // rest solved exactly. Accepted only if it is a fixed point of the capped
  // map, which is unique.
  auto try_active_set = [&](const std::vector<Index>& saturated,
                            const std::vector<Index>& free) -> std::optional<VectorXd> {
    VectorXd q = VectorXd::Constant(n, p_max);
    if (!free.empty()) {
      const Index m = static_cast<Index>(free.size());
      MatrixXd system = -f(free, free);
      system.diagonal().array() += 1.0;
      VectorXd rhs = u(free);
      if (!saturated.empty()) rhs += f(free, saturated) * VectorXd::Constant(
                                                              static_cast<Index>(saturated.size()), p_max);
      const VectorXd x = system.partialPivLu().solve(rhs);
      if (!x.allFinite()) return std::nullopt;
      for (Index k = 0; k < m; ++k) {
        if (x(k) < 0.0 || x(k) > p_max) return std::nullopt;
        q(free[static_cast<std::size_t>(k)]) = x(k);
      }
    }
    const VectorXd demand = u + f * q;
    for (Index i : saturated) {
      if (demand(i) < p_max * (1.0 - 1e-12)) return std::nullopt;
    }
    for (Index i : free) {
      if (std::abs(demand(i) - q(i)) > 1e-9 * std::max(q(i), std::numeric_limits<double>::min())) {
        return std::nullopt;
      }
    }
    return q;
  };

  VectorXd p = VectorXd::Zero(n);
  std::vector<Index> last_tried;
  bool tried_once = false;
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    VectorXd next = (u + f * p).cwiseMin(p_max);
    const bool done = relative_change_below(next, p, options.relative_tolerance);
    p = std::move(next);
    if (done) return {to_std(p), true, it, PowerKind::Capped, count_saturated(p)};

    if (it % 16 == 0) {
      std::vector<Index> saturated;
      std::vector<Index> free;
      for (Index i = 0; i < n; ++i) (p(i) >= p_max ? saturated : free).push_back(i);
      if (!tried_once || saturated != last_tried) {
        tried_once = true;
        last_tried = saturated;
        if (auto q = try_active_set(saturated, free)) {
          return {to_std(*q), true, it, PowerKind::Capped, saturated.size()};
        }
      }
    }
  }
  throw NonConvergenceError("capped power update hit the iteration cap", options.max_iterations);
}

PowerVector nominal_power(const Network& network) {
  PowerVector out;
  out.p.resize(network.size());
  const double direct = network.direct_gain();
  for (std::size_t i = 0; i < network.size(); ++i) {
    out.p[i] = network.links[i].beta * network.noise / direct;
  }
  out.converged = false;
  out.kind = PowerKind::Nominal;
  return out;
}

std::vector<double> sinr(const GainMatrix& gain, std::span<const double> p, double noise) {
  if (p.size() != gain.size()) throw PreconditionError("sinr: power vector size mismatch");
  const MatrixXd& g = gain.matrix();
  const Eigen::Map<const VectorXd> pv(p.data(), static_cast<Index>(p.size()));
  std::vector<double> out(p.size());
  for (Index i = 0; i < g.rows(); ++i) {
    double interference = 0.0;
    for (Index j = 0; j < g.rows(); ++j) {
      if (j != i) interference += g(j, i) * pv(j);
    }
    out[static_cast<std::size_t>(i)] = g(i, i) * pv(i) / (noise + interference);
  }
  return out;
}

}  // namespace domino
