#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "domino/model.hpp"

namespace domino {

/// Path gains between every transmitter and every receiver.
/// Entry (j, i) is the gain from transmitter j to receiver i; the diagonal is
/// the direct gain l(d_ii).
class GainMatrix {
 public:
  GainMatrix() = default;
  explicit GainMatrix(Eigen::MatrixXd g) : g_(std::move(g)) {}

  std::size_t size() const noexcept { return static_cast<std::size_t>(g_.rows()); }
  double operator()(std::size_t from_tx, std::size_t to_rx) const {
    return g_(static_cast<Eigen::Index>(from_tx), static_cast<Eigen::Index>(to_rx));
  }
  double direct(std::size_t i) const { return (*this)(i, i); }
  const Eigen::MatrixXd& matrix() const noexcept { return g_; }

 private:
  Eigen::MatrixXd g_;
};

/// Throws DegenerateGeometryError when a transmitter sits on a receiver.
GainMatrix gain_matrix(const Network& network);

/// F(i, j) = beta_i g(j, i) / g(i, i) for j != i, zero diagonal.
Eigen::MatrixXd normalized_interference(const GainMatrix& gain, std::span<const double> beta);

/// Perron root of a non-negative square matrix. Small matrices use a dense
/// eigensolver; larger ones use power iteration on (I + A) bracketed by
/// Collatz-Wielandt bounds.
double spectral_radius(const Eigen::MatrixXd& nonnegative);

struct Feasibility {
  double spectral_radius = 0.0;
  bool feasible = true;  // spectral_radius < 1
};

Feasibility feasibility(const GainMatrix& gain, std::span<const double> beta);

enum class PowerKind {
  Minimal,  // least p with SINR_i(p) = beta_i for all i
  Capped,   // fixed point of p = min(p_max, T(p)); saturated links sit at p_max
  Nominal,  // noise-only powers, not an equilibrium of the coupled network
};

struct PowerVector {
  std::vector<double> p;
  bool converged = false;
  std::size_t iterations = 0;
  PowerKind kind = PowerKind::Minimal;
  std::size_t saturated = 0;  // links held at the cap (Capped only)

  std::size_t size() const noexcept { return p.size(); }
};

struct SolverOptions {
  double relative_tolerance = 1e-10;
  std::size_t max_iterations = 100000;
};

enum class Backend { Auto, Iterative, Direct };

/// Synchronous update p_i <- beta_i (N0 + I_i) / g_ii started from p = 0.
/// `on_iterate` (optional) sees every iterate. Does not test feasibility;
/// throws NonConvergenceError at the iteration cap.
PowerVector solve_iterative(const GainMatrix& gain, std::span<const double> beta, double noise,
                            const SolverOptions& options = {},
                            const std::function<void(std::span<const double>)>& on_iterate = {});

/// Solves (I - F) p = u, u_i = beta_i N0 / g_ii. Does not test feasibility.
PowerVector solve_direct(const GainMatrix& gain, std::span<const double> beta, double noise);

/// Minimal power allocation. Throws InfeasibleError when the spectral radius
/// of F is >= 1. `Auto` picks the direct solve for N <= 2000.
PowerVector solve_min_power(const GainMatrix& gain, std::span<const double> beta, double noise,
                            Backend backend = Backend::Auto, const SolverOptions& options = {});

/// Fixed point of p = min(p_max, T(p)). Exists and is unique for every
/// network; coincides with the minimal allocation whenever that is feasible
/// and below p_max.
PowerVector solve_capped_power(const GainMatrix& gain, std::span<const double> beta, double noise,
                               double p_max, const SolverOptions& options = {});

/// Noise-limited powers beta_i N0 / g_ii, tagged PowerKind::Nominal.
PowerVector nominal_power(const Network& network);

std::vector<double> sinr(const GainMatrix& gain, std::span<const double> p, double noise);

}  // namespace domino
