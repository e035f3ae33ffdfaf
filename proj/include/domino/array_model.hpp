#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace domino {

// Deterministic line model: transmitter 0 steps its power by one unit and
// the change walks down an infinite, equally spaced array. With coupling
// a1 = l(d01)/l(d) and distances d_{0,n} = n d01, transmitter n sees
//   a_n = a1 * sum_{j<n} a_j / (n - j)^alpha,   a_0 = 1,
// and moves iff a_n > delta.

enum class ArrayOutcome {
  Finite,      // some a_n <= delta within n_max terms
  Diverged,    // provably never drops below delta, or still growing at n_max
  Unresolved,  // above delta but decaying at n_max
};

struct ArrayResult {
  std::vector<double> a;            // a_0, a_1, ..., a_{n_evaluated - 1}
  std::size_t affected_count = 0;   // transmitters 1..n that moved (lower bound unless Finite)
  ArrayOutcome outcome = ArrayOutcome::Finite;
  std::size_t n_evaluated = 0;

  bool diverged() const noexcept { return outcome == ArrayOutcome::Diverged; }
  bool finite() const noexcept { return outcome == ArrayOutcome::Finite; }
};

std::string to_string(ArrayOutcome outcome);

ArrayResult array_cascade(double a1, double delta, double alpha, std::size_t n_max);

/// Limit of the divergence threshold as n_max -> infinity: 1 / zeta(alpha).
double critical_coupling(double alpha);

inline constexpr std::size_t kThresholdNMax = 100000;

/// Bisection on [delta, 1] for the smallest a1 whose cascade is not Finite
/// within n_max terms. Throws BracketError if a1 = 1 is still Finite.
double find_divergence_threshold(double delta, double alpha, double tol,
                                 std::size_t n_max = kThresholdNMax);

struct SweepTable {
  std::vector<double> a1_grid;
  std::vector<double> deltas;
  double alpha = 3.0;
  /// counts[d][k] for deltas[d], a1_grid[k]; kNotFinite when the cascade
  /// did not terminate within n_max.
  std::vector<std::vector<long long>> counts;
  std::vector<std::vector<ArrayOutcome>> outcomes;

  static constexpr long long kNotFinite = -1;
};

SweepTable sweep_affected_counts(std::span<const double> a1_grid, std::span<const double> deltas,
                                 double alpha, std::size_t n_max = 10000, unsigned workers = 0);

/// CSV with columns a1,delta,alpha,affected_count,diverged.
std::string sweep_csv(const SweepTable& table);

}  // namespace domino
