#include "domino/array_model.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/special_functions/zeta.hpp>
#include <Eigen/Core>

#include "domino/errors.hpp"
#include "domino/parallel.hpp"

namespace domino {
namespace {

constexpr std::size_t kTrailingWindow = 100;

}  // namespace

std::string to_string(ArrayOutcome outcome) {
  switch (outcome) {
    case ArrayOutcome::Finite: return "finite";
    case ArrayOutcome::Diverged: return "diverged";
    case ArrayOutcome::Unresolved: return "unresolved";
  }
  return "unknown";
}

ArrayResult array_cascade(double a1, double delta, double alpha, std::size_t n_max) {
  if (!(a1 > 0.0)) throw PreconditionError("array_cascade: a1 must be > 0");
  if (!(delta > 0.0)) throw PreconditionError("array_cascade: delta must be > 0");
  if (!(alpha > 0.0)) throw PreconditionError("array_cascade: alpha must be > 0");
  if (n_max < 1) throw PreconditionError("array_cascade: n_max must be >= 1");

  // Weights stored back to front so that sum_j a_j w_{n-j} is a contiguous
  // dot product: rev[n_max - k] = k^-alpha.
  Eigen::VectorXd rev(static_cast<Eigen::Index>(n_max + 1));
  rev(static_cast<Eigen::Index>(n_max)) = 0.0;
  for (std::size_t k = 1; k <= n_max; ++k) {
    rev(static_cast<Eigen::Index>(n_max - k)) = std::pow(static_cast<double>(k), -alpha);
  }

  ArrayResult out;
  Eigen::VectorXd a(static_cast<Eigen::Index>(n_max + 1));
  a(0) = 1.0;
  std::size_t n_done = 1;  // a_0 .. a_{n_done-1} computed, all > delta (a_0 = 1 is the step)
  double partial_zeta = 0.0;

  for (std::size_t n = 1; n <= n_max; ++n) {
    partial_zeta += rev(static_cast<Eigen::Index>(n_max - n));
    // If a1 * sum_{k<=m} k^-alpha >= 1 and the last m terms exceed delta, the
    // minimum over every later window of m terms can only grow.
    if (n > kTrailingWindow && a1 * partial_zeta >= 1.0) {
      out.outcome = ArrayOutcome::Diverged;
      break;
    }
    const auto len = static_cast<Eigen::Index>(n);
    const double an =
        a1 * a.head(len).dot(rev.segment(static_cast<Eigen::Index>(n_max - n), len));
    a(static_cast<Eigen::Index>(n)) = an;
    n_done = n + 1;
    if (!std::isfinite(an)) {
      out.outcome = ArrayOutcome::Diverged;
      break;
    }
    if (an <= delta) {
      out.outcome = ArrayOutcome::Finite;
      break;
    }
    if (n == n_max) {
      bool non_decreasing = n_done > kTrailingWindow;
      for (std::size_t k = n_done - std::min(n_done - 1, kTrailingWindow); k < n_done && non_decreasing;
           ++k) {
        non_decreasing = a(static_cast<Eigen::Index>(k)) >= a(static_cast<Eigen::Index>(k - 1));
      }
      out.outcome = non_decreasing ? ArrayOutcome::Diverged : ArrayOutcome::Unresolved;
    }
  }

  out.n_evaluated = n_done;
  out.a.assign(a.data(), a.data() + n_done);
  out.affected_count = out.outcome == ArrayOutcome::Finite ? n_done - 2 : n_done - 1;
  return out;
}

double critical_coupling(double alpha) {
  if (!(alpha > 1.0)) throw DomainError("critical_coupling: alpha must be > 1");
  return 1.0 / boost::math::zeta(alpha);
}

double find_divergence_threshold(double delta, double alpha, double tol, std::size_t n_max) {
  if (!(delta > 0.0)) throw PreconditionError("find_divergence_threshold: delta must be > 0");
  if (!(alpha > 1.0)) throw PreconditionError("find_divergence_threshold: alpha must be > 1");
  if (!(tol > 0.0)) throw PreconditionError("find_divergence_threshold: tol must be > 0");
  double lo = delta;
  double hi = 1.0;
  if (!array_cascade(lo, delta, alpha, n_max).finite()) {
    throw BracketError("find_divergence_threshold: cascade already unbounded at a1 = delta");
  }
  if (array_cascade(hi, delta, alpha, n_max).finite()) {
    throw BracketError("find_divergence_threshold: no divergence for a1 in [delta, 1]");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (array_cascade(mid, delta, alpha, n_max).finite() ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SweepTable sweep_affected_counts(std::span<const double> a1_grid, std::span<const double> deltas,
                                 double alpha, std::size_t n_max, unsigned workers) {
  if (a1_grid.empty() || deltas.empty()) {
    throw PreconditionError("sweep_affected_counts: grids must be nonempty");
  }
  SweepTable table;
  table.a1_grid.assign(a1_grid.begin(), a1_grid.end());
  table.deltas.assign(deltas.begin(), deltas.end());
  table.alpha = alpha;
  table.counts.assign(deltas.size(), std::vector<long long>(a1_grid.size()));
  table.outcomes.assign(deltas.size(), std::vector<ArrayOutcome>(a1_grid.size()));

  const std::size_t cells = deltas.size() * a1_grid.size();
  parallel_for(cells, resolve_workers(workers), [&](std::size_t cell) {
    const std::size_t d = cell / a1_grid.size();
    const std::size_t k = cell % a1_grid.size();
    const ArrayResult r = array_cascade(a1_grid[k], deltas[d], alpha, n_max);
    table.outcomes[d][k] = r.outcome;
    table.counts[d][k] =
        r.finite() ? static_cast<long long>(r.affected_count) : SweepTable::kNotFinite;
  });
  return table;
}

std::string sweep_csv(const SweepTable& table) {
  std::ostringstream out;
  out.precision(17);
  out << "# schema: domino-array-sweep v1\n";
  out << "a1,delta,alpha,affected_count,diverged\n";
  for (std::size_t d = 0; d < table.deltas.size(); ++d) {
    for (std::size_t k = 0; k < table.a1_grid.size(); ++k) {
      out << table.a1_grid[k] << ',' << table.deltas[d] << ',' << table.alpha << ','
          << table.counts[d][k] << ',' << (table.counts[d][k] == SweepTable::kNotFinite ? 1 : 0)
          << '\n';
    }
  }
  return out.str();
}

}  // namespace domino
