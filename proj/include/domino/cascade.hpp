#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "domino/model.hpp"
#include "domino/powerctl.hpp"

namespace domino {

/// Largest distance at which an accumulated change `xi` forces a link to
/// move: r = d_ii (beta xi / delta)^(1/alpha). Throws DomainError for
/// delta == 0 (unbounded radius) or non-positive xi.
double affected_radius(double xi, double beta, double d_ii, double delta,
                       const PathLossModel& model);

struct CascadeConfig {
  double delta_update = 1.0;          // exogenous step at the origin, W
  std::optional<double> threshold;    // common delta; per-link Link::delta when unset
  double p_max = 1.0;                 // may be +inf (no clipping)
  std::size_t max_rounds = 10000;
  std::optional<std::size_t> origin;  // uniformly random when unset
  double origin_guard = 0.0;          // random origins keep this distance from the window edge
};

void validate(const CascadeConfig& config);

struct CascadeResult {
  std::size_t origin = 0;
  /// rounds[k] holds the links first updated in round k + 1. Interior rounds
  /// may be empty (only re-updates); the last one never is.
  std::vector<std::vector<std::size_t>> rounds;
  std::vector<double> p_before;
  std::vector<double> p_after;
  std::vector<std::size_t> clipped;  // links that wanted to move past p_max, ascending
  bool hit_round_cap = false;
  bool diverged = false;  // a power became non-finite (uncapped runaway)
  bool truncated = false;  // round cap, divergence, or any clipping
  std::size_t rounds_executed = 0;

  std::size_t total_affected() const noexcept;
  std::size_t first_round_size() const noexcept { return rounds.empty() ? 0 : rounds[0].size(); }
};

/// Propagates a single power step through a converged network in
/// synchronous rounds.
///
/// Round 0 raises the origin by `delta_update` and freezes it. In each later
/// round every other link computes how far its requirement has moved since
/// the baseline beyond its own movement,
///   deficit_i = beta_i * dI_i / g_ii - dp_i,
/// where dI_i is the interference change at receiver i. A link whose
/// |deficit_i| exceeds its threshold moves by deficit_i, unless that would
/// exceed p_max, in which case it holds its power and is recorded as clipped.
/// For every link that met its target in the baseline this is exactly
/// "required power minus current power".
///
/// The baseline must be a converged Minimal or Capped solution, or Nominal
/// (noise-only powers). Base powers only enter through p_max clipping.
CascadeResult run_cascade(const Network& network, const PowerVector& baseline,
                          const CascadeConfig& config, std::uint64_t seed);

// --------------------------------------------------------------------------
// Monte Carlo ensembles

enum class BaselinePolicy {
  Capped,    // fixed point capped at baseline_cap; always exists
  Feasible,  // unconstrained minimal allocation; infeasible draws re-drawn
  Nominal,   // noise-only powers, no equilibrium solve
};

struct EnsembleParams {
  NetworkParams network{};
  BaselinePolicy baseline = BaselinePolicy::Nominal;
  double baseline_cap = 1.0;
  std::size_t resample_budget = 1000;  // per trial, Feasible policy only
  /// The origin link is added at a uniform position at least this far from
  /// the window edge (Palm version of the PPP).
  double origin_guard = 0.0;
  unsigned workers = 0;  // 0 -> $DOMINO_WORKERS or 1
};

void validate(const EnsembleParams& params);

struct TrialDraw {
  std::uint64_t seed = 0;      // seed of the accepted attempt
  std::size_t redraws = 0;     // infeasible attempts discarded before it
  Network network;             // origin link has id 0
  PowerVector baseline;
};

/// Network and baseline for trial `trial` of an ensemble seeded by `seed`.
TrialDraw draw_trial(const EnsembleParams& params, std::uint64_t seed, std::size_t trial);

struct TrialSummary {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::size_t redraws = 0;
  std::size_t n_links = 0;
  std::size_t origin = 0;
  std::size_t total_affected = 0;
  std::size_t clipped_count = 0;
  bool truncated = false;
  std::vector<std::size_t> round_counts;  // |A_1|, ..., |A_K|
  double mean_db_changed = 0.0;
  double mean_db_all = 0.0;

  std::size_t rounds() const noexcept { return round_counts.size(); }
  std::size_t first_round() const noexcept { return round_counts.empty() ? 0 : round_counts[0]; }
};

TrialSummary summarize(std::size_t trial, const TrialDraw& draw, const CascadeResult& result);

struct Ensemble {
  CascadeConfig config;
  std::vector<TrialSummary> trials;
  std::size_t redraws = 0;
};

using TrialObserver =
    std::function<void(std::size_t trial, const TrialDraw&, std::span<const CascadeResult>)>;

/// Runs `trials` independent trials; every config is applied to the same
/// network draws. Output is a pure function of (params, configs, trials,
/// seed) regardless of worker count. The observer, if given, may be called
/// concurrently from worker threads.
std::vector<Ensemble> monte_carlo_cascades(const EnsembleParams& params,
                                           std::span<const CascadeConfig> configs,
                                           std::size_t trials, std::uint64_t seed,
                                           const TrialObserver& observer = {});

Ensemble monte_carlo_cascades(const EnsembleParams& params, const CascadeConfig& config,
                              std::size_t trials, std::uint64_t seed);

}  // namespace domino
