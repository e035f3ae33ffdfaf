#include "domino/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "domino/errors.hpp"
#include "domino/parallel.hpp"
#include "domino/rng.hpp"
#include "domino/stats.hpp"

namespace domino {

double affected_radius(double xi, double beta, double d_ii, double delta,
                       const PathLossModel& model) {
  if (delta == 0.0) throw DomainError("affected_radius: delta = 0 gives an unbounded radius");
  if (!(xi > 0.0) || !(delta > 0.0) || !(beta > 0.0) || !(d_ii > 0.0)) {
    throw DomainError("affected_radius: xi, beta, d_ii and delta must be > 0");
  }
  // beta xi (d_ii / d)^alpha > delta  <=>  d < d_ii (beta xi / delta)^(1/alpha)
  return d_ii * std::pow(beta * xi / delta, 1.0 / model.alpha);
}

std::size_t CascadeResult::total_affected() const noexcept {
  std::size_t total = 0;
  for (const auto& r : rounds) total += r.size();
  return total;
}

void validate(const CascadeConfig& config) {
  if (!(config.delta_update > 0.0) || !std::isfinite(config.delta_update)) {
    throw PreconditionError("cascade: delta_update must be finite and > 0");
  }
  if (config.threshold && !(*config.threshold >= 0.0)) {
    throw PreconditionError("cascade: threshold must be >= 0");
  }
  if (!(config.p_max > 0.0)) throw PreconditionError("cascade: p_max must be > 0");
  if (config.max_rounds < 1) throw PreconditionError("cascade: max_rounds must be >= 1");
  if (!(config.origin_guard >= 0.0)) throw PreconditionError("cascade: origin_guard must be >= 0");
}

namespace {

/// Gain rows g(j, .) computed on first use; cascades touch few transmitters.
class LazyGainRows {
 public:
  explicit LazyGainRows(const Network& net) : net_(net), rows_(net.size()) {}

  const std::vector<double>& row(std::size_t j) {
    auto& r = rows_[j];
    if (r.empty()) {
      const std::size_t n = net_.size();
      r.resize(n, 0.0);
      const Point2D tx = net_.links[j].tx;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == j) continue;
        const double d = distance(tx, net_.links[i].rx);
        if (!(d > 0.0)) {
          throw DegenerateGeometryError("transmitter " + std::to_string(j) +
                                        " coincides with receiver " + std::to_string(i));
        }
        r[i] = net_.path_loss.gain(d);
      }
    }
    return r;
  }

 private:
  const Network& net_;
  std::vector<std::vector<double>> rows_;
};

std::size_t pick_origin(const Network& network, const CascadeConfig& config, std::uint64_t seed) {
  if (config.origin) {
    if (*config.origin >= network.size()) {
      throw PreconditionError("cascade: origin " + std::to_string(*config.origin) +
                              " out of range");
    }
    return *config.origin;
  }
  std::vector<std::size_t> candidates;
  for (const Link& l : network.links) {
    if (network.window.edge_distance(l.tx) >= config.origin_guard) candidates.push_back(l.id);
  }
  if (candidates.empty()) throw PreconditionError("cascade: no link eligible as origin");
  Rng rng(seed);
  return candidates[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(candidates.size()))];
}

}  // namespace

CascadeResult run_cascade(const Network& network, const PowerVector& baseline,
                          const CascadeConfig& config, std::uint64_t seed) {
  validate(config);
  const std::size_t n = network.size();
  if (baseline.size() != n) throw PreconditionError("cascade: baseline size mismatch");
  if (baseline.kind != PowerKind::Nominal && !baseline.converged) {
    throw PreconditionError("cascade: baseline power vector has not converged");
  }

  CascadeResult result;
  result.origin = pick_origin(network, config, seed);
  result.p_before = baseline.p;

  const std::size_t x = result.origin;
  const double direct = network.direct_gain();
  std::vector<double> threshold(n);
  for (std::size_t i = 0; i < n; ++i) {
    threshold[i] = config.threshold ? *config.threshold : network.links[i].delta;
  }

  std::vector<double> p = baseline.p;
  std::vector<double> moved(n, 0.0);         // p - p_before
  std::vector<double> extra_interf(n, 0.0);  // interference change at each receiver
  std::vector<std::size_t> first_round(n, 0);
  std::vector<char> clipped(n, 0);
  LazyGainRows rows(network);

  auto propagate = [&](std::size_t j, double change) {
    const auto& g = rows.row(j);
    for (std::size_t i = 0; i < n; ++i) extra_interf[i] += g[i] * change;
  };

  auto deficit = [&](std::size_t i) {
    return network.links[i].beta * extra_interf[i] / direct - moved[i];
  };

  p[x] += config.delta_update;
  moved[x] = config.delta_update;
  propagate(x, config.delta_update);

  struct Update {
    std::size_t link;
    double change;
  };
  std::vector<Update> updates;
  for (std::size_t round = 1; round <= config.max_rounds; ++round) {
    updates.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (i == x) continue;
      const double change = deficit(i);
      if (!(std::abs(change) > threshold[i])) continue;
      const double target = p[i] + change;
      if (!std::isfinite(target)) {
        result.diverged = true;
        break;
      }
      if (target > config.p_max) {
        clipped[i] = 1;
        continue;
      }
      updates.push_back({i, change});
    }
    if (result.diverged || updates.empty()) break;

    result.rounds_executed = round;
    result.rounds.emplace_back();
    for (const Update& u : updates) {
      p[u.link] += u.change;
      moved[u.link] += u.change;
      if (first_round[u.link] == 0) {
        first_round[u.link] = round;
        result.rounds.back().push_back(u.link);
      }
    }
    for (const Update& u : updates) propagate(u.link, u.change);

    if (round == config.max_rounds) {
      for (std::size_t i = 0; i < n && !result.hit_round_cap; ++i) {
        if (i == x) continue;
        const double change = deficit(i);
        result.hit_round_cap = std::abs(change) > threshold[i] && p[i] + change <= config.p_max;
      }
    }
  }

  while (!result.rounds.empty() && result.rounds.back().empty()) result.rounds.pop_back();
  for (std::size_t i = 0; i < n; ++i) {
    if (clipped[i]) result.clipped.push_back(i);
  }
  result.truncated = result.hit_round_cap || result.diverged || !result.clipped.empty();
  result.p_after = std::move(p);
  return result;
}

// --------------------------------------------------------------------------

void validate(const EnsembleParams& params) {
  const auto& np = params.network;
  if (!(np.density >= 0.0)) throw PreconditionError("ensemble: density must be >= 0");
  if (!(np.window.width > 0.0) || !(np.window.height > 0.0)) {
    throw PreconditionError("ensemble: window must have positive area");
  }
  if (!(params.origin_guard >= 0.0) || 2.0 * params.origin_guard >= np.window.width ||
      2.0 * params.origin_guard >= np.window.height) {
    throw PreconditionError("ensemble: origin_guard must leave a non-empty interior");
  }
  if (params.baseline == BaselinePolicy::Capped &&
      (!(params.baseline_cap > 0.0) || !std::isfinite(params.baseline_cap))) {
    throw PreconditionError("ensemble: baseline_cap must be finite and > 0");
  }
}

TrialDraw draw_trial(const EnsembleParams& params, std::uint64_t seed, std::size_t trial) {
  const std::uint64_t trial_seed = derive_seed(seed, trial);
  const auto& np = params.network;
  for (std::size_t attempt = 0;; ++attempt) {
    const std::uint64_t s = derive_seed(trial_seed, attempt);

    Rng origin_rng(derive_seed(s, stream::kOrigin));
    const double g = params.origin_guard;
    std::vector<Point2D> tx;
    tx.push_back({g + uniform01(origin_rng) * (np.window.width - 2.0 * g),
                  g + uniform01(origin_rng) * (np.window.height - 2.0 * g)});
    const auto others = sample_ppp(np.density, np.window, derive_seed(s, stream::kPoints));
    tx.insert(tx.end(), others.begin(), others.end());

    TrialDraw draw;
    draw.seed = s;
    draw.redraws = attempt;
    draw.network = build_network(tx, np, derive_seed(s, stream::kAngles));

    switch (params.baseline) {
      case BaselinePolicy::Nominal:
        draw.baseline = nominal_power(draw.network);
        return draw;
      case BaselinePolicy::Capped: {
        const GainMatrix gain = gain_matrix(draw.network);
        draw.baseline =
            solve_capped_power(gain, draw.network.betas(), draw.network.noise, params.baseline_cap);
        return draw;
      }
      case BaselinePolicy::Feasible: {
        const GainMatrix gain = gain_matrix(draw.network);
        try {
          draw.baseline = solve_min_power(gain, draw.network.betas(), draw.network.noise);
          return draw;
        } catch (const InfeasibleError&) {
          if (attempt + 1 >= params.resample_budget) {
            throw InfeasibleError("trial " + std::to_string(trial) + ": resample budget of " +
                                      std::to_string(params.resample_budget) + " exhausted",
                                  0.0);
          }
        }
        break;
      }
    }
  }
}

TrialSummary summarize(std::size_t trial, const TrialDraw& draw, const CascadeResult& result) {
  TrialSummary s;
  s.trial = trial;
  s.seed = draw.seed;
  s.redraws = draw.redraws;
  s.n_links = draw.network.size();
  s.origin = result.origin;
  s.total_affected = result.total_affected();
  s.clipped_count = result.clipped.size();
  s.truncated = result.truncated;
  for (const auto& r : result.rounds) s.round_counts.push_back(r.size());

  if (s.n_links > 1) {
    // The origin's own step is exogenous and excluded.
    std::vector<double> before;
    std::vector<double> after;
    before.reserve(s.n_links - 1);
    after.reserve(s.n_links - 1);
    for (std::size_t i = 0; i < s.n_links; ++i) {
      if (i == result.origin) continue;
      before.push_back(result.p_before[i]);
      after.push_back(result.p_after[i]);
    }
    const DbIncrease db = power_increase_db(before, after);
    s.mean_db_changed = db.mean_db_changed;
    s.mean_db_all = db.mean_db_all;
  }
  return s;
}

std::vector<Ensemble> monte_carlo_cascades(const EnsembleParams& params,
                                           std::span<const CascadeConfig> configs,
                                           std::size_t trials, std::uint64_t seed,
                                           const TrialObserver& observer) {
  validate(params);
  if (trials < 1) throw PreconditionError("monte_carlo_cascades: trials must be >= 1");
  for (const auto& c : configs) {
    validate(c);
  }

  std::vector<Ensemble> out(configs.size());
  for (std::size_t c = 0; c < configs.size(); ++c) {
    out[c].config = configs[c];
    out[c].config.origin = 0;
    out[c].trials.resize(trials);
  }

  parallel_for(trials, resolve_workers(params.workers), [&](std::size_t t) {
    const TrialDraw draw = draw_trial(params, seed, t);
    std::vector<CascadeResult> results;
    results.reserve(configs.size());
    for (std::size_t c = 0; c < configs.size(); ++c) {
      results.push_back(run_cascade(draw.network, draw.baseline, out[c].config,
                                    derive_seed(draw.seed, stream::kOrigin)));
      out[c].trials[t] = summarize(t, draw, results.back());
    }
    if (observer) observer(t, draw, results);
  });

  for (auto& e : out) {
    for (const auto& s : e.trials) e.redraws += s.redraws;
  }
  return out;
}

Ensemble monte_carlo_cascades(const EnsembleParams& params, const CascadeConfig& config,
                              std::size_t trials, std::uint64_t seed) {
  return std::move(monte_carlo_cascades(params, std::span(&config, 1), trials, seed).front());
}

}  // namespace domino
