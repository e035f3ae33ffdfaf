#include "domino/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "domino/errors.hpp"

namespace domino {
namespace {

constexpr std::size_t kMinPoissonSamples = 30;
constexpr double kMinExpected = 5.0;

FitReport chi_square_poisson(std::span<const std::size_t> samples, double lambda,
                             std::size_t fitted_params) {
  FitReport fit;
  fit.kind = FitKind::Poisson;
  fit.n = samples.size();
  fit.lambda = lambda;
  if (lambda <= 0.0) {
    fit.degenerate = true;
    return fit;
  }

  const Histogram hist = make_histogram(samples);
  const double n = static_cast<double>(samples.size());
  const boost::math::poisson_distribution<double> law(lambda);
  const std::size_t max_observed = hist.counts.empty() ? 0 : hist.counts.size() - 1;
  const auto last = std::max<std::size_t>(
      max_observed, static_cast<std::size_t>(std::ceil(lambda + 10.0 * std::sqrt(lambda) + 10.0)));

  std::vector<double> expected;
  std::vector<double> observed;
  double cur_e = 0.0;
  double cur_o = 0.0;
  for (std::size_t k = 0; k <= last; ++k) {
    cur_e += n * boost::math::pdf(law, static_cast<double>(k));
    cur_o += k < hist.counts.size() ? static_cast<double>(hist.counts[k]) : 0.0;
    const double tail = n * boost::math::cdf(boost::math::complement(law, static_cast<double>(k)));
    if (cur_e >= kMinExpected && tail >= kMinExpected) {
      expected.push_back(cur_e);
      observed.push_back(cur_o);
      cur_e = cur_o = 0.0;
    }
  }
  // Open-ended last bin: everything above the last closed bin.
  cur_e += n * boost::math::cdf(boost::math::complement(law, static_cast<double>(last)));
  if (cur_e >= kMinExpected || expected.empty()) {
    expected.push_back(cur_e);
    observed.push_back(cur_o);
  } else {
    expected.back() += cur_e;
    observed.back() += cur_o;
  }

  fit.bins = expected.size();
  if (fit.bins <= fitted_params + 1) {
    fit.degenerate = true;
    return fit;
  }
  double chi2 = 0.0;
  for (std::size_t b = 0; b < expected.size(); ++b) {
    const double diff = observed[b] - expected[b];
    chi2 += diff * diff / expected[b];
  }
  fit.chi_square = chi2;
  fit.dof = fit.bins - 1 - fitted_params;
  const boost::math::chi_squared_distribution<double> ref(static_cast<double>(fit.dof));
  fit.p_value = boost::math::cdf(boost::math::complement(ref, chi2));
  return fit;
}

}  // namespace

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

double compensated_mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value() / static_cast<double>(xs.size());
}

double Histogram::mean() const {
  if (total == 0) return 0.0;
  CompensatedSum s;
  for (std::size_t v = 0; v < counts.size(); ++v) {
    s.add(static_cast<double>(v) * static_cast<double>(counts[v]));
  }
  return s.value() / static_cast<double>(total);
}

Histogram make_histogram(std::span<const std::size_t> samples) {
  Histogram h;
  h.total = samples.size();
  if (samples.empty()) return h;
  h.counts.assign(*std::max_element(samples.begin(), samples.end()) + 1, 0);
  for (std::size_t s : samples) ++h.counts[s];
  return h;
}

FitReport poisson_fit(std::span<const std::size_t> samples) {
  if (samples.size() < kMinPoissonSamples) {
    throw InsufficientDataError("poisson_fit needs at least 30 samples, got " +
                                std::to_string(samples.size()));
  }
  CompensatedSum s;
  for (std::size_t v : samples) s.add(static_cast<double>(v));
  const double lambda = s.value() / static_cast<double>(samples.size());
  return chi_square_poisson(samples, lambda, 1);
}

FitReport poisson_gof(std::span<const std::size_t> samples, double lambda) {
  if (samples.size() < kMinPoissonSamples) {
    throw InsufficientDataError("poisson_gof needs at least 30 samples, got " +
                                std::to_string(samples.size()));
  }
  if (!(lambda >= 0.0)) throw DomainError("poisson_gof: lambda must be >= 0");
  return chi_square_poisson(samples, lambda, 0);
}

FitReport powerlaw_fit(std::span<const double> round_fractions) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < round_fractions.size(); ++i) {
    if (round_fractions[i] > 0.0) {
      xs.push_back(std::log(static_cast<double>(i + 1)));
      ys.push_back(std::log(round_fractions[i]));
    }
  }
  if (xs.size() < 3) {
    throw InsufficientDataError("powerlaw_fit needs at least 3 rounds with nonzero mass");
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  FitReport fit;
  fit.kind = FitKind::PowerLaw;
  fit.n = xs.size();
  fit.excluded = round_fractions.size() - xs.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double r = ys[k] - (fit.intercept + fit.slope * xs[k]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

DbIncrease power_increase_db(std::span<const double> before, std::span<const double> after) {
  if (before.size() != after.size()) {
    throw PreconditionError("power_increase_db: vectors differ in length");
  }
  DbIncrease out;
  out.per_link.resize(before.size());
  CompensatedSum all;
  CompensatedSum changed;
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (!(before[i] > 0.0) || !(after[i] > 0.0)) {
      throw DomainError("power_increase_db: powers must be strictly positive");
    }
    const double db = 10.0 * std::log10(after[i] / before[i]);
    out.per_link[i] = db;
    all.add(db);
    if (after[i] != before[i]) {
      changed.add(db);
      ++out.changed;
    }
  }
  if (!before.empty()) out.mean_db_all = all.value() / static_cast<double>(before.size());
  if (out.changed > 0) out.mean_db_changed = changed.value() / static_cast<double>(out.changed);
  return out;
}

RoundDistributions round_count_distributions(std::span<const std::vector<std::size_t>> round_counts) {
  RoundDistributions out;
  std::size_t max_rounds = 0;
  for (const auto& rc : round_counts) max_rounds = std::max(max_rounds, rc.size());

  std::vector<std::size_t> totals;
  totals.reserve(round_counts.size());
  for (const auto& rc : round_counts) {
    totals.push_back(std::accumulate(rc.begin(), rc.end(), std::size_t{0}));
  }
  out.total = make_histogram(totals);
  out.mean_total = out.total.mean();

  std::vector<std::size_t> column(round_counts.size());
  for (std::size_t k = 0; k < max_rounds; ++k) {
    for (std::size_t t = 0; t < round_counts.size(); ++t) {
      column[t] = k < round_counts[t].size() ? round_counts[t][k] : 0;
    }
    out.per_round.push_back(make_histogram(column));
    out.mean_per_round.push_back(out.per_round.back().mean());
  }
  return out;
}

std::vector<double> round_fractions(std::span<const std::vector<std::size_t>> round_counts) {
  std::size_t max_rounds = 0;
  for (const auto& rc : round_counts) max_rounds = std::max(max_rounds, rc.size());
  std::vector<CompensatedSum> sums(max_rounds);
  std::size_t contributing = 0;
  for (const auto& rc : round_counts) {
    const auto total = std::accumulate(rc.begin(), rc.end(), std::size_t{0});
    if (total == 0) continue;
    ++contributing;
    for (std::size_t k = 0; k < rc.size(); ++k) {
      sums[k].add(static_cast<double>(rc[k]) / static_cast<double>(total));
    }
  }
  std::vector<double> out(max_rounds, 0.0);
  if (contributing == 0) return out;
  for (std::size_t k = 0; k < max_rounds; ++k) {
    out[k] = sums[k].value() / static_cast<double>(contributing);
  }
  return out;
}

TestResult ks_uniform(std::span<const double> samples) {
  if (samples.empty()) throw InsufficientDataError("ks_uniform: no samples");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double cdf = std::clamp(s[i], 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  // Asymptotic Kolmogorov distribution with Stephens' small-sample correction.
  const double sqrt_n = std::sqrt(n);
  const double t = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
  double p = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * 2.0 * std::exp(-2.0 * k * k * t * t);
    p += term;
    if (std::abs(term) < 1e-12) break;
    sign = -sign;
  }
  return {d, std::clamp(p, 0.0, 1.0)};
}

TestResult rank_sum_greater(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw InsufficientDataError("rank_sum_greater: empty sample");
  struct Entry {
    double value;
    bool from_y;
  };
  std::vector<Entry> all;
  all.reserve(x.size() + y.size());
  for (double v : x) all.push_back({v, false});
  for (double v : y) all.push_back({v, true});
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.value < b.value; });

  double rank_sum_y = 0.0;
  double tie_term = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].value == all[i].value) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].from_y) rank_sum_y += avg_rank;
    }
    i = j;
  }
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  const double n = nx + ny;
  const double u = rank_sum_y - ny * (ny + 1.0) / 2.0;
  const double mean_u = nx * ny / 2.0;
  const double var_u = nx * ny / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var_u <= 0.0) return {0.0, 0.5};
  const double z = (u - mean_u) / std::sqrt(var_u);
  const boost::math::normal_distribution<double> std_normal;
  return {z, boost::math::cdf(boost::math::complement(std_normal, z))};
}

nlohmann::json to_json(const FitReport& fit) {
  if (fit.kind == FitKind::PowerLaw) {
    return {{"kind", "powerlaw"},  {"n", fit.n},
            {"slope", fit.slope},  {"intercept", fit.intercept},
            {"r_squared", fit.r_squared}, {"excluded", fit.excluded}};
  }
  return {{"kind", "poisson"},       {"n", fit.n},       {"lambda", fit.lambda},
          {"chi_square", fit.chi_square}, {"dof", fit.dof}, {"bins", fit.bins},
          {"p_value", fit.p_value},  {"degenerate", fit.degenerate}};
}

nlohmann::json to_json(const Histogram& hist) {
  return {{"total", hist.total}, {"counts", hist.counts}};
}

std::string histogram_csv(const Histogram& hist, const std::string& header_comment) {
  std::ostringstream out;
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "bin,count\n";
  for (std::size_t v = 0; v < hist.counts.size(); ++v) out << v << ',' << hist.counts[v] << '\n';
  return out.str();
}

}  // namespace domino
