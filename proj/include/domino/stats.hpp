#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace domino {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double compensated_mean(std::span<const double> xs);

/// Histogram over non-negative integer values; counts[v] is the number of
/// samples equal to v.
struct Histogram {
  std::vector<std::size_t> counts;
  std::size_t total = 0;

  double mean() const;
};

Histogram make_histogram(std::span<const std::size_t> samples);

enum class FitKind { Poisson, PowerLaw };

struct FitReport {
  FitKind kind = FitKind::Poisson;
  std::size_t n = 0;

  // Poisson
  double lambda = 0.0;         // fitted (or hypothesised) mean
  double chi_square = 0.0;
  std::size_t dof = 0;
  std::size_t bins = 0;        // after pooling to expected count >= 5
  double p_value = 1.0;
  bool degenerate = false;     // too few bins for a test (e.g. all-zero samples)

  // Power law
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t excluded = 0;    // zero-mass rounds left out of the regression
};

/// Poisson MLE (sample mean) with a chi-square goodness-of-fit test whose
/// bins are pooled to expected count >= 5. One degree of freedom is spent on
/// the fitted mean. Throws InsufficientDataError for n < 30.
FitReport poisson_fit(std::span<const std::size_t> samples);

/// Chi-square goodness of fit against a fully specified Poisson(lambda).
FitReport poisson_gof(std::span<const std::size_t> samples, double lambda);

/// Least squares of log f_i on log i (i is 1-based) over rounds with
/// f_i > 0. Throws InsufficientDataError with fewer than three such rounds.
FitReport powerlaw_fit(std::span<const double> round_fractions);

struct DbIncrease {
  double mean_db_changed = 0.0;  // over links whose power moved; 0 if none did
  double mean_db_all = 0.0;
  std::size_t changed = 0;
  std::vector<double> per_link;
};

/// 10 log10(after / before) per link. Throws DomainError on non-positive power.
DbIncrease power_increase_db(std::span<const double> before, std::span<const double> after);

struct RoundDistributions {
  std::vector<Histogram> per_round;  // per_round[k] is |A_{k+1}|
  Histogram total;                   // |A|
  std::vector<double> mean_per_round;
  double mean_total = 0.0;
};

/// Trials shorter than round k contribute |A_k| = 0.
RoundDistributions round_count_distributions(std::span<const std::vector<std::size_t>> round_counts);

/// Per-round share of |A|, averaged over trials with |A| > 0.
std::vector<double> round_fractions(std::span<const std::vector<std::size_t>> round_counts);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against U[0, 1).
TestResult ks_uniform(std::span<const double> samples);

/// Mann-Whitney rank-sum test; p_value is one-sided for "y tends to exceed
/// x" (normal approximation with tie correction). statistic is the z-score.
TestResult rank_sum_greater(std::span<const double> x, std::span<const double> y);

nlohmann::json to_json(const FitReport& fit);
nlohmann::json to_json(const Histogram& hist);
std::string histogram_csv(const Histogram& hist, const std::string& header_comment);

}  // namespace domino
