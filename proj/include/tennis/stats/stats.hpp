#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace tennis::stats {

struct LillieforsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Kolmogorov-Smirnov statistic against a normal with estimated mean and
// standard deviation; the p-value comes from a seeded Monte Carlo null with
// the same sample size. Requires n >= 4 and a non-constant sample.
LillieforsResult lilliefors_test(std::span<const double> sample, int replicates = 10000,
                                 std::uint64_t seed = 1);

struct MannWhitneyResult {
  double u = 0.0;  // U statistic of the first sample
  double p_two_sided = 1.0;
  bool exact = false;
};

enum class MwMethod { Auto, Exact, Approx };

// Exact permutation distribution (tie-aware, via rank-sum counting) when
// n_a * n_b <= 400; otherwise the normal approximation with tie and
// continuity corrections. The crossover can be forced for testing; the exact
// path's cost grows with n_a * n_b.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 MwMethod method = MwMethod::Auto);

// (#{a_i > b_j} - #{a_i < b_j}) / (n_a * n_b), by direct pair counting.
double cliffs_delta(std::span<const double> a, std::span<const double> b);

double cohens_d(std::span<const double> a, std::span<const double> b);

enum class EffectKind { CliffsDelta, CohensD };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Percentile bootstrap interval (2.5/97.5) resampling both groups with
// replacement; deterministic per seed.
Interval bootstrap_ci(EffectKind effect, std::span<const double> a, std::span<const double> b,
                      int iterations = 1000, std::uint64_t seed = 1);

std::vector<double> bonferroni(std::span<const double> p_values);

struct TukeyComparison {
  int group_a = 0;
  int group_b = 0;
  double mean_difference = 0.0;
  double q = 0.0;  // studentized range statistic
  double p = 1.0;
};

// Tukey-Kramer pairwise comparisons with the unequal-n adjustment.
std::vector<TukeyComparison> tukey_kramer(const std::vector<std::vector<double>>& groups);

struct RegressionBandPoint {
  double fit = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct RegressionResult {
  double r = 0.0;
  double p_value = 1.0;
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t n = 0;
  // 95% confidence band for the mean response, aligned with the input order.
  std::vector<RegressionBandPoint> band;
};

RegressionResult pearson_and_regression(std::span<const double> x, std::span<const double> y);

// Effect-magnitude conventions used in report labels.
inline constexpr double kLargeCliffsDelta = 0.47;
inline constexpr double kSmallCohensD = 0.2;
inline constexpr double kMediumCohensD = 0.5;
inline constexpr double kLargeCohensD = 0.8;

}  // namespace tennis::stats
