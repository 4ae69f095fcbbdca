#include "tennis/stats/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tennis/errors.hpp"
#include "tennis/rng.hpp"
#include "tennis/stats/distributions.hpp"

namespace tennis::stats {

namespace {

double sample_mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Unbiased (n-1) variance.
double sample_var(std::span<const double> x, double mean) {
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / (static_cast<double>(x.size()) - 1.0);
}

double ks_statistic_vs_fitted_normal(std::vector<double>& x) {
  const std::size_t n = x.size();
  const double mean = sample_mean(x);
  const double sd = std::sqrt(sample_var(x, mean));
  std::sort(x.begin(), x.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = norm_cdf((x[i] - mean) / sd);
    const double hi = static_cast<double>(i + 1) / static_cast<double>(n) - z;
    const double lo = z - static_cast<double>(i) / static_cast<double>(n);
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

// Mid-ranks of the pooled sample, doubled so ties stay integral.
std::vector<long long> doubled_midranks(const std::vector<double>& pooled_sorted,
                                        const std::vector<double>& values) {
  std::vector<long long> out;
  out.reserve(values.size());
  for (double v : values) {
    const auto lo = std::lower_bound(pooled_sorted.begin(), pooled_sorted.end(), v);
    const auto hi = std::upper_bound(pooled_sorted.begin(), pooled_sorted.end(), v);
    const long long first = std::distance(pooled_sorted.begin(), lo) + 1;
    const long long last = std::distance(pooled_sorted.begin(), hi);
    out.push_back(first + last);  // 2 * average rank
  }
  return out;
}

double resample_effect(EffectKind effect, std::span<const double> a, std::span<const double> b) {
  switch (effect) {
    case EffectKind::CliffsDelta:
      return cliffs_delta(a, b);
    case EffectKind::CohensD: {
      const double ma = sample_mean(a);
      const double mb = sample_mean(b);
      const double na = static_cast<double>(a.size());
      const double nb = static_cast<double>(b.size());
      const double pooled = ((na - 1.0) * sample_var(a, ma) + (nb - 1.0) * sample_var(b, mb)) /
                            (na + nb - 2.0);
      if (pooled <= 0.0) return std::numeric_limits<double>::quiet_NaN();
      return (ma - mb) / std::sqrt(pooled);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double percentile_linear(const std::vector<double>& sorted, double alpha) {
  const std::size_t m = sorted.size();
  if (m == 1) return sorted[0];
  const double h = alpha * static_cast<double>(m - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= m) return sorted[m - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

LillieforsResult lilliefors_test(std::span<const double> sample, int replicates,
                                 std::uint64_t seed) {
  const std::size_t n = sample.size();
  if (n < 4) throw DegenerateSampleError("lilliefors needs at least 4 observations");
  const double mean = sample_mean(sample);
  if (sample_var(sample, mean) <= 0.0) {
    throw DegenerateSampleError("lilliefors needs a non-constant sample");
  }
  std::vector<double> x(sample.begin(), sample.end());
  LillieforsResult result;
  result.statistic = ks_statistic_vs_fitted_normal(x);

  Rng rng(seed);
  std::vector<double> draw(n);
  long long at_least = 0;
  for (int rep = 0; rep < replicates; ++rep) {
    for (double& v : draw) v = rng.normal();
    if (ks_statistic_vs_fitted_normal(draw) >= result.statistic) ++at_least;
  }
  result.p_value = static_cast<double>(at_least + 1) / static_cast<double>(replicates + 1);
  return result;
}

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 MwMethod method) {
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  if (na == 0 || nb == 0) throw ContractViolation("mann-whitney needs non-empty samples");
  if (na > nb) {
    // Run the exact subset count on the smaller group; U_a = na*nb - U_b and
    // the two-sided p is symmetric in the groups.
    MannWhitneyResult swapped = mann_whitney_u(b, a, method);
    swapped.u = static_cast<double>(na) * static_cast<double>(nb) - swapped.u;
    return swapped;
  }
  const std::size_t n = na + nb;

  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<double> pooled_sorted = pooled;
  std::sort(pooled_sorted.begin(), pooled_sorted.end());

  const auto ranks2 = doubled_midranks(pooled_sorted, pooled);
  long long ra2 = 0;  // doubled rank sum of sample a
  for (std::size_t i = 0; i < na; ++i) ra2 += ranks2[i];
  const double u = 0.5 * static_cast<double>(ra2) -
                   0.5 * static_cast<double>(na) * (static_cast<double>(na) + 1.0);

  MannWhitneyResult result;
  result.u = u;

  const bool use_exact = method == MwMethod::Exact || (method == MwMethod::Auto && na * nb <= 400);
  if (use_exact) {
    // Exact permutation distribution of the doubled rank sum: count the
    // subsets of size na at each achievable sum. Counts fit comfortably in
    // doubles (C(40,20) < 2^53).
    const long long total2 = std::accumulate(ranks2.begin(), ranks2.end(), 0LL);
    std::vector<std::vector<double>> ways(
        na + 1, std::vector<double>(static_cast<std::size_t>(total2) + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t item = 0; item < n; ++item) {
      const long long w = ranks2[item];
      const std::size_t jmax = std::min(na, item + 1);
      for (std::size_t j = jmax; j >= 1; --j) {
        auto& dst = ways[j];
        const auto& src = ways[j - 1];
        for (long long s = total2; s >= w; --s) {
          const double add = src[static_cast<std::size_t>(s - w)];
          if (add != 0.0) dst[static_cast<std::size_t>(s)] += add;
        }
      }
    }
    const auto& dist = ways[na];
    double all = 0.0;
    double le = 0.0;
    double ge = 0.0;
    const long long ra2_obs = ra2;
    for (long long s = 0; s <= total2; ++s) {
      const double c = dist[static_cast<std::size_t>(s)];
      if (c == 0.0) continue;
      all += c;
      if (s <= ra2_obs) le += c;
      if (s >= ra2_obs) ge += c;
    }
    result.exact = true;
    result.p_two_sided = std::min(1.0, 2.0 * std::min(le, ge) / all);
    return result;
  }

  // Normal approximation with tie correction and continuity correction.
  const double mean_u = static_cast<double>(na) * static_cast<double>(nb) / 2.0;
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && pooled_sorted[j] == pooled_sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double nn = static_cast<double>(n);
  const double var_u = (static_cast<double>(na) * static_cast<double>(nb) / 12.0) *
                       ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
  if (var_u <= 0.0) {
    result.p_two_sided = 1.0;
    return result;
  }
  const double z = std::max(0.0, std::fabs(u - mean_u) - 0.5) / std::sqrt(var_u);
  result.p_two_sided = std::min(1.0, 2.0 * (1.0 - norm_cdf(z)));
  return result;
}

double cliffs_delta(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ContractViolation("cliffs delta needs non-empty samples");
  long long greater = 0;
  long long less = 0;
  for (double x : a) {
    for (double y : b) {
      if (x > y) ++greater;
      if (x < y) ++less;
    }
  }
  return static_cast<double>(greater - less) /
         (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

double cohens_d(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw ContractViolation("cohens d needs at least two observations per group");
  }
  const double d = resample_effect(EffectKind::CohensD, a, b);
  if (std::isnan(d)) throw DegenerateSampleError("pooled standard deviation is zero");
  return d;
}

Interval bootstrap_ci(EffectKind effect, std::span<const double> a, std::span<const double> b,
                      int iterations, std::uint64_t seed) {
  if (a.size() < 2 || b.size() < 2) {
    throw ContractViolation("bootstrap needs at least two observations per group");
  }
  std::vector<double> ra(a.size());
  std::vector<double> rb(b.size());
  std::vector<double> effects;
  effects.reserve(static_cast<std::size_t>(iterations));
  for (int rep = 0; rep < iterations; ++rep) {
    // Replicate r draws from its own stream seeded splitmix64(seed + r), so
    // replicates can run in any order or in parallel without changing the
    // interval.
    Rng rng(splitmix64(seed + static_cast<std::uint64_t>(rep)));
    for (double& v : ra) v = a[rng.index(a.size())];
    for (double& v : rb) v = b[rng.index(b.size())];
    const double e = resample_effect(effect, ra, rb);
    if (!std::isnan(e)) effects.push_back(e);
  }
  if (effects.empty()) throw DegenerateSampleError("all bootstrap replicates degenerate");
  std::sort(effects.begin(), effects.end());
  return {percentile_linear(effects, 0.025), percentile_linear(effects, 0.975)};
}

std::vector<double> bonferroni(std::span<const double> p_values) {
  const double m = static_cast<double>(p_values.size());
  std::vector<double> out;
  out.reserve(p_values.size());
  for (double p : p_values) {
    if (p < 0.0 || p > 1.0) throw ContractViolation("p-values must lie in [0,1]");
    out.push_back(std::min(1.0, p * m));
  }
  return out;
}

std::vector<TukeyComparison> tukey_kramer(const std::vector<std::vector<double>>& groups) {
  const std::size_t k = groups.size();
  if (k < 2) throw ContractViolation("tukey-kramer needs at least two groups");
  double n_total = 0.0;
  double ss_within = 0.0;
  std::vector<double> means(k);
  for (std::size_t g = 0; g < k; ++g) {
    if (groups[g].size() < 2) {
      throw ContractViolation("tukey-kramer needs at least two observations per group");
    }
    means[g] = sample_mean(groups[g]);
    for (double v : groups[g]) ss_within += (v - means[g]) * (v - means[g]);
    n_total += static_cast<double>(groups[g].size());
  }
  const double df = n_total - static_cast<double>(k);
  const double mse = ss_within / df;
  if (mse <= 0.0) throw DegenerateSampleError("zero within-group variance");

  std::vector<TukeyComparison> table;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      TukeyComparison cmp;
      cmp.group_a = static_cast<int>(i);
      cmp.group_b = static_cast<int>(j);
      cmp.mean_difference = means[i] - means[j];
      const double ni = static_cast<double>(groups[i].size());
      const double nj = static_cast<double>(groups[j].size());
      const double se = std::sqrt(mse / 2.0 * (1.0 / ni + 1.0 / nj));
      cmp.q = std::fabs(cmp.mean_difference) / se;
      cmp.p = 1.0 - studentized_range_cdf(cmp.q, static_cast<int>(k), df);
      table.push_back(cmp);
    }
  }
  return table;
}

RegressionResult pearson_and_regression(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 3 || y.size() != n) throw ContractViolation("regression needs n >= 3 paired values");
  const double mx = sample_mean(x);
  const double my = sample_mean(y);
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw DegenerateSampleError("constant predictor");

  RegressionResult result;
  result.n = n;
  result.slope = sxy / sxx;
  result.intercept = my - result.slope * mx;
  result.r = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;

  const double df = static_cast<double>(n) - 2.0;
  const double r2 = result.r * result.r;
  if (r2 >= 1.0 - 1e-15) {
    result.p_value = 0.0;
  } else {
    const double t = result.r * std::sqrt(df / (1.0 - r2));
    result.p_value = 2.0 * (1.0 - students_t_cdf(std::fabs(t), df));
  }

  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double fit = result.intercept + result.slope * x[i];
    rss += (y[i] - fit) * (y[i] - fit);
  }
  const double s2 = rss / df;
  const double t_crit = students_t_quantile(0.975, df);
  result.band.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RegressionBandPoint p;
    p.fit = result.intercept + result.slope * x[i];
    const double half = t_crit * std::sqrt(s2 * (1.0 / static_cast<double>(n) +
                                                 (x[i] - mx) * (x[i] - mx) / sxx));
    p.lo = p.fit - half;
    p.hi = p.fit + half;
    result.band.push_back(p);
  }
  return result;
}

}  // namespace tennis::stats
