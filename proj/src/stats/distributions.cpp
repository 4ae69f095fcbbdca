#include "tennis/stats/distributions.hpp"

#include <cmath>
#include <limits>

#include "tennis/errors.hpp"

namespace tennis::stats {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

// Simpson's rule with n (even) intervals.
template <class F>
double simpson(F&& f, double lo, double hi, int n) {
  const double h = (hi - lo) / n;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) {
    sum += f(lo + h * i) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

// P(range of k iid standard normals <= w).
double normal_range_cdf(double w, int k) {
  if (w <= 0.0) return 0.0;
  if (k <= 1) return 1.0;
  auto integrand = [&](double u) {
    const double span = norm_cdf(u + w) - norm_cdf(u);
    return norm_pdf(u) * std::pow(span, k - 1);
  };
  return k * simpson(integrand, -9.0, 9.0, 600);
}

}  // namespace

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw ContractViolation("incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return bt * beta_cf(a, b, x) / a;
  }
  return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double students_t_cdf(double t, double df) {
  if (df <= 0.0) throw ContractViolation("t distribution needs df > 0");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = df / (df + t * t);
  const double tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

double students_t_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) throw ContractViolation("quantile needs p in (0,1)");
  double lo = -1e3;
  double hi = 1e3;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (students_t_cdf(mid, df) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double studentized_range_cdf(double q, int k, double df) {
  if (k < 2) throw ContractViolation("studentized range needs k >= 2");
  if (df <= 0.0) throw ContractViolation("studentized range needs df > 0");
  if (q <= 0.0) return 0.0;

  // Scale estimate s = sqrt(chi^2_df / df); density
  // g(s) = 2 (df/2)^(df/2) / Gamma(df/2) * s^(df-1) * exp(-df s^2 / 2).
  const double half_df = df / 2.0;
  const double ln_norm = std::log(2.0) + half_df * std::log(half_df) - std::lgamma(half_df);
  auto scale_density = [&](double s) {
    if (s <= 0.0) return 0.0;
    return std::exp(ln_norm + (df - 1.0) * std::log(s) - half_df * s * s);
  };
  const double s_hi = 1.0 + 12.0 / std::sqrt(df) + 2.0;
  auto integrand = [&](double s) { return scale_density(s) * normal_range_cdf(q * s, k); };
  const double value = simpson(integrand, 0.0, s_hi, 400);
  return std::min(1.0, std::max(0.0, value));
}

}  // namespace tennis::stats
