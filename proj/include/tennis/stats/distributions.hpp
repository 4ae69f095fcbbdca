#pragma once

namespace tennis::stats {

double norm_pdf(double x);
double norm_cdf(double x);

// Regularized incomplete beta I_x(a, b) by continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

double students_t_cdf(double t, double df);
double students_t_quantile(double p, double df);

// CDF of the studentized range of k group means with df error degrees of
// freedom, computed by nested quadrature: the inner integral is the exact
// range probability of k standard normals, the outer integral averages over
// the chi-distributed scale estimate.
double studentized_range_cdf(double q, int k, double df);

}  // namespace tennis::stats
