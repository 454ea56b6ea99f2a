#pragma once

#include <Eigen/Core>

namespace gmvp::dist {

double normal_cdf(double x);
double normal_quantile(double p);

double f_cdf(double x, double d1, double d2);
double f_pdf(double x, double d1, double d2);
double f_quantile(double p, double d1, double d2);

double chi_squared_pdf(double x, double df);
double chi_squared_cdf(double x, double df);
double chi_squared_quantile(double p, double df);

// P(F > x) for the noncentral F with noncentrality delta.
double noncentral_f_sf(double x, double d1, double d2, double delta);

// Gauss hypergeometric series 2F1(a, b; c; z), |z| < 1. Truncated when the
// term falls below 1e-14 relative or after 1e5 terms.
double hyp2f1_series(double a, double b, double c, double z);

// Density of the Mahalanobis statistic under the alternative with
// noncentrality lambda, via the hypergeometric series representation.
// Cross-check implementation, guarded to p - 1 <= 10 and n <= 50.
double mahalanobis_alternative_density_series(double x, double lambda,
                                              Eigen::Index p, Eigen::Index n);

}  // namespace gmvp::dist
