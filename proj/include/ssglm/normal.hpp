#pragma once

namespace ssglm {

// Standard normal CDF via erfc, accurate to ~1e-15.
double normal_cdf(double t);

// Inverse CDF: rational approximation polished with Newton steps on
// normal_cdf, so quantile and cdf are exact inverses to machine precision.
double normal_quantile(double q);

// P(Z1 > h, Z2 > k) for standard bivariate normals with correlation r.
double bivariate_normal_upper(double h, double k, double r);

// P(|Z1| > c, |Z2| > c) under correlation r: the null probability that two
// coordinate statistics both clear c in absolute value.
double both_tails_probability(double c, double r);

// Smallest c with both_tails_probability(c, r) <= delta.
double intersection_critical(double r, double delta);

}  // namespace ssglm
