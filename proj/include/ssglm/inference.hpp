#pragma once

#include "ssglm/nodewise.hpp"
#include "ssglm/normal.hpp"

namespace ssglm {

// A normalized direction alpha with ||alpha||_2 = 1 and the hypothesized
// value of alpha' beta_0.
struct RestrictionSpec {
  Vector alpha;                  // length p
  double null_value = 0.0;
  std::vector<int> coordinates;  // support of alpha, sorted

  static RestrictionSpec from_direction(Vector alpha_raw, double null_value);
  // equal weights 1/sqrt(h) on `coords`; null value is alpha' hypothesized
  static RestrictionSpec equal_weight(const std::vector<int>& coords,
                                      const Vector& hypothesized_values, std::size_t p);
};

// Debiased values b_j = beta_j - Theta_j' grad R_n(beta_hat) for every row
// carried by the precision estimate.
struct DebiasResult {
  std::vector<int> indices;  // matches PrecisionEstimate row order
  Vector values;

  double at(int j) const;  // InputError when j was not debiased
};

DebiasResult debias(const Vector& beta_hat, const PrecisionEstimate& theta, const Dataset& data,
                    LossKind kind);

// V_alpha = sqrt(alpha' Theta A_n Theta' alpha) with A_n the score variance
// matrix; uses only the rows in the support of alpha and never forms the
// full Theta. Throws NumericError when V^2 falls below the 1e-12 floor.
double variance_alpha(const RestrictionSpec& restriction, const PrecisionEstimate& theta,
                      const Dataset& data, LossKind kind, const Vector& beta_hat);

// sigma_j = V_{e_j}
double coordinate_sigma(int j, const PrecisionEstimate& theta, const Dataset& data, LossKind kind,
                        const Vector& beta_hat);

struct WaldResult {
  double z = 0.0;
  double p_value = 1.0;
};

// z = sqrt(n) (alpha' b - null) / V_alpha, two-sided normal p-value
WaldResult wald_test(const RestrictionSpec& restriction, const DebiasResult& debiased,
                     double v_alpha, std::size_t n);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return lo <= v && v <= hi; }
};

// b_j +- z_{1-delta/2} sigma_j / sqrt(n)
Interval confidence_interval(double b_j, double sigma_j, std::size_t n, double delta);

// Joint test of a two-coordinate null H0: beta_{j1} = null1, beta_{j2} = null2.
// Rejects when both coordinate z-statistics clear a critical value calibrated
// at level delta from their estimated bivariate normal law, so the test has
// exact asymptotic size under the joint null.
struct PairTestResult {
  double z1 = 0.0;
  double z2 = 0.0;
  double correlation = 0.0;  // estimated correlation of the two statistics
  double statistic = 0.0;    // min(|z1|, |z2|)
  double critical = 0.0;
  double p_value = 1.0;
  bool reject = false;
};

PairTestResult intersection_test(int j1, int j2, double null1, double null2,
                                 const DebiasResult& debiased, const PrecisionEstimate& theta,
                                 const Dataset& data, LossKind kind, const Vector& beta_hat,
                                 double delta);

}  // namespace ssglm
