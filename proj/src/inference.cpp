#include "ssglm/inference.hpp"

#include <algorithm>
#include <cmath>

#include "ssglm/kernels.hpp"

namespace ssglm {

namespace {
constexpr double kVarianceFloor = 1e-12;
}

RestrictionSpec RestrictionSpec::from_direction(Vector alpha_raw, double null_value) {
  double ss = 0.0;
  for (double a : alpha_raw) ss += a * a;
  if (ss <= 0.0) throw InputError("RestrictionSpec: direction is zero");
  const double inv = 1.0 / std::sqrt(ss);
  RestrictionSpec spec;
  spec.alpha = std::move(alpha_raw);
  for (double& a : spec.alpha) a *= inv;
  spec.null_value = null_value;
  for (std::size_t j = 0; j < spec.alpha.size(); ++j)
    if (spec.alpha[j] != 0.0) spec.coordinates.push_back(static_cast<int>(j));
  if (spec.coordinates.size() >= spec.alpha.size())
    throw InputError("RestrictionSpec: support must be a strict subset of the coordinates");
  return spec;
}

RestrictionSpec RestrictionSpec::equal_weight(const std::vector<int>& coords,
                                              const Vector& hypothesized_values, std::size_t p) {
  if (coords.empty()) throw InputError("RestrictionSpec: no coordinates");
  if (hypothesized_values.size() != coords.size())
    throw InputError("RestrictionSpec: one hypothesized value per coordinate");
  Vector alpha(p, 0.0);
  double null_raw = 0.0;
  for (std::size_t k = 0; k < coords.size(); ++k) {
    const int j = coords[k];
    if (j < 0 || static_cast<std::size_t>(j) >= p)
      throw InputError("RestrictionSpec: coordinate out of range");
    if (alpha[j] != 0.0) throw InputError("RestrictionSpec: duplicate coordinate");
    alpha[j] = 1.0;
    null_raw += hypothesized_values[k];
  }
  const double h = static_cast<double>(coords.size());
  return from_direction(std::move(alpha), null_raw / std::sqrt(h));
}

double DebiasResult::at(int j) const {
  const auto it = std::lower_bound(indices.begin(), indices.end(), j);
  if (it == indices.end() || *it != j) throw InputError("debias: coordinate was not debiased");
  return values[static_cast<std::size_t>(it - indices.begin())];
}

DebiasResult debias(const Vector& beta_hat, const PrecisionEstimate& theta, const Dataset& data,
                    LossKind kind) {
  if (beta_hat.size() != data.p() || theta.p() != data.p())
    throw InputError("debias: dimension mismatch");
  const Vector grad = risk_gradient(kind, data, beta_hat);
  DebiasResult out;
  out.indices = theta.row_indices;
  out.values.resize(theta.row_indices.size());
  for (std::size_t r = 0; r < theta.row_indices.size(); ++r) {
    const auto theta_r = theta.theta.row(r);
    double correction = 0.0;
    for (std::size_t k = 0; k < grad.size(); ++k) correction += theta_r[k] * grad[k];
    out.values[r] = beta_hat[static_cast<std::size_t>(theta.row_indices[r])] - correction;
  }
  return out;
}

namespace {

// alpha' Theta as a length-p vector, using only the support rows
Vector alpha_theta(const RestrictionSpec& restriction, const PrecisionEstimate& theta) {
  Vector u(theta.p(), 0.0);
  for (int j : restriction.coordinates) {
    const int pos = theta.position(j);
    if (pos < 0)
      throw InputError("variance_alpha: precision row " + std::to_string(j) + " missing");
    const auto row = theta.theta.row(static_cast<std::size_t>(pos));
    const double aj = restriction.alpha[static_cast<std::size_t>(j)];
    for (std::size_t k = 0; k < u.size(); ++k) u[k] += aj * row[k];
  }
  return u;
}

double variance_from_direction(const Vector& u, const Dataset& data, LossKind kind,
                               const Vector& beta_hat) {
  // u' A_n u = (1/n) sum_i rho_dot_i^2 (X_i'u)^2, no p x p matrix formed
  Vector a(data.n());
  kernels::matvec(data.design(), beta_hat, a);
  Vector sq(data.n());
  const Vector& y = data.y();
  kernels::for_each_row(data.n(), [&](std::size_t i) {
    const double d = loss_derivatives(kind, y[i], a[i]).rho_dot;
    sq[i] = d * d;
  });
  const double v2 = kernels::weighted_quadform(data.design(), sq, u);
  if (v2 < kVarianceFloor)
    throw NumericError("variance_alpha: degenerate variance (V^2 below floor)");
  return std::sqrt(v2);
}

}  // namespace

double variance_alpha(const RestrictionSpec& restriction, const PrecisionEstimate& theta,
                      const Dataset& data, LossKind kind, const Vector& beta_hat) {
  if (restriction.alpha.size() != data.p() || theta.p() != data.p())
    throw InputError("variance_alpha: dimension mismatch");
  const Vector u = alpha_theta(restriction, theta);
  return variance_from_direction(u, data, kind, beta_hat);
}

double coordinate_sigma(int j, const PrecisionEstimate& theta, const Dataset& data, LossKind kind,
                        const Vector& beta_hat) {
  const int pos = theta.position(j);
  if (pos < 0) throw InputError("coordinate_sigma: precision row missing");
  const auto row = theta.theta.row(static_cast<std::size_t>(pos));
  return variance_from_direction(Vector(row.begin(), row.end()), data, kind, beta_hat);
}

WaldResult wald_test(const RestrictionSpec& restriction, const DebiasResult& debiased,
                     double v_alpha, std::size_t n) {
  if (v_alpha < std::sqrt(kVarianceFloor))
    throw NumericError("wald_test: degenerate variance");
  double estimate = 0.0;
  for (int j : restriction.coordinates)
    estimate += restriction.alpha[static_cast<std::size_t>(j)] * debiased.at(j);
  WaldResult out;
  out.z = std::sqrt(static_cast<double>(n)) * (estimate - restriction.null_value) / v_alpha;
  out.p_value = 2.0 * (1.0 - normal_cdf(std::fabs(out.z)));
  return out;
}

Interval confidence_interval(double b_j, double sigma_j, std::size_t n, double delta) {
  if (delta <= 0.0 || delta >= 1.0) throw InputError("confidence_interval: delta must be in (0,1)");
  const double half = normal_quantile(1.0 - delta / 2.0) * sigma_j / std::sqrt(static_cast<double>(n));
  return {b_j - half, b_j + half};
}

PairTestResult intersection_test(int j1, int j2, double null1, double null2,
                                 const DebiasResult& debiased, const PrecisionEstimate& theta,
                                 const Dataset& data, LossKind kind, const Vector& beta_hat,
                                 double delta) {
  if (j1 == j2) throw InputError("intersection_test: coordinates must differ");
  if (delta <= 0.0 || delta >= 1.0) throw InputError("intersection_test: delta must be in (0,1)");
  const int p1 = theta.position(j1);
  const int p2 = theta.position(j2);
  if (p1 < 0 || p2 < 0) throw InputError("intersection_test: precision rows missing");

  const auto r1 = theta.theta.row(static_cast<std::size_t>(p1));
  const auto r2 = theta.theta.row(static_cast<std::size_t>(p2));
  Vector a(data.n());
  kernels::matvec(data.design(), beta_hat, a);
  Vector sq(data.n());
  const Vector& y = data.y();
  kernels::for_each_row(data.n(), [&](std::size_t i) {
    const double d = loss_derivatives(kind, y[i], a[i]).rho_dot;
    sq[i] = d * d;
  });
  const Vector u1(r1.begin(), r1.end());
  const Vector u2(r2.begin(), r2.end());
  const double v11 = kernels::weighted_quadform(data.design(), sq, u1);
  const double v22 = kernels::weighted_quadform(data.design(), sq, u2);
  Vector us(u1);
  for (std::size_t kk = 0; kk < us.size(); ++kk) us[kk] += u2[kk];
  const double v12 = 0.5 * (kernels::weighted_quadform(data.design(), sq, us) - v11 - v22);
  if (v11 < kVarianceFloor || v22 < kVarianceFloor)
    throw NumericError("intersection_test: degenerate variance");

  PairTestResult out;
  const double root_n = std::sqrt(static_cast<double>(data.n()));
  out.z1 = root_n * (debiased.at(j1) - null1) / std::sqrt(v11);
  out.z2 = root_n * (debiased.at(j2) - null2) / std::sqrt(v22);
  out.correlation = v12 / std::sqrt(v11 * v22);
  out.statistic = std::min(std::fabs(out.z1), std::fabs(out.z2));
  out.critical = intersection_critical(out.correlation, delta);
  out.p_value = both_tails_probability(out.statistic, out.correlation);
  out.reject = out.p_value <= delta;
  return out;
}

}  // namespace ssglm
