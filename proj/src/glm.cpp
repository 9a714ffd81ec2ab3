#include "ssglm/glm.hpp"

#include <cmath>

#include "ssglm/kernels.hpp"

namespace ssglm {

namespace {

inline double sigmoid(double a) {
  // symmetric form, no overflow on either tail
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

inline double log1p_exp(double a) {
  // ln(1+e^a) = a + ln(1+e^-a) for a > 0
  if (a > 0.0) return a + std::log1p(std::exp(-a));
  return std::log1p(std::exp(a));
}

void check_beta(const Dataset& data, std::span<const double> beta, const char* who) {
  if (beta.size() != data.p())
    throw InputError(std::string(who) + ": coefficient length does not match design");
}

Vector linear_predictor(const Dataset& data, std::span<const double> beta) {
  Vector a(data.n());
  kernels::matvec(data.design(), beta, a);
  return a;
}

void check_response(LossKind kind, const Vector& y) {
  if (kind != LossKind::Logistic) return;
  for (double yi : y)
    if (yi != 0.0 && yi != 1.0)
      throw InputError("logistic loss requires responses in {0,1}");
}

}  // namespace

LossDerivatives loss_derivatives(LossKind kind, double y, double a) {
  if (kind == LossKind::Gaussian) {
    const double r = y - a;
    return {0.5 * r * r, -r, 1.0};
  }
  if (y != 0.0 && y != 1.0) throw InputError("logistic loss requires y in {0,1}");
  const double s = sigmoid(a);
  return {-y * a + log1p_exp(a), -y + s, s * sigmoid(-a)};
}

Dataset Dataset::make(Matrix x, Vector y, bool intercept) {
  if (x.rows() != y.size()) throw DataError("dataset: response length does not match design rows");
  if (x.rows() < 2) throw DataError("dataset: need at least 2 observations");
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (!std::isfinite(y[i])) throw DataError("dataset: non-finite response entry");
    for (std::size_t j = 0; j < x.cols(); ++j)
      if (!std::isfinite(x(i, j))) throw DataError("dataset: non-finite design entry");
  }
  Dataset d;
  d.intercept_ = intercept;
  d.y_ = std::move(y);
  if (!intercept) {
    d.design_ = std::move(x);
  } else {
    Matrix with_ones(x.rows(), x.cols() + 1);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      with_ones(i, 0) = 1.0;
      for (std::size_t j = 0; j < x.cols(); ++j) with_ones(i, j + 1) = x(i, j);
    }
    d.design_ = std::move(with_ones);
  }
  return d;
}

double empirical_risk(LossKind kind, const Dataset& data, std::span<const double> beta) {
  check_beta(data, beta, "empirical_risk");
  check_response(kind, data.y());
  const Vector a = linear_predictor(data, beta);
  Vector losses(data.n());
  const Vector& y = data.y();
  kernels::for_each_row(data.n(),
                        [&](std::size_t i) { losses[i] = loss_derivatives(kind, y[i], a[i]).rho; });
  return kernels::sum(losses) / static_cast<double>(data.n());
}

Vector risk_gradient(LossKind kind, const Dataset& data, std::span<const double> beta) {
  check_beta(data, beta, "risk_gradient");
  check_response(kind, data.y());
  const Vector a = linear_predictor(data, beta);
  Vector scores(data.n());
  const Vector& y = data.y();
  kernels::for_each_row(data.n(), [&](std::size_t i) {
    scores[i] = loss_derivatives(kind, y[i], a[i]).rho_dot;
  });
  Vector grad(data.p());
  kernels::scaled_col_mean(data.design(), scores, grad);
  return grad;
}

RiskGradient risk_and_gradient(LossKind kind, const Dataset& data, std::span<const double> beta) {
  check_beta(data, beta, "risk_and_gradient");
  check_response(kind, data.y());
  const Vector a = linear_predictor(data, beta);
  Vector losses(data.n()), scores(data.n());
  const Vector& y = data.y();
  kernels::for_each_row(data.n(), [&](std::size_t i) {
    const LossDerivatives d = loss_derivatives(kind, y[i], a[i]);
    losses[i] = d.rho;
    scores[i] = d.rho_dot;
  });
  RiskGradient out;
  out.risk = kernels::sum(losses) / static_cast<double>(data.n());
  out.gradient.resize(data.p());
  kernels::scaled_col_mean(data.design(), scores, out.gradient);
  return out;
}

Vector hessian_weights(LossKind kind, const Dataset& data, std::span<const double> beta) {
  check_beta(data, beta, "hessian_weights");
  check_response(kind, data.y());
  const Vector a = linear_predictor(data, beta);
  Vector w(data.n());
  const Vector& y = data.y();
  kernels::for_each_row(data.n(), [&](std::size_t i) {
    w[i] = std::sqrt(loss_derivatives(kind, y[i], a[i]).rho_ddot);
  });
  return w;
}

Matrix score_variance_matrix(LossKind kind, const Dataset& data, std::span<const double> beta) {
  check_beta(data, beta, "score_variance_matrix");
  check_response(kind, data.y());
  const Vector a = linear_predictor(data, beta);
  Vector sq(data.n());
  const Vector& y = data.y();
  kernels::for_each_row(data.n(), [&](std::size_t i) {
    const double d = loss_derivatives(kind, y[i], a[i]).rho_dot;
    sq[i] = d * d;
  });
  return kernels::weighted_gram(data.design(), sq);
}

}  // namespace ssglm
