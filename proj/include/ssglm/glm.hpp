#pragma once

#include <span>

#include "ssglm/types.hpp"

namespace ssglm {

struct LossDerivatives {
  double rho;       // loss value
  double rho_dot;   // d/da
  double rho_ddot;  // d^2/da^2
};

// Per-observation loss and derivatives at linear predictor a. Logistic:
// rho = -y*a + ln(1+e^a) evaluated overflow-free for any finite a.
LossDerivatives loss_derivatives(LossKind kind, double y, double a);

// (1/n) sum_i rho(y_i, X_i' beta)
double empirical_risk(LossKind kind, const Dataset& data, std::span<const double> beta);

// (1/n) sum_i X_i rho_dot(y_i, X_i' beta)
Vector risk_gradient(LossKind kind, const Dataset& data, std::span<const double> beta);

// risk and gradient in one pass over the design
struct RiskGradient {
  double risk;
  Vector gradient;
};
RiskGradient risk_and_gradient(LossKind kind, const Dataset& data, std::span<const double> beta);

// w_i = sqrt(rho_ddot(y_i, X_i' beta)); for logistic all w_i in (0, 0.5]
Vector hessian_weights(LossKind kind, const Dataset& data, std::span<const double> beta);

// A_hat = (1/n) sum_i X_i X_i' rho_dot(y_i, X_i' beta)^2
Matrix score_variance_matrix(LossKind kind, const Dataset& data, std::span<const double> beta);

}  // namespace ssglm
