#pragma once

#include "ssglm/glm.hpp"
#include "ssglm/norms.hpp"
#include "ssglm/types.hpp"

namespace ssglm {

struct FitOptions {
  int max_iter = 5000;
  double tol = 1e-7;          // prox fixed-point tolerance
  double backtrack = 0.5;     // step shrink factor, in (0,1)
  double initial_step = 1.0;
  bool adaptive_restart = true;
};

struct FitResult {
  Vector beta;
  double lambda = 0.0;
  int iterations = 0;
  double kkt_residual = 0.0;  // ||b - prox(b - s*grad, s*lambda)||_inf / s
  double objective = 0.0;
  bool converged = false;
};

// min_beta R_n(beta) + lambda * Omega(beta_penalized) by FISTA with
// backtracking and adaptive restart. The intercept column, when present, is
// just an unpenalized coordinate in the prox. Non-convergence is reported via
// converged=false, never thrown.
FitResult fit(const Dataset& data, LossKind kind, const NormSpec& spec, double lambda,
              const FitOptions& opts = {}, const Vector* warm_start = nullptr);

// Smallest lambda at which all penalized coefficients are exactly zero:
// the dual norm of the risk gradient at the unpenalized-coordinates-only fit
// (intercept-only optimum, or the zero vector without an intercept).
double lambda_max(const Dataset& data, LossKind kind, const NormSpec& spec);

}  // namespace ssglm
