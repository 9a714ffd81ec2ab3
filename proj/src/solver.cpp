#include "ssglm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssglm/kernels.hpp"

namespace ssglm {

namespace {

void check_inputs(const Dataset& data, const NormSpec& spec, double lambda) {
  if (static_cast<std::size_t>(spec.p()) != data.penalized_count())
    throw InputError("fit: norm dimension must equal the penalized coordinate count");
  if (lambda < 0.0) throw InputError("fit: lambda must be nonnegative");
}

// prox of the penalty extended with an identity on the unpenalized intercept
void penalty_prox(const NormSpec& spec, std::size_t offset, Vector& v, double t) {
  prox_inplace(spec, std::span<double>(v).subspan(offset), t);
}

double penalty_value(const NormSpec& spec, std::size_t offset, const Vector& v) {
  return norm_value(spec, std::span<const double>(v).subspan(offset));
}

double inf_norm_diff(const Vector& a, const Vector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

// ||x - prox(x - s*g, s*lambda)||_inf / s
double fixed_point_residual(const NormSpec& spec, std::size_t offset, const Vector& x,
                            const Vector& g, double s, double lambda) {
  Vector stepped(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) stepped[i] = x[i] - s * g[i];
  penalty_prox(spec, offset, stepped, s * lambda);
  return inf_norm_diff(x, stepped) / s;
}

}  // namespace

FitResult fit(const Dataset& data, LossKind kind, const NormSpec& spec, double lambda,
              const FitOptions& opts, const Vector* warm_start) {
  check_inputs(data, spec, lambda);
  if (opts.tol <= 0.0 || opts.backtrack <= 0.0 || opts.backtrack >= 1.0 ||
      opts.initial_step <= 0.0 || opts.max_iter < 1)
    throw InputError("fit: invalid options");

  const std::size_t p = data.p();
  const std::size_t offset = data.penalized_offset();

  Vector x = warm_start ? *warm_start : Vector(p, 0.0);
  if (x.size() != p) throw InputError("fit: warm start length mismatch");
  Vector x_prev = x;
  Vector y = x;

  double step = opts.initial_step;
  double t_momentum = 1.0;

  RiskGradient at_y = risk_and_gradient(kind, data, y);
  double risk_y = at_y.risk;
  Vector grad_y = std::move(at_y.gradient);
  double objective_x = risk_y + lambda * penalty_value(spec, offset, x);

  Vector cand(p), diff(p);
  double risk_cand = 0.0;

  // Proximal step from y with backtracking; leaves the accepted point in
  // `cand` and its risk in `risk_cand`. Shrinks `step` as needed.
  auto prox_step = [&]() {
    for (;;) {
      cand = y;
      for (std::size_t i = 0; i < p; ++i) cand[i] -= step * grad_y[i];
      penalty_prox(spec, offset, cand, step * lambda);
      for (std::size_t i = 0; i < p; ++i) diff[i] = cand[i] - y[i];
      risk_cand = empirical_risk(kind, data, cand);
      double lin = 0.0, sq = 0.0;
      for (std::size_t i = 0; i < p; ++i) {
        lin += grad_y[i] * diff[i];
        sq += diff[i] * diff[i];
      }
      const double bound = risk_y + lin + sq / (2.0 * step);
      if (risk_cand <= bound + 1e-15 * std::max(1.0, std::fabs(bound))) return;
      step *= opts.backtrack;
      if (step < 1e-18) throw NumericError("fit: line search step underflow");
    }
  };

  int iter = 0;
  bool converged = false;
  double residual = std::numeric_limits<double>::infinity();

  while (iter < opts.max_iter) {
    ++iter;

    prox_step();
    double objective_cand = risk_cand + lambda * penalty_value(spec, offset, cand);
    if (std::isnan(objective_cand)) throw NumericError("fit: objective is NaN");

    if (opts.adaptive_restart && objective_cand > objective_x) {
      // momentum overshoot: redo as a plain proximal step from x, which the
      // line search makes a descent step
      t_momentum = 1.0;
      y = x;
      at_y = risk_and_gradient(kind, data, y);
      risk_y = at_y.risk;
      grad_y = std::move(at_y.gradient);
      prox_step();
      objective_cand = risk_cand + lambda * penalty_value(spec, offset, cand);
      if (std::isnan(objective_cand)) throw NumericError("fit: objective is NaN");
    }

    // gradient-based restart (O'Donoghue-Candes): momentum points uphill
    bool restart_momentum = false;
    if (opts.adaptive_restart) {
      double inner = 0.0;
      for (std::size_t i = 0; i < p; ++i) inner += (y[i] - cand[i]) * (cand[i] - x[i]);
      restart_momentum = inner > 0.0;
    }

    const double move = inf_norm_diff(cand, y) / step;

    x_prev = x;
    x = cand;
    objective_x = objective_cand;

    // cheap surrogate first; confirm with the exact fixed-point residual
    if (move <= opts.tol || iter % 25 == 0 || iter == opts.max_iter) {
      const Vector grad_x = risk_gradient(kind, data, x);
      residual = fixed_point_residual(spec, offset, x, grad_x, step, lambda);
      if (std::isnan(residual)) throw NumericError("fit: residual is NaN");
      if (residual <= opts.tol) {
        converged = true;
        break;
      }
    }

    if (restart_momentum) {
      t_momentum = 1.0;
      y = x;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
      const double mom = (t_momentum - 1.0) / t_next;
      y = x;
      for (std::size_t i = 0; i < p; ++i) y[i] += mom * (x[i] - x_prev[i]);
      t_momentum = t_next;
    }
    at_y = risk_and_gradient(kind, data, y);
    risk_y = at_y.risk;
    grad_y = std::move(at_y.gradient);
  }

  FitResult result;
  result.lambda = lambda;
  result.beta = std::move(x);
  result.iterations = iter;
  result.kkt_residual = residual;  // exact: the loop always ends on an exact check
  result.objective = objective_x;
  result.converged = converged;
  return result;
}

double lambda_max(const Dataset& data, LossKind kind, const NormSpec& spec) {
  check_inputs(data, spec, 0.0);
  Vector base(data.p(), 0.0);
  if (data.intercept()) {
    const double ybar = kernels::sum(data.y()) / static_cast<double>(data.n());
    if (kind == LossKind::Logistic) {
      if (ybar <= 0.0 || ybar >= 1.0)
        throw InputError("lambda_max: intercept-only logistic fit diverges (constant response)");
      base[0] = std::log(ybar / (1.0 - ybar));
    } else {
      base[0] = ybar;
    }
  }
  const Vector grad = risk_gradient(kind, data, base);
  return dual_norm_value(spec,
                         std::span<const double>(grad).subspan(data.penalized_offset()));
}

}  // namespace ssglm
