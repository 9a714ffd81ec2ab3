#pragma once

#include <cstdint>
#include <optional>

#include "ssglm/solver.hpp"

namespace ssglm {

// Options for the nodewise regressions behind a precision estimate.
struct NodewiseConfig {
  std::vector<int> target_rows;              // 0-based design columns to fit
  NormSpec::Kind weak_kind = NormSpec::Kind::L1;
  std::optional<double> fixed_lambda;        // fixed rule when set, else cv
  int folds = 5;
  int grid_len = 20;
  double grid_decades = 3.0;                 // grid spans lambda_max * 10^-decades .. lambda_max
  double tau_floor = 1e-8;
  std::uint64_t seed = 0;                    // cv fold shuffles derive from this
  FitOptions cv_fit{.max_iter = 2000, .tol = 1e-6};
  FitOptions final_fit{.max_iter = 50000, .tol = 1e-10};
};

struct NodewiseRow {
  int index = -1;       // design column j
  Vector gamma;         // length p-1, coefficients on the remaining columns
  double tau_sq = 0.0;  // X_w,j' (X_w,j - X_w,-j gamma) / n, floored
  double lambda_used = 0.0;
  bool converged = false;
  bool tau_floored = false;
  int iterations = 0;
};

// Rows Theta_j = C_j / tau_j^2 of the approximate inverse of the weighted
// Gram matrix, for the requested rows only.
struct PrecisionEstimate {
  std::vector<int> row_indices;  // sorted
  Matrix theta;                  // h x p
  Matrix gamma;                  // h x (p-1)
  Vector tau_sq;
  Vector lambda_used;
  Vector inverse_residual;       // weak dual norm of Theta_j' Sigma_hat - e_j'
  std::vector<char> converged;
  std::vector<char> tau_floored;
  int tau_floor_count = 0;

  std::size_t p() const { return theta.cols(); }
  bool has_row(int j) const { return position(j) >= 0; }
  int position(int j) const;                 // -1 when absent
  std::span<const double> row(int j) const;  // InputError when absent
};

// X_w = W X with W = diag(sqrt(rho_ddot_i)) at beta_hat.
Matrix weighted_design(const Dataset& data, LossKind kind, const Vector& beta_hat);

// Norm for the gamma problem of column j (dimension p-1). For the l1 weak
// norm this is just l1; for the group weak norm the main partition is
// remapped onto the remaining design columns, with any column outside the
// partition (the intercept) as its own singleton group.
NormSpec nodewise_weak_spec(std::size_t p, std::size_t penalized_offset, NormSpec::Kind weak_kind,
                            const GroupPartition* main_partition, int j);
// Same norm on the full p coordinates (used for the inverse certificate).
NormSpec certificate_weak_spec(std::size_t p, std::size_t penalized_offset,
                               NormSpec::Kind weak_kind, const GroupPartition* main_partition);

// Solves ||X_w,j - X_w,-j g||_n^2 + 2 lambda_nw * weak(g) via the gaussian
// solver and computes tau_j^2, floored at tau_floor.
NodewiseRow nodewise_fit(const Matrix& xw, int j, double lambda_nw, const NormSpec& weak_spec,
                         const FitOptions& opts, double tau_floor,
                         const Vector* warm_start = nullptr);

// Dual norm of the gradient at gamma = 0; any lambda at or above it yields
// the zero solution.
double nodewise_lambda_max(const Matrix& xw, int j, const NormSpec& weak_spec);
std::vector<double> nodewise_lambda_grid(double lambda_max, int len, double decades);

// Mean held-out squared error over contiguous folds of a seeded shuffle;
// ties go to the larger lambda.
double cv_select_lambda(const Matrix& xw, int j, int folds, const std::vector<double>& grid,
                        std::uint64_t seed, const NormSpec& weak_spec, const FitOptions& opts);

// Builds the estimate and verifies the per-row dual-norm residual certificate
// inverse_residual[j] <= lambda_used[j] / tau_sq[j] + 1e-8.
PrecisionEstimate assemble_theta(const Matrix& xw, std::vector<NodewiseRow> rows,
                                 const NormSpec& weak_full);

// weighted_design + per-row lambda selection + fits + assemble; rows run in
// parallel and are merged by row index.
PrecisionEstimate estimate_precision(const Dataset& data, LossKind kind, const Vector& beta_hat,
                                     const NodewiseConfig& config,
                                     const GroupPartition* main_partition = nullptr);

}  // namespace ssglm
