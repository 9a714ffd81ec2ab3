#pragma once

#include <cstdint>
#include <string>

#include "ssglm/inference.hpp"

namespace ssglm {

enum class SimSetup { FiveGroups, TenGroups };

struct SimConfig {
  SimSetup setup = SimSetup::FiveGroups;
  int n = 150;
  int p = 100;        // regressors excluding the intercept
  double rho = 0.5;   // within-group AR(1) correlation
  int iterations = 100;
  std::uint64_t seed = 1;
  double grid_base = 0.3;
  int grid_len = 25;
  double nominal_level = 0.05;
  int nodewise_folds = 5;
  int workers = 0;  // 0 = use all threads

  FitOptions select_fit{.max_iter = 1500, .tol = 1e-7};
  FitOptions full_fit{.max_iter = 5000, .tol = 1e-7};
  FitOptions nodewise_cv_fit{.max_iter = 2000, .tol = 1e-6};
  FitOptions nodewise_final_fit{.max_iter = 50000, .tol = 1e-10};

  void validate() const;  // throws ConfigError
};

struct IterationRecord {
  int iteration = -1;
  bool ok = false;
  std::string failure;
  bool reject_size = false;
  bool reject_power = false;
  bool cover_zero = false;
  bool cover_nonzero = false;
  double z_size = 0.0;
  double z_power = 0.0;
  double lambda_selected = 0.0;
};

struct SimReport {
  double size_pct = 0.0;
  double power_pct = 0.0;
  double cov_zero_pct = 0.0;
  double cov_nonzero_pct = 0.0;
  int successes = 0;
  int failures = 0;
  double runtime_seconds = 0.0;
  std::vector<IterationRecord> per_iteration;
};

struct TrueBeta {
  Vector beta0;              // length p+1, intercept first
  GroupPartition partition;  // over the p non-intercept coordinates
};

// The exact block patterns of the two designs. FiveGroups: blocks of sizes
// 2, p/5+10, p/5, p/5, 2p/5-12 with only the third block equal to ones.
// TenGroups adds blocks of twos and halves.
TrueBeta true_beta(SimSetup setup, int p);

// 0-based design-column indices used by an iteration, intercept at 0.
struct SimCoordinates {
  std::vector<int> test_coords;  // {1, 2}: the two group-one coefficients
  int zero_coverage = 0;         // first coefficient of group two
  int nonzero_coverage = 0;
  double nonzero_truth = 1.0;
};
SimCoordinates sim_coordinates(SimSetup setup, int p);

// Regressors drawn as independent group blocks, AR(1) within a block with
// correlation rho^{|k-j|}; y_i ~ Bernoulli(sigmoid(X_i' beta0)). Fully
// determined by (config.seed, iteration).
Dataset generate_dataset(const SimConfig& config, int iteration);

// lambda grid {lambda_max * base^k}, k = 1..len
std::vector<double> lambda_grid(double lambda_max, double base, int len);

// Fits on the first floor(n/2) rows for every lambda in the grid, scores the
// unpenalized risk on the remaining rows, returns the minimizer (ties toward
// the larger lambda).
double select_lambda_split(const Dataset& data, LossKind kind, const NormSpec& spec,
                           const std::vector<double>& grid, const FitOptions& opts);

IterationRecord run_iteration(const SimConfig& config, int iteration);

SimReport aggregate(const SimConfig& config, std::vector<IterationRecord> records);

// Runs all iterations (in parallel up to config.workers) and aggregates.
SimReport run_campaign(const SimConfig& config);

}  // namespace ssglm
