#include "ssglm/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ssglm/rng.hpp"

namespace ssglm {

namespace {

std::vector<int> block_sizes(SimSetup setup, int p) {
  if (setup == SimSetup::FiveGroups) {
    const int b = p / 5;
    return {2, b + 10, b, b, 2 * b - 12};
  }
  const int b = p / 10;
  return {2, b + 10, b, b, 2 * b - 12, b, b, b, b, b};
}

Vector block_values(SimSetup setup) {
  if (setup == SimSetup::FiveGroups) return {0.0, 0.0, 1.0, 0.0, 0.0};
  return {0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.5, 0.0};
}

void check_divisibility(SimSetup setup, int p) {
  if (setup == SimSetup::FiveGroups) {
    if (p % 5 != 0 || p / 5 < 13)
      throw ConfigError("five-group setup needs p divisible by 5 with p/5 >= 13");
  } else {
    if (p % 10 != 0 || 2 * (p / 10) - 12 < 1)
      throw ConfigError("ten-group setup needs p divisible by 10 with 2p/10-12 >= 1");
  }
}

}  // namespace

void SimConfig::validate() const {
  check_divisibility(setup, p);
  if (n < 4) throw ConfigError("simulate: n must be at least 4");
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("simulate: rho must be in (0,1)");
  if (iterations < 1) throw ConfigError("simulate: iterations must be positive");
  if (!(grid_base > 0.0 && grid_base < 1.0)) throw ConfigError("simulate: grid base must be in (0,1)");
  if (grid_len < 1) throw ConfigError("simulate: grid length must be positive");
  if (!(nominal_level > 0.0 && nominal_level < 1.0))
    throw ConfigError("simulate: nominal level must be in (0,1)");
  if (nodewise_folds < 2) throw ConfigError("simulate: nodewise folds must be >= 2");
  if (workers < 0) throw ConfigError("simulate: workers must be nonnegative");
}

TrueBeta true_beta(SimSetup setup, int p) {
  check_divisibility(setup, p);
  const std::vector<int> sizes = block_sizes(setup, p);
  const Vector values = block_values(setup);
  Vector beta0(static_cast<std::size_t>(p) + 1, 0.0);  // intercept stays 0
  std::size_t at = 1;
  for (std::size_t g = 0; g < sizes.size(); ++g)
    for (int k = 0; k < sizes[g]; ++k) beta0[at++] = values[g];
  return {std::move(beta0), GroupPartition::contiguous(sizes)};
}

SimCoordinates sim_coordinates(SimSetup setup, int p) {
  check_divisibility(setup, p);
  SimCoordinates coords;
  coords.test_coords = {1, 2};  // the two group-one coefficients
  coords.zero_coverage = 3;     // first coefficient of group two
  if (setup == SimSetup::FiveGroups) {
    // third coefficient of the all-ones group g3
    coords.nonzero_coverage = (2 + (p / 5 + 10)) + 3;
  } else {
    coords.nonzero_coverage = p / 10 + 16;
  }
  coords.nonzero_truth = 1.0;
  return coords;
}

Dataset generate_dataset(const SimConfig& config, int iteration) {
  config.validate();
  const TrueBeta truth = true_beta(config.setup, config.p);
  rng::Stream stream(rng::mix(config.seed, 0x5157ULL), static_cast<std::uint64_t>(iteration));

  const std::vector<int> sizes = block_sizes(config.setup, config.p);
  const double rho = config.rho;
  const double innovation = std::sqrt(1.0 - rho * rho);

  Matrix x(config.n, config.p);
  Vector y(config.n);
  for (int i = 0; i < config.n; ++i) {
    double* xi = x.row(static_cast<std::size_t>(i)).data();
    std::size_t c = 0;
    for (int sz : sizes) {
      // AR(1) recursion draws a block with covariance rho^{|k-j|}
      double prev = stream.next_normal();
      xi[c++] = prev;
      for (int k = 1; k < sz; ++k) {
        prev = rho * prev + innovation * stream.next_normal();
        xi[c++] = prev;
      }
    }
    double a = truth.beta0[0];
    for (int j = 0; j < config.p; ++j) a += xi[j] * truth.beta0[static_cast<std::size_t>(j) + 1];
    const double prob = 1.0 / (1.0 + std::exp(-a));
    y[static_cast<std::size_t>(i)] = stream.next_uniform() < prob ? 1.0 : 0.0;
  }
  return Dataset::make(std::move(x), std::move(y), true);
}

std::vector<double> lambda_grid(double lambda_max, double base, int len) {
  std::vector<double> grid(len);
  double lam = lambda_max;
  for (int k = 0; k < len; ++k) {
    lam *= base;
    grid[k] = lam;
  }
  return grid;
}

double select_lambda_split(const Dataset& data, LossKind kind, const NormSpec& spec,
                           const std::vector<double>& grid, const FitOptions& opts) {
  if (grid.empty()) throw InputError("select_lambda_split: empty grid");
  const std::size_t half = data.n() / 2;
  if (half < 2 || data.n() - half < 1)
    throw InputError("select_lambda_split: sample too small to split");

  const std::size_t p_raw = data.p() - data.penalized_offset();
  auto slice = [&](std::size_t lo, std::size_t hi) {
    Matrix x(hi - lo, p_raw);
    Vector y(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t j = 0; j < p_raw; ++j)
        x(i - lo, j) = data.design()(i, j + data.penalized_offset());
      y[i - lo] = data.y()[i];
    }
    return Dataset::make(std::move(x), std::move(y), data.intercept());
  };
  const Dataset train = slice(0, half);
  const Dataset holdout = slice(half, data.n());

  // descending order for warm starts; grids arrive descending already
  std::vector<int> order(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) order[k] = static_cast<int>(k);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return grid[a] > grid[b]; });

  Vector warm(train.p(), 0.0);
  int best = -1;
  double best_risk = 0.0;
  int fitted = 0;
  for (int k : order) {
    try {
      const FitResult sol = fit(train, kind, spec, grid[static_cast<std::size_t>(k)], opts, &warm);
      warm = sol.beta;
      const double held = empirical_risk(kind, holdout, sol.beta);
      ++fitted;
      if (std::isnan(held)) continue;
      if (best < 0 || held < best_risk) {
        best = k;
        best_risk = held;
      }
    } catch (const NumericError&) {
      continue;  // an unusable grid point is skipped, not fatal
    }
  }
  if (best < 0 || fitted == 0) throw ConfigError("select_lambda_split: no usable grid point");
  return grid[static_cast<std::size_t>(best)];
}

IterationRecord run_iteration(const SimConfig& config, int iteration) {
  IterationRecord rec;
  rec.iteration = iteration;
  try {
    config.validate();
    const TrueBeta truth = true_beta(config.setup, config.p);
    const SimCoordinates coords = sim_coordinates(config.setup, config.p);
    const Dataset data = generate_dataset(config, iteration);
    const NormSpec spec = NormSpec::weighted_group_lasso(truth.partition);

    const double lmax = lambda_max(data, LossKind::Logistic, spec);
    const std::vector<double> grid = lambda_grid(lmax, config.grid_base, config.grid_len);
    const double lambda_o =
        select_lambda_split(data, LossKind::Logistic, spec, grid, config.select_fit);
    rec.lambda_selected = lambda_o;

    const FitResult full = fit(data, LossKind::Logistic, spec, lambda_o, config.full_fit);

    NodewiseConfig nw;
    nw.target_rows = coords.test_coords;
    nw.target_rows.push_back(coords.zero_coverage);
    nw.target_rows.push_back(coords.nonzero_coverage);
    nw.folds = config.nodewise_folds;
    nw.seed = rng::mix(config.seed, 0xA0D1ULL + static_cast<std::uint64_t>(iteration));
    nw.cv_fit = config.nodewise_cv_fit;
    nw.final_fit = config.nodewise_final_fit;
    const PrecisionEstimate theta =
        estimate_precision(data, LossKind::Logistic, full.beta, nw, &truth.partition);

    const DebiasResult b = debias(full.beta, theta, data, LossKind::Logistic);
    const double delta = config.nominal_level;
    const std::size_t n = data.n();

    // size: H0: beta_2 = beta_3 = 0 (true); power: H0: beta_2 = beta_3 = 0.5.
    // Both coordinates must reject at the jointly calibrated critical value.
    const int t1 = coords.test_coords[0];
    const int t2 = coords.test_coords[1];
    const PairTestResult size_test =
        intersection_test(t1, t2, 0.0, 0.0, b, theta, data, LossKind::Logistic, full.beta, delta);
    const PairTestResult power_test =
        intersection_test(t1, t2, 0.5, 0.5, b, theta, data, LossKind::Logistic, full.beta, delta);
    rec.z_size = size_test.statistic;
    rec.z_power = power_test.statistic;
    rec.reject_size = size_test.reject;
    rec.reject_power = power_test.reject;

    const double sigma_zero =
        coordinate_sigma(coords.zero_coverage, theta, data, LossKind::Logistic, full.beta);
    const double sigma_nonzero =
        coordinate_sigma(coords.nonzero_coverage, theta, data, LossKind::Logistic, full.beta);
    rec.cover_zero =
        confidence_interval(b.at(coords.zero_coverage), sigma_zero, n, delta).contains(0.0);
    rec.cover_nonzero =
        confidence_interval(b.at(coords.nonzero_coverage), sigma_nonzero, n, delta)
            .contains(coords.nonzero_truth);
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.failure = e.what();
  }
  return rec;
}

SimReport aggregate(const SimConfig& config, std::vector<IterationRecord> records) {
  (void)config;
  SimReport report;
  int size_hits = 0, power_hits = 0, zero_hits = 0, nonzero_hits = 0;
  for (const IterationRecord& rec : records) {
    if (!rec.ok) {
      ++report.failures;
      continue;
    }
    ++report.successes;
    size_hits += rec.reject_size ? 1 : 0;
    power_hits += rec.reject_power ? 1 : 0;
    zero_hits += rec.cover_zero ? 1 : 0;
    nonzero_hits += rec.cover_nonzero ? 1 : 0;
  }
  if (report.successes == 0) throw NumericError("aggregate: every iteration failed");
  const double denom = static_cast<double>(report.successes);
  report.size_pct = 100.0 * size_hits / denom;
  report.power_pct = 100.0 * power_hits / denom;
  report.cov_zero_pct = 100.0 * zero_hits / denom;
  report.cov_nonzero_pct = 100.0 * nonzero_hits / denom;
  report.per_iteration = std::move(records);
  return report;
}

SimReport run_campaign(const SimConfig& config) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  std::vector<IterationRecord> records(static_cast<std::size_t>(config.iterations));
#ifdef _OPENMP
  const int threads = config.workers > 0 ? config.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (int it = 0; it < config.iterations; ++it)
    records[static_cast<std::size_t>(it)] = run_iteration(config, it);
  SimReport report = aggregate(config, std::move(records));
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace ssglm
