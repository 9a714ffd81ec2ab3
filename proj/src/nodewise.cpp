#include "ssglm/nodewise.hpp"

#include <algorithm>
#include <cmath>

#include "ssglm/kernels.hpp"
#include "ssglm/rng.hpp"

namespace ssglm {

namespace {

void check_column(const Matrix& xw, int j) {
  if (j < 0 || static_cast<std::size_t>(j) >= xw.cols())
    throw InputError("nodewise: column index out of range");
  if (xw.cols() < 2) throw InputError("nodewise: need at least two design columns");
}

// response = column j, design = remaining columns in order
Dataset column_regression_data(const Matrix& xw, int j, const std::vector<int>* rows) {
  const std::size_t n = rows ? rows->size() : xw.rows();
  const std::size_t p = xw.cols();
  Matrix design(n, p - 1);
  Vector response(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = rows ? static_cast<std::size_t>((*rows)[r]) : r;
    const double* xi = xw.row(i).data();
    response[r] = xi[j];
    std::size_t c = 0;
    for (std::size_t k = 0; k < p; ++k)
      if (k != static_cast<std::size_t>(j)) design(r, c++) = xi[k];
  }
  return Dataset::make(std::move(design), std::move(response), false);
}

}  // namespace

int PrecisionEstimate::position(int j) const {
  const auto it = std::lower_bound(row_indices.begin(), row_indices.end(), j);
  if (it == row_indices.end() || *it != j) return -1;
  return static_cast<int>(it - row_indices.begin());
}

std::span<const double> PrecisionEstimate::row(int j) const {
  const int pos = position(j);
  if (pos < 0) throw InputError("PrecisionEstimate: row not fitted");
  return theta.row(static_cast<std::size_t>(pos));
}

Matrix weighted_design(const Dataset& data, LossKind kind, const Vector& beta_hat) {
  const Vector w = hessian_weights(kind, data, beta_hat);
  Matrix xw(data.n(), data.p());
  kernels::for_each_row(data.n(), [&](std::size_t i) {
    const double* src = data.design().row(i).data();
    double* dst = xw.row(i).data();
    for (std::size_t j = 0; j < data.p(); ++j) dst[j] = w[i] * src[j];
  });
  return xw;
}

NormSpec nodewise_weak_spec(std::size_t p, std::size_t penalized_offset, NormSpec::Kind weak_kind,
                            const GroupPartition* main_partition, int j) {
  if (weak_kind == NormSpec::Kind::L1) return NormSpec::l1(static_cast<int>(p) - 1);
  if (!main_partition) throw InputError("nodewise: group weak norm needs the main partition");
  // remap design columns (minus j) to 0..p-2; penalized column c belongs to
  // the main group of coordinate c - offset, the rest are singletons
  std::vector<std::vector<int>> groups(main_partition->group_count());
  std::vector<std::vector<int>> singletons;
  std::size_t c_new = 0;
  for (std::size_t c = 0; c < p; ++c) {
    if (c == static_cast<std::size_t>(j)) continue;
    if (c < penalized_offset)
      singletons.push_back({static_cast<int>(c_new)});
    else
      groups[main_partition->group_of(static_cast<int>(c - penalized_offset))].push_back(
          static_cast<int>(c_new));
    ++c_new;
  }
  std::vector<std::vector<int>> all;
  for (auto& g : singletons) all.push_back(std::move(g));
  for (auto& g : groups)
    if (!g.empty()) all.push_back(std::move(g));
  return NormSpec::weighted_group_lasso(
      GroupPartition::from_groups(std::move(all), static_cast<int>(p) - 1));
}

NormSpec certificate_weak_spec(std::size_t p, std::size_t penalized_offset,
                               NormSpec::Kind weak_kind, const GroupPartition* main_partition) {
  if (weak_kind == NormSpec::Kind::L1) return NormSpec::l1(static_cast<int>(p));
  if (!main_partition) throw InputError("nodewise: group weak norm needs the main partition");
  std::vector<std::vector<int>> all;
  for (std::size_t c = 0; c < penalized_offset; ++c) all.push_back({static_cast<int>(c)});
  for (int g = 0; g < main_partition->group_count(); ++g) {
    std::vector<int> grp;
    for (int idx : main_partition->group(g)) grp.push_back(idx + static_cast<int>(penalized_offset));
    all.push_back(std::move(grp));
  }
  return NormSpec::weighted_group_lasso(
      GroupPartition::from_groups(std::move(all), static_cast<int>(p)));
}

NodewiseRow nodewise_fit(const Matrix& xw, int j, double lambda_nw, const NormSpec& weak_spec,
                         const FitOptions& opts, double tau_floor, const Vector* warm_start) {
  check_column(xw, j);
  if (lambda_nw < 0.0) throw InputError("nodewise_fit: lambda must be nonnegative");
  const Dataset problem = column_regression_data(xw, j, nullptr);

  NodewiseRow row;
  row.index = j;
  row.lambda_used = lambda_nw;

  // The inverse certificate allows dual infeasibility of at most 1e-8*tau^2
  // in absolute terms, and tau^2 is only known after a solve. Solve, then
  // tighten the fixed-point tolerance (warm-started) until it sits safely
  // below that budget or the numerical floor is reached.
  FitOptions pass = opts;
  const Vector* warm = warm_start;
  Vector previous;
  double tau = 0.0;
  for (int round = 0; round < 4; ++round) {
    const FitResult sol = fit(problem, LossKind::Gaussian, weak_spec, lambda_nw, pass, warm);
    row.gamma = sol.beta;
    row.converged = sol.converged;
    row.iterations += sol.iterations;

    Vector fitted(problem.n());
    kernels::matvec(problem.design(), row.gamma, fitted);
    Vector residual(problem.n());
    for (std::size_t i = 0; i < problem.n(); ++i) residual[i] = problem.y()[i] - fitted[i];
    tau = kernels::dot(problem.y(), residual) / static_cast<double>(problem.n());

    const double needed = 0.25e-8 * std::max(tau, tau_floor);
    if (!sol.converged) break;
    if (pass.tol <= needed) break;  // certificate budget met
    if (needed < 1e-14 || round == 3) {
      // the dual-slack budget 1e-8 * tau^2 sits below what double precision
      // can deliver; report the row as not certified rather than pretending
      row.converged = false;
      break;
    }
    pass.tol = needed;
    previous = std::move(row.gamma);
    warm = &previous;
    row.gamma.clear();
  }
  if (tau < tau_floor) {
    tau = tau_floor;
    row.tau_floored = true;
  }
  row.tau_sq = tau;
  return row;
}

double nodewise_lambda_max(const Matrix& xw, int j, const NormSpec& weak_spec) {
  check_column(xw, j);
  const Dataset problem = column_regression_data(xw, j, nullptr);
  Vector zero(problem.p(), 0.0);
  const Vector grad = risk_gradient(LossKind::Gaussian, problem, zero);
  return dual_norm_value(weak_spec, grad);
}

std::vector<double> nodewise_lambda_grid(double lambda_max, int len, double decades) {
  if (len < 1 || decades <= 0.0) throw InputError("nodewise_lambda_grid: invalid shape");
  std::vector<double> grid(len);
  if (len == 1) {
    grid[0] = lambda_max;
    return grid;
  }
  for (int k = 0; k < len; ++k)
    grid[k] = lambda_max * std::pow(10.0, -decades * k / static_cast<double>(len - 1));
  return grid;
}

double cv_select_lambda(const Matrix& xw, int j, int folds, const std::vector<double>& grid,
                        std::uint64_t seed, const NormSpec& weak_spec, const FitOptions& opts) {
  check_column(xw, j);
  if (folds < 2) throw InputError("cv_select_lambda: need at least 2 folds");
  if (grid.empty()) throw InputError("cv_select_lambda: empty grid");
  const std::size_t n = xw.rows();
  if (n < static_cast<std::size_t>(folds)) throw InputError("cv_select_lambda: more folds than rows");

  // descending lambda order for warm starts; remember original positions
  std::vector<int> order(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) order[k] = static_cast<int>(k);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return grid[a] > grid[b]; });

  rng::Stream stream(seed);
  const std::vector<int> perm = stream.permutation(static_cast<int>(n));

  std::vector<double> score(grid.size(), 0.0);
  for (int f = 0; f < folds; ++f) {
    const std::size_t lo = n * static_cast<std::size_t>(f) / static_cast<std::size_t>(folds);
    const std::size_t hi = n * (static_cast<std::size_t>(f) + 1) / static_cast<std::size_t>(folds);
    std::vector<int> test_rows(perm.begin() + lo, perm.begin() + hi);
    std::vector<int> train_rows;
    train_rows.reserve(n - (hi - lo));
    train_rows.insert(train_rows.end(), perm.begin(), perm.begin() + lo);
    train_rows.insert(train_rows.end(), perm.begin() + hi, perm.end());

    const Dataset train = column_regression_data(xw, j, &train_rows);
    const Dataset test = column_regression_data(xw, j, &test_rows);

    Vector warm(train.p(), 0.0);
    Vector fitted(test.n());
    for (int k : order) {
      const FitResult sol = fit(train, LossKind::Gaussian, weak_spec, grid[k], opts, &warm);
      warm = sol.beta;
      kernels::matvec(test.design(), sol.beta, fitted);
      double err = 0.0;
      for (std::size_t i = 0; i < test.n(); ++i) {
        const double r = test.y()[i] - fitted[i];
        err += r * r;
      }
      score[k] += err / static_cast<double>(test.n());
    }
  }

  // ties toward the larger lambda
  int best = order.front();
  for (int k : order)
    if (score[k] < score[best]) best = k;
  return grid[best];
}

PrecisionEstimate assemble_theta(const Matrix& xw, std::vector<NodewiseRow> rows,
                                 const NormSpec& weak_full) {
  if (rows.empty()) throw InputError("assemble_theta: no rows");
  const std::size_t p = xw.cols();
  std::sort(rows.begin(), rows.end(),
            [](const NodewiseRow& a, const NodewiseRow& b) { return a.index < b.index; });
  for (std::size_t r = 0; r + 1 < rows.size(); ++r)
    if (rows[r].index == rows[r + 1].index) throw InputError("assemble_theta: duplicate row");

  const Matrix sigma_hat = kernels::weighted_gram(xw, {});

  PrecisionEstimate est;
  est.theta = Matrix(rows.size(), p);
  est.gamma = Matrix(rows.size(), p - 1);
  for (const NodewiseRow& row : rows) {
    if (row.index < 0 || static_cast<std::size_t>(row.index) >= p ||
        row.gamma.size() != p - 1)
      throw InputError("assemble_theta: malformed row");
    est.row_indices.push_back(row.index);
    est.tau_sq.push_back(row.tau_sq);
    est.lambda_used.push_back(row.lambda_used);
    est.converged.push_back(row.converged ? 1 : 0);
    est.tau_floored.push_back(row.tau_floored ? 1 : 0);
    if (row.tau_floored) ++est.tau_floor_count;
  }

  Vector product(p);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const NodewiseRow& row = rows[r];
    const std::size_t j = static_cast<std::size_t>(row.index);
    // Theta_j = C_j / tau^2 with C_j = e_j minus gamma on the other cells
    double* theta_r = est.theta.row(r).data();
    std::size_t c = 0;
    for (std::size_t k = 0; k < p; ++k) {
      if (k == j)
        theta_r[k] = 1.0 / row.tau_sq;
      else
        theta_r[k] = -row.gamma[c++] / row.tau_sq;
    }
    std::copy(row.gamma.begin(), row.gamma.end(), est.gamma.row(r).begin());

    // certificate (weak dual norm of Theta_j' Sigma_hat - e_j')
    for (std::size_t k = 0; k < p; ++k) {
      double acc = 0.0;
      const double* col = sigma_hat.row(k).data();  // symmetric
      for (std::size_t l = 0; l < p; ++l) acc += theta_r[l] * col[l];
      product[k] = acc;
    }
    product[j] -= 1.0;
    const double resid = dual_norm_value(weak_full, product);
    est.inverse_residual.push_back(resid);
    const double bound = row.lambda_used / row.tau_sq + 1e-8;
    if (resid > bound && row.converged && !row.tau_floored)
      throw InternalError("assemble_theta: inverse certificate violated for a converged row");
  }
  return est;
}

PrecisionEstimate estimate_precision(const Dataset& data, LossKind kind, const Vector& beta_hat,
                                     const NodewiseConfig& config,
                                     const GroupPartition* main_partition) {
  if (config.target_rows.empty()) throw InputError("estimate_precision: no target rows");
  if (config.folds < 2) throw InputError("estimate_precision: folds must be >= 2");
  const Matrix xw = weighted_design(data, kind, beta_hat);
  const std::size_t p = xw.cols();

  std::vector<int> rows_wanted = config.target_rows;
  std::sort(rows_wanted.begin(), rows_wanted.end());
  rows_wanted.erase(std::unique(rows_wanted.begin(), rows_wanted.end()), rows_wanted.end());

  std::vector<NodewiseRow> rows(rows_wanted.size());
  std::vector<std::string> failures(rows_wanted.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t r = 0; r < rows_wanted.size(); ++r) {
    const int j = rows_wanted[r];
    try {
      const NormSpec weak =
          nodewise_weak_spec(p, data.penalized_offset(), config.weak_kind, main_partition, j);
      double lam;
      if (config.fixed_lambda) {
        lam = *config.fixed_lambda;
      } else {
        const double lmax = nodewise_lambda_max(xw, j, weak);
        const auto grid = nodewise_lambda_grid(lmax, config.grid_len, config.grid_decades);
        lam = cv_select_lambda(xw, j, config.folds, grid,
                               rng::mix(config.seed, static_cast<std::uint64_t>(j)), weak,
                               config.cv_fit);
      }
      rows[r] = nodewise_fit(xw, j, lam, weak, config.final_fit, config.tau_floor);
    } catch (const std::exception& e) {
      failures[r] = e.what();
    }
  }
  for (std::size_t r = 0; r < rows_wanted.size(); ++r)
    if (!failures[r].empty())
      throw NumericError("estimate_precision: row " + std::to_string(rows_wanted[r]) +
                         " failed: " + failures[r]);

  const NormSpec weak_full =
      certificate_weak_spec(p, data.penalized_offset(), config.weak_kind, main_partition);
  return assemble_theta(xw, std::move(rows), weak_full);
}

}  // namespace ssglm
