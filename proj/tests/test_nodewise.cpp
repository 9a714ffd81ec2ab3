#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "ssglm/kernels.hpp"
#include "ssglm/nodewise.hpp"
#include "ssglm/rng.hpp"

using namespace ssglm;

namespace {

Dataset random_logistic(rng::Stream& stream, int n, int p, bool intercept) {
  Matrix x(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x(i, j) = stream.next_normal();
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    const double a = 0.7 * x(i, 0) - 0.5 * x(i, 1 % p);
    y[i] = stream.next_uniform() < 1.0 / (1.0 + std::exp(-a)) ? 1.0 : 0.0;
  }
  return Dataset::make(std::move(x), std::move(y), intercept);
}

Matrix random_design(rng::Stream& stream, int n, int p) {
  Matrix x(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x(i, j) = stream.next_normal();
  return x;
}

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

// columns scaled so that X'X/n has unit diagonal... exact orthonormal design
Matrix orthonormal_design(int n, int p) {
  rng::Stream stream(4711);
  Eigen::MatrixXd x(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x(i, j) = stream.next_normal();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
  q *= std::sqrt(static_cast<double>(n));  // Q'Q/n = I
  Matrix out(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) out(i, j) = q(i, j);
  return out;
}

}  // namespace

TEST_CASE("weighted design") {
  rng::Stream stream(51);
  SUBCASE("gaussian weights are unit") {
    const Dataset data = Dataset::make(random_design(stream, 12, 3), Vector(12, 0.5), false);
    const Matrix xw = weighted_design(data, LossKind::Gaussian, Vector{0.1, -0.2, 0.3});
    CHECK(xw == data.design());
  }
  SUBCASE("logistic at zero halves the design") {
    const Dataset data = random_logistic(stream, 15, 3, false);
    const Matrix xw = weighted_design(data, LossKind::Logistic, Vector{0.0, 0.0, 0.0});
    for (int i = 0; i < 15; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(xw(i, j) == doctest::Approx(0.5 * data.design()(i, j)).epsilon(1e-15));
  }
  SUBCASE("weighted gram equals curvature-weighted gram") {
    const Dataset data = random_logistic(stream, 25, 4, true);
    Vector beta{0.2, 0.5, -0.3, 0.1, 0.0};
    const Matrix xw = weighted_design(data, LossKind::Logistic, beta);
    const Matrix lhs = kernels::weighted_gram(xw, {});
    const Vector w = hessian_weights(LossKind::Logistic, data, beta);
    Vector ddot(25);
    for (int i = 0; i < 25; ++i) ddot[i] = w[i] * w[i];
    const Matrix rhs = kernels::weighted_gram(data.design(), ddot);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) CHECK(std::fabs(lhs(i, j) - rhs(i, j)) <= 1e-12);
  }
}

TEST_CASE("nodewise fit on an orthonormal design gives zero gamma and unit tau") {
  const Matrix xw = orthonormal_design(24, 6);
  const NormSpec weak = NormSpec::l1(5);
  const NodewiseRow row = nodewise_fit(xw, 2, 0.05, weak, {}, 1e-8);
  CHECK(row.converged);
  for (double g : row.gamma) CHECK(g == 0.0);
  CHECK(row.tau_sq == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(row.tau_floored);
}

TEST_CASE("unpenalized nodewise matches the dense inverse") {
  rng::Stream stream(1234);
  const Matrix xw = random_design(stream, 10, 6);
  const Eigen::MatrixXd x = to_eigen(xw);
  const Eigen::MatrixXd sigma = x.transpose() * x / 10.0;
  const Eigen::MatrixXd inverse = sigma.inverse();

  FitOptions tight;
  tight.tol = 1e-12;
  tight.max_iter = 200000;

  SUBCASE("gamma is the least-squares coefficient and tau the inverse diagonal") {
    for (int j = 0; j < 6; ++j) {
      const NodewiseRow row = nodewise_fit(xw, j, 0.0, NormSpec::l1(5), tight, 1e-8);
      REQUIRE(row.converged);
      CHECK(row.tau_sq == doctest::Approx(1.0 / inverse(j, j)).epsilon(1e-6));
      // oracle: regress column j on the others
      Eigen::MatrixXd minus(10, 5);
      int c = 0;
      for (int k = 0; k < 6; ++k)
        if (k != j) minus.col(c++) = x.col(k);
      const Eigen::VectorXd ls =
          (minus.transpose() * minus).ldlt().solve(minus.transpose() * x.col(j));
      for (int k = 0; k < 5; ++k) CHECK(std::fabs(row.gamma[k] - ls(k)) <= 1e-6);
    }
  }

  SUBCASE("assembled theta rows reproduce the inverse") {
    std::vector<NodewiseRow> rows;
    for (int j = 0; j < 6; ++j)
      rows.push_back(nodewise_fit(xw, j, 0.0, NormSpec::l1(5), tight, 1e-8));
    const PrecisionEstimate est = assemble_theta(xw, rows, NormSpec::l1(6));
    for (int j = 0; j < 6; ++j) {
      const auto row = est.row(j);
      for (int k = 0; k < 6; ++k) CHECK(std::fabs(row[k] - inverse(j, k)) <= 1e-6);
    }
  }
}

TEST_CASE("nodewise KKT bound and certificates") {
  rng::Stream stream(777);
  // correlated design so gamma is non-trivial
  Matrix xw(40, 8);
  for (int i = 0; i < 40; ++i) {
    double prev = stream.next_normal();
    for (int j = 0; j < 8; ++j) {
      prev = 0.6 * prev + 0.8 * stream.next_normal();
      xw(i, j) = prev;
    }
  }
  const std::size_t n = xw.rows();
  const NormSpec weak = NormSpec::l1(7);
  FitOptions tight;
  tight.tol = 1e-10;
  tight.max_iter = 50000;

  std::vector<NodewiseRow> rows;
  for (int j = 0; j < 8; ++j) {
    const double lmax = nodewise_lambda_max(xw, j, weak);
    const NodewiseRow row = nodewise_fit(xw, j, 0.25 * lmax, weak, tight, 1e-8);
    REQUIRE(row.converged);
    rows.push_back(row);

    // l-infinity KKT: |X_-j'(X_j - X_-j gamma)|/n <= lambda (1 + 1e-4)
    Vector residual(n);
    for (std::size_t i = 0; i < n; ++i) {
      double fitted = 0.0;
      int c = 0;
      for (int k = 0; k < 8; ++k)
        if (k != j) fitted += xw(i, k) * row.gamma[c++];
      residual[i] = xw(i, j) - fitted;
    }
    int c = 0;
    for (int k = 0; k < 8; ++k) {
      if (k == j) continue;
      double corr = 0.0;
      for (std::size_t i = 0; i < n; ++i) corr += xw(i, k) * residual[i];
      CHECK(std::fabs(corr) / static_cast<double>(n) <= 0.25 * lmax * (1.0 + 1e-4));
      ++c;
    }
  }

  const PrecisionEstimate est = assemble_theta(xw, rows, NormSpec::l1(8));
  const Matrix sigma = kernels::weighted_gram(xw, {});
  for (std::size_t r = 0; r < est.row_indices.size(); ++r) {
    const int j = est.row_indices[r];
    // diagonal identity Theta_j' Sigma e_j = 1 (that is how tau is defined)
    double diag = 0.0;
    for (int k = 0; k < 8; ++k) diag += est.theta(r, k) * sigma(k, static_cast<std::size_t>(j));
    CHECK(diag == doctest::Approx(1.0).epsilon(1e-10));
    // the stored residual satisfies the inverse certificate
    CHECK(est.inverse_residual[r] <= est.lambda_used[r] / est.tau_sq[r] + 1e-8);
    CHECK(est.theta(r, static_cast<std::size_t>(j)) == 1.0 / est.tau_sq[r]);
  }
}

TEST_CASE("identity gram gives unit theta rows with zero residual") {
  const Matrix xw = orthonormal_design(30, 5);
  std::vector<NodewiseRow> rows;
  for (int j = 0; j < 5; ++j) rows.push_back(nodewise_fit(xw, j, 0.1, NormSpec::l1(4), {}, 1e-8));
  const PrecisionEstimate est = assemble_theta(xw, rows, NormSpec::l1(5));
  for (int j = 0; j < 5; ++j) {
    const auto row = est.row(j);
    for (int k = 0; k < 5; ++k)
      CHECK(row[k] == doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-10));
    CHECK(est.inverse_residual[static_cast<std::size_t>(j)] <= 1e-10);
  }
}

TEST_CASE("cv lambda selection") {
  rng::Stream stream(31415);
  const Matrix xw = random_design(stream, 60, 12);
  const NormSpec weak = NormSpec::l1(11);

  SUBCASE("single-element grid returns that element") {
    CHECK(cv_select_lambda(xw, 0, 5, {0.37}, 7, weak, {}) == 0.37);
  }
  SUBCASE("pure-noise column prefers heavy shrinkage") {
    // column 0 is independent of the rest: the true gamma is zero, so the
    // large lambda wins the held-out comparison
    CHECK(cv_select_lambda(xw, 0, 5, {0.001, 10.0}, 7, weak, {}) == 10.0);
  }
  SUBCASE("deterministic under a fixed seed") {
    const auto grid = nodewise_lambda_grid(nodewise_lambda_max(xw, 3, weak), 20, 3.0);
    const double a = cv_select_lambda(xw, 3, 5, grid, 99, weak, {});
    const double b = cv_select_lambda(xw, 3, 5, grid, 99, weak, {});
    CHECK(a == b);
  }
  SUBCASE("more folds than rows is rejected") {
    const Matrix tiny = random_design(stream, 4, 3);
    CHECK_THROWS_AS(cv_select_lambda(tiny, 0, 5, {0.1}, 1, NormSpec::l1(2), {}), InputError);
  }
}

TEST_CASE("estimate_precision is order and parallelism independent") {
  rng::Stream stream(2718);
  const Dataset data = random_logistic(stream, 50, 8, true);
  Vector beta(9, 0.0);
  beta[1] = 0.4;
  NodewiseConfig config;
  config.folds = 3;
  config.grid_len = 8;
  config.seed = 5;
  config.target_rows = {4, 1, 7};
  const PrecisionEstimate a = estimate_precision(data, LossKind::Logistic, beta, config);
  config.target_rows = {7, 4, 1};
  const PrecisionEstimate b = estimate_precision(data, LossKind::Logistic, beta, config);
  CHECK(a.row_indices == b.row_indices);
  CHECK(a.theta == b.theta);
  CHECK(a.tau_sq == b.tau_sq);
  CHECK(a.lambda_used == b.lambda_used);
}

TEST_CASE("group weak norm in nodewise regressions") {
  // the weak norm may be the group norm itself; groups are remapped around
  // the removed column and the intercept column becomes a singleton
  rng::Stream stream(8888);
  const Dataset data = random_logistic(stream, 40, 6, true);
  const GroupPartition main_partition = GroupPartition::contiguous({2, 2, 2});
  Vector beta(7, 0.0);
  const Matrix xw = weighted_design(data, LossKind::Logistic, beta);

  const NormSpec weak = nodewise_weak_spec(7, 1, NormSpec::Kind::WeightedGroupLasso,
                                           &main_partition, 2);
  CHECK(weak.p() == 6);
  CHECK(weak.kind() == NormSpec::Kind::WeightedGroupLasso);
  // removed column 2 sat in the first main group, leaving group sizes 1,1,2,2
  int singles = 0, pairs = 0;
  for (int g = 0; g < weak.partition().group_count(); ++g) {
    singles += weak.partition().group_size(g) == 1;
    pairs += weak.partition().group_size(g) == 2;
  }
  CHECK(singles == 2);  // intercept and the orphaned group-one coordinate
  CHECK(pairs == 2);

  FitOptions tight;
  tight.tol = 1e-10;
  tight.max_iter = 50000;
  const double lmax = nodewise_lambda_max(xw, 2, weak);
  std::vector<NodewiseRow> rows{nodewise_fit(xw, 2, 0.3 * lmax, weak, tight, 1e-8)};
  REQUIRE(rows[0].converged);
  const NormSpec weak_full =
      certificate_weak_spec(7, 1, NormSpec::Kind::WeightedGroupLasso, &main_partition);
  const PrecisionEstimate est = assemble_theta(xw, std::move(rows), weak_full);
  CHECK(est.inverse_residual[0] <= est.lambda_used[0] / est.tau_sq[0] + 1e-8);
}

TEST_CASE("lambda grid shape") {
  const auto grid = nodewise_lambda_grid(2.0, 20, 3.0);
  CHECK(grid.size() == 20);
  CHECK(grid.front() == 2.0);
  CHECK(grid.back() == doctest::Approx(2.0 * 1e-3).epsilon(1e-12));
  for (std::size_t k = 1; k < grid.size(); ++k) CHECK(grid[k] < grid[k - 1]);
}
