#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssglm {

using Vector = std::vector<double>;

// Precondition violations (dimension mismatches, invalid arguments).
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Invalid run configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or unusable data (CLI exit code 3).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure: NaN objective, degenerate variance (CLI exit code 4).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Internal consistency failure, e.g. a KKT certificate that a converged
// solve must satisfy does not hold. Signals a bug, not bad input.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

// Dense row-major matrix. Rows are contiguous so row-wise kernels can take
// std::span views without copying.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class LossKind { Logistic, Gaussian };

// Response plus design matrix. When `intercept` is set the stored design has
// an unpenalized leading column of ones; penalties act on columns
// penalized_offset()..p()-1 only.
class Dataset {
 public:
  // `x` holds the regressors without the intercept column.
  static Dataset make(Matrix x, Vector y, bool intercept);

  std::size_t n() const { return design_.rows(); }
  std::size_t p() const { return design_.cols(); }
  bool intercept() const { return intercept_; }
  std::size_t penalized_offset() const { return intercept_ ? 1 : 0; }
  std::size_t penalized_count() const { return p() - penalized_offset(); }

  const Matrix& design() const { return design_; }
  const Vector& y() const { return y_; }

 private:
  Matrix design_;
  Vector y_;
  bool intercept_ = false;
};

}  // namespace ssglm
