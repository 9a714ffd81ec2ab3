#pragma once

#include <span>

#include "ssglm/types.hpp"

// Row-wise accumulation kernels. The public entry points split the row range
// into a fixed number of blocks (independent of the thread count), accumulate
// each block serially, and fold the block partials in block order, so results
// are bit-identical whether run serially, with OpenMP, or with any number of
// threads. kernels::ref holds plain single-loop implementations used as the
// reference in tests and in the bench_kernels tool.

namespace ssglm::kernels {

// Number of row blocks used by the deterministic reductions.
inline constexpr std::size_t kBlocks = 64;

// Independent per-row work; parallel only when the row count is large enough
// to amortize the region startup. Rows write disjoint outputs, so the two
// paths produce identical results.
template <typename F>
inline void for_each_row(std::size_t n, F&& f) {
  if (n >= 8192) {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) f(i);
  } else {
    for (std::size_t i = 0; i < n; ++i) f(i);
  }
}

double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);

// out[i] = X.row(i) . v
void matvec(const Matrix& x, std::span<const double> v, std::span<double> out);

// out = (1/n) * sum_i s[i] * X_i   (i.e. X' s / n)
void scaled_col_mean(const Matrix& x, std::span<const double> s, std::span<double> out);

// (1/n) * sum_i s[i] * X_i X_i', symmetric p x p. Empty `s` means all ones.
Matrix weighted_gram(const Matrix& x, std::span<const double> s);

// (1/n) * sum_i s[i] * (X_i' u)^2
double weighted_quadform(const Matrix& x, std::span<const double> s, std::span<const double> u);

namespace ref {
double dot(std::span<const double> a, std::span<const double> b);
void matvec(const Matrix& x, std::span<const double> v, std::span<double> out);
void scaled_col_mean(const Matrix& x, std::span<const double> s, std::span<double> out);
Matrix weighted_gram(const Matrix& x, std::span<const double> s);
double weighted_quadform(const Matrix& x, std::span<const double> s, std::span<const double> u);
}  // namespace ref

}  // namespace ssglm::kernels
