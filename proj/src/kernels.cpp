#include "ssglm/kernels.hpp"

#include <algorithm>
#include <cstring>

namespace ssglm::kernels {

namespace {

// Below this many scalar operations the parallel region costs more than the
// loop; the serial path walks the identical block structure so results do
// not depend on which path ran.
constexpr std::size_t kParallelThreshold = 1 << 18;

struct BlockRange {
  std::size_t begin;
  std::size_t end;
};

// Fixed partition of [0, n) into at most kBlocks contiguous ranges of at
// least 32 rows. Depends only on n, never on the thread count.
inline std::size_t block_count(std::size_t n) {
  if (n == 0) return 1;
  const std::size_t by_rows = (n + 31) / 32;
  return std::min(kBlocks, std::min(by_rows, n));
}

inline BlockRange block_range(std::size_t n, std::size_t b, std::size_t nblocks) {
  const std::size_t lo = n * b / nblocks;
  const std::size_t hi = n * (b + 1) / nblocks;
  return {lo, hi};
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("kernels::dot: length mismatch");
  const std::size_t n = a.size();
  const std::size_t nb = block_count(n);
  double partial[kBlocks] = {0.0};
  if (n >= kParallelThreshold) {
#pragma omp parallel for schedule(static)
    for (std::size_t blk = 0; blk < nb; ++blk) {
      const auto [lo, hi] = block_range(n, blk, nb);
      double acc = 0.0;
      for (std::size_t i = lo; i < hi; ++i) acc += a[i] * b[i];
      partial[blk] = acc;
    }
  } else {
    for (std::size_t blk = 0; blk < nb; ++blk) {
      const auto [lo, hi] = block_range(n, blk, nb);
      double acc = 0.0;
      for (std::size_t i = lo; i < hi; ++i) acc += a[i] * b[i];
      partial[blk] = acc;
    }
  }
  double total = 0.0;
  for (std::size_t blk = 0; blk < nb; ++blk) total += partial[blk];
  return total;
}

double sum(std::span<const double> a) {
  const std::size_t n = a.size();
  const std::size_t nb = block_count(n);
  double partial[kBlocks] = {0.0};
  if (n >= kParallelThreshold) {
#pragma omp parallel for schedule(static)
    for (std::size_t blk = 0; blk < nb; ++blk) {
      const auto [lo, hi] = block_range(n, blk, nb);
      double acc = 0.0;
      for (std::size_t i = lo; i < hi; ++i) acc += a[i];
      partial[blk] = acc;
    }
  } else {
    for (std::size_t blk = 0; blk < nb; ++blk) {
      const auto [lo, hi] = block_range(n, blk, nb);
      double acc = 0.0;
      for (std::size_t i = lo; i < hi; ++i) acc += a[i];
      partial[blk] = acc;
    }
  }
  double total = 0.0;
  for (std::size_t blk = 0; blk < nb; ++blk) total += partial[blk];
  return total;
}

void matvec(const Matrix& x, std::span<const double> v, std::span<double> out) {
  if (v.size() != x.cols() || out.size() != x.rows())
    throw InputError("kernels::matvec: dimension mismatch");
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (n * p >= kParallelThreshold) {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
      const double* xi = x.row(i).data();
      double acc = 0.0;
      for (std::size_t j = 0; j < p; ++j) acc += xi[j] * v[j];
      out[i] = acc;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double* xi = x.row(i).data();
      double acc = 0.0;
      for (std::size_t j = 0; j < p; ++j) acc += xi[j] * v[j];
      out[i] = acc;
    }
  }
}

namespace {

inline void col_mean_block(const Matrix& x, std::span<const double> s, std::size_t lo,
                           std::size_t hi, double* acc) {
  const std::size_t p = x.cols();
  std::memset(acc, 0, p * sizeof(double));
  for (std::size_t i = lo; i < hi; ++i) {
    const double* xi = x.row(i).data();
    const double si = s[i];
    for (std::size_t j = 0; j < p; ++j) acc[j] += si * xi[j];
  }
}

}  // namespace

void scaled_col_mean(const Matrix& x, std::span<const double> s, std::span<double> out) {
  if (s.size() != x.rows() || out.size() != x.cols())
    throw InputError("kernels::scaled_col_mean: dimension mismatch");
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const std::size_t nb = block_count(n);
  std::fill(out.begin(), out.end(), 0.0);
  if (n * p >= kParallelThreshold) {
    Matrix partial(nb, p, 0.0);
#pragma omp parallel for schedule(static)
    for (std::size_t blk = 0; blk < nb; ++blk) {
      const auto [lo, hi] = block_range(n, blk, nb);
      col_mean_block(x, s, lo, hi, partial.row(blk).data());
    }
    for (std::size_t blk = 0; blk < nb; ++blk) {
      const double* acc = partial.row(blk).data();
      for (std::size_t j = 0; j < p; ++j) out[j] += acc[j];
    }
  } else {
    // identical fold tree, one scratch row reused per block
    Vector scratch(p);
    for (std::size_t blk = 0; blk < nb; ++blk) {
      const auto [lo, hi] = block_range(n, blk, nb);
      col_mean_block(x, s, lo, hi, scratch.data());
      for (std::size_t j = 0; j < p; ++j) out[j] += scratch[j];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < p; ++j) out[j] *= inv_n;
}

namespace {

inline void gram_block(const Matrix& x, std::span<const double> s, std::size_t lo, std::size_t hi,
                       Matrix& acc) {
  const std::size_t p = x.cols();
  std::fill(acc.data(), acc.data() + p * p, 0.0);
  for (std::size_t i = lo; i < hi; ++i) {
    const double* xi = x.row(i).data();
    const double si = s.empty() ? 1.0 : s[i];
    for (std::size_t j = 0; j < p; ++j) {
      const double w = si * xi[j];
      if (w == 0.0) continue;
      double* aj = acc.row(j).data();
      for (std::size_t k = j; k < p; ++k) aj[k] += w * xi[k];
    }
  }
}

}  // namespace

Matrix weighted_gram(const Matrix& x, std::span<const double> s) {
  if (!s.empty() && s.size() != x.rows())
    throw InputError("kernels::weighted_gram: weight length mismatch");
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const std::size_t nb = block_count(n);
  Matrix g(p, p, 0.0);
  // the per-block p*p fold only pays off once the row work dominates it
  if (n >= 1024 && n * p * p >= kParallelThreshold) {
    std::vector<Matrix> partial(nb);
#pragma omp parallel for schedule(static)
    for (std::size_t blk = 0; blk < nb; ++blk) {
      Matrix acc(p, p);
      const auto [lo, hi] = block_range(n, blk, nb);
      gram_block(x, s, lo, hi, acc);
      partial[blk] = std::move(acc);
    }
    for (std::size_t blk = 0; blk < nb; ++blk) {
      const Matrix& acc = partial[blk];
      for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = j; k < p; ++k) g(j, k) += acc(j, k);
    }
  } else {
    Matrix scratch(p, p);
    for (std::size_t blk = 0; blk < nb; ++blk) {
      const auto [lo, hi] = block_range(n, blk, nb);
      gram_block(x, s, lo, hi, scratch);
      for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = j; k < p; ++k) g(j, k) += scratch(j, k);
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = j; k < p; ++k) {
      g(j, k) *= inv_n;
      g(k, j) = g(j, k);
    }
  return g;
}

double weighted_quadform(const Matrix& x, std::span<const double> s, std::span<const double> u) {
  if (s.size() != x.rows() || u.size() != x.cols())
    throw InputError("kernels::weighted_quadform: dimension mismatch");
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const std::size_t nb = block_count(n);
  double partial[kBlocks] = {0.0};
  if (n * p >= kParallelThreshold) {
#pragma omp parallel for schedule(static)
    for (std::size_t blk = 0; blk < nb; ++blk) {
      const auto [lo, hi] = block_range(n, blk, nb);
      double acc = 0.0;
      for (std::size_t i = lo; i < hi; ++i) {
        const double* xi = x.row(i).data();
        double t = 0.0;
        for (std::size_t j = 0; j < p; ++j) t += xi[j] * u[j];
        acc += s[i] * t * t;
      }
      partial[blk] = acc;
    }
  } else {
    for (std::size_t blk = 0; blk < nb; ++blk) {
      const auto [lo, hi] = block_range(n, blk, nb);
      double acc = 0.0;
      for (std::size_t i = lo; i < hi; ++i) {
        const double* xi = x.row(i).data();
        double t = 0.0;
        for (std::size_t j = 0; j < p; ++j) t += xi[j] * u[j];
        acc += s[i] * t * t;
      }
      partial[blk] = acc;
    }
  }
  double total = 0.0;
  for (std::size_t blk = 0; blk < nb; ++blk) total += partial[blk];
  return total / static_cast<double>(n);
}

namespace ref {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void matvec(const Matrix& x, std::span<const double> v, std::span<double> out) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) acc += x(i, j) * v[j];
    out[i] = acc;
  }
}

void scaled_col_mean(const Matrix& x, std::span<const double> s, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out[j] += s[i] * x(i, j);
  for (std::size_t j = 0; j < x.cols(); ++j) out[j] /= static_cast<double>(x.rows());
}

Matrix weighted_gram(const Matrix& x, std::span<const double> s) {
  const std::size_t p = x.cols();
  Matrix g(p, p, 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double si = s.empty() ? 1.0 : s[i];
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < p; ++k) g(j, k) += si * x(i, j) * x(i, k);
  }
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < p; ++k) g(j, k) /= static_cast<double>(x.rows());
  return g;
}

double weighted_quadform(const Matrix& x, std::span<const double> s, std::span<const double> u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double t = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) t += x(i, j) * u[j];
    acc += s[i] * t * t;
  }
  return acc / static_cast<double>(x.rows());
}

}  // namespace ref

}  // namespace ssglm::kernels
