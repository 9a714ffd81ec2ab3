// Benchmarks the deterministic blocked kernels against the plain serial
// reference on solver-shaped and simulation-shaped problems. Run with
// different OMP_NUM_THREADS settings to see the scaling.

#include <chrono>
#include <cmath>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ssglm/kernels.hpp"
#include "ssglm/rng.hpp"

using namespace ssglm;
using clk = std::chrono::steady_clock;

namespace {

double seconds_per_call(const auto& fn, int reps) {
  fn();  // warm up
  const auto t0 = clk::now();
  for (int k = 0; k < reps; ++k) fn();
  return std::chrono::duration<double>(clk::now() - t0).count() / reps;
}

void bench_case(const char* label, int n, int p, int reps) {
  rng::Stream stream(1234);
  Matrix x(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x(i, j) = stream.next_normal();
  Vector s(n), u(p), out_n(n);
  for (double& e : s) e = std::fabs(stream.next_normal());
  for (double& e : u) e = stream.next_normal();

  struct Row {
    const char* name;
    double blocked;
    double serial;
    double diff;
  };
  Row rows[4];

  rows[0] = {"matvec", seconds_per_call([&] { kernels::matvec(x, u, out_n); }, reps),
             seconds_per_call([&] { kernels::ref::matvec(x, u, out_n); }, reps), 0.0};
  {
    Vector a(p), b(p);
    rows[1] = {"col_mean", seconds_per_call([&] { kernels::scaled_col_mean(x, s, a); }, reps),
               seconds_per_call([&] { kernels::ref::scaled_col_mean(x, s, b); }, reps), 0.0};
    for (int j = 0; j < p; ++j) rows[1].diff = std::max(rows[1].diff, std::fabs(a[j] - b[j]));
  }
  {
    Matrix ga, gb;
    rows[2] = {"gram", seconds_per_call([&] { ga = kernels::weighted_gram(x, s); }, reps / 4 + 1),
               seconds_per_call([&] { gb = kernels::ref::weighted_gram(x, s); }, reps / 4 + 1), 0.0};
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) rows[2].diff = std::max(rows[2].diff, std::fabs(ga(i, j) - gb(i, j)));
  }
  rows[3] = {"quadform", seconds_per_call([&] { kernels::weighted_quadform(x, s, u); }, reps),
             seconds_per_call([&] { kernels::ref::weighted_quadform(x, s, u); }, reps), 0.0};

  std::printf("%s (n=%d, p=%d)\n", label, n, p);
  for (const Row& row : rows)
    std::printf("  %-9s blocked %9.2f us   serial %9.2f us   speedup %5.2fx   max|diff| %.2e\n",
                row.name, row.blocked * 1e6, row.serial * 1e6,
                row.serial / std::max(row.blocked, 1e-12), row.diff);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP\n");
#endif
  bench_case("solver-shaped", 150, 101, 2000);
  bench_case("tall", 100000, 40, 50);
  bench_case("wide gram", 4000, 200, 20);
  return 0;
}
