#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>

#include "ssglm/kernels.hpp"
#include "ssglm/rng.hpp"

using namespace ssglm;

namespace {

Matrix random_matrix(rng::Stream& stream, int n, int p) {
  Matrix x(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x(i, j) = stream.next_normal();
  return x;
}

}  // namespace

TEST_CASE("blocked kernels agree with the serial reference") {
  rng::Stream stream(808);
  const Matrix x = random_matrix(stream, 337, 17);
  Vector s(337), u(17), v(17);
  for (double& e : s) e = std::fabs(stream.next_normal());
  for (double& e : u) e = stream.next_normal();
  for (double& e : v) e = stream.next_normal();

  Vector out_a(337), out_b(337);
  kernels::matvec(x, u, out_a);
  kernels::ref::matvec(x, u, out_b);
  for (int i = 0; i < 337; ++i) CHECK(out_a[i] == doctest::Approx(out_b[i]).epsilon(1e-13));

  Vector cm_a(17), cm_b(17);
  kernels::scaled_col_mean(x, s, cm_a);
  kernels::ref::scaled_col_mean(x, s, cm_b);
  for (int j = 0; j < 17; ++j) CHECK(cm_a[j] == doctest::Approx(cm_b[j]).epsilon(1e-12));

  const Matrix g_a = kernels::weighted_gram(x, s);
  const Matrix g_b = kernels::ref::weighted_gram(x, s);
  for (int i = 0; i < 17; ++i)
    for (int j = 0; j < 17; ++j) CHECK(g_a(i, j) == doctest::Approx(g_b(i, j)).epsilon(1e-12));

  CHECK(kernels::weighted_quadform(x, s, u) ==
        doctest::Approx(kernels::ref::weighted_quadform(x, s, u)).epsilon(1e-12));
  CHECK(kernels::dot(u, v) == doctest::Approx(kernels::ref::dot(u, v)).epsilon(1e-13));
}

TEST_CASE("gram matrices are symmetric") {
  rng::Stream stream(5556);
  const Matrix x = random_matrix(stream, 90, 9);
  const Matrix g = kernels::weighted_gram(x, {});
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) CHECK(g(i, j) == g(j, i));
}

#ifdef _OPENMP
TEST_CASE("blocked reductions are bit-identical across thread counts") {
  rng::Stream stream(31);
  const Matrix x = random_matrix(stream, 501, 23);
  Vector s(501);
  for (double& e : s) e = stream.next_normal() * stream.next_normal();

  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  Vector cm1(23);
  kernels::scaled_col_mean(x, s, cm1);
  const Matrix g1 = kernels::weighted_gram(x, s);
  omp_set_num_threads(std::max(2, saved));
  Vector cm2(23);
  kernels::scaled_col_mean(x, s, cm2);
  const Matrix g2 = kernels::weighted_gram(x, s);
  omp_set_num_threads(saved);

  CHECK(cm1 == cm2);
  CHECK(g1 == g2);
}
#endif
