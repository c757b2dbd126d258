#include <cmath>
#include <random>

#include "abc/cmatrix.hpp"
#include "abc/errors.hpp"
#include "doctest.h"

using abc::cd;
using abc::CMatrix;

namespace {

CMatrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  CMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = {d(rng), d(rng)};
  return m;
}

CMatrix random_hermitian_psd(std::size_t n, std::uint64_t seed) {
  const CMatrix a = random_matrix(n, n + 2, seed);
  return a * a.adjoint();
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

}  // namespace

TEST_CASE("hermitian_eig reconstructs the input") {
  for (std::size_t n : {1u, 2u, 5u, 12u}) {
    const CMatrix a = random_hermitian_psd(n, 40 + n);
    const abc::EigResult e = abc::hermitian_eig(a);

    REQUIRE(e.values.size() == n);
    for (std::size_t i = 1; i < n; ++i) CHECK(e.values[i - 1] >= e.values[i]);

    // V Lambda V^H = A
    CMatrix scaled = e.vectors;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) scaled(i, j) *= e.values[j];
    CHECK(max_abs_diff(scaled * e.vectors.adjoint(), a) < 1e-9);

    // V^H V = I
    const CMatrix gram = e.vectors.adjoint() * e.vectors;
    CHECK(max_abs_diff(gram, CMatrix::identity(n)) < 1e-10);
  }
}

TEST_CASE("hermitian_eig on a diagonal matrix returns the diagonal sorted") {
  CMatrix a(3, 3);
  a(0, 0) = 2.0;
  a(1, 1) = 7.0;
  a(2, 2) = 4.0;
  const abc::EigResult e = abc::hermitian_eig(a);
  CHECK(e.values[0] == doctest::Approx(7.0));
  CHECK(e.values[1] == doctest::Approx(4.0));
  CHECK(e.values[2] == doctest::Approx(2.0));
}

TEST_CASE("pinv_diag handles zeros and rejects negatives") {
  const std::vector<double> v = {4.0, 1e-14, 0.0};
  const auto g = abc::pinv_diag(v, 1e-10);
  CHECK(g[0] == doctest::Approx(0.5));
  CHECK(g[1] == 0.0);
  CHECK(g[2] == 0.0);
  CHECK_THROWS_AS(abc::pinv_diag({1.0, -0.5}, 1e-10), abc::numeric_error);
}

TEST_CASE("solve_hermitian solves a PD system") {
  const std::size_t n = 8;
  const CMatrix a = random_hermitian_psd(n, 7) + CMatrix::identity(n);
  const CMatrix b = random_matrix(n, 2, 8);
  const CMatrix x = abc::solve_hermitian(a, b);
  CHECK(max_abs_diff(a * x, b) < 1e-9);

  CMatrix indef = CMatrix::identity(2);
  indef(1, 1) = -1.0;
  CHECK_THROWS_AS(abc::solve_hermitian(indef, CMatrix::identity(2)),
                  abc::numeric_error);
}

TEST_CASE("solve_general solves and detects singularity") {
  const std::size_t n = 6;
  const CMatrix a = random_matrix(n, n, 11);
  const CMatrix b = random_matrix(n, 1, 12);
  const CMatrix x = abc::solve_general(a, b);
  CHECK(max_abs_diff(a * x, b) < 1e-9);

  CMatrix sing(2, 2);
  sing(0, 0) = sing(0, 1) = sing(1, 0) = sing(1, 1) = 1.0;
  CHECK_THROWS_AS(abc::solve_general(sing, CMatrix::identity(2)),
                  abc::numeric_error);
}

TEST_CASE("orthonormalize yields orthonormal columns spanning the input") {
  const CMatrix u = random_matrix(7, 4, 21);
  const CMatrix q = abc::orthonormalize(u);
  CHECK(max_abs_diff(q.adjoint() * q, CMatrix::identity(4)) < 1e-10);
  // span preserved: projecting U onto Q recovers U
  const CMatrix proj = q * (q.adjoint() * u);
  CHECK(max_abs_diff(proj, u) < 1e-9);
}

TEST_CASE("orthonormalize_rows is the row-space analogue") {
  const CMatrix u = random_matrix(3, 9, 22);
  const CMatrix q = abc::orthonormalize_rows(u);
  CHECK(max_abs_diff(q * q.adjoint(), CMatrix::identity(3)) < 1e-10);
}

TEST_CASE("orthonormalize rejects rank-deficient input") {
  CMatrix u(3, 2);
  u(0, 0) = 1.0;
  u(1, 0) = 2.0;
  u(0, 1) = 2.0;
  u(1, 1) = 4.0;
  CHECK_THROWS_AS(abc::orthonormalize(u), abc::numeric_error);
}

TEST_CASE("matvec and matvec_adjoint are consistent") {
  const CMatrix a = random_matrix(5, 3, 31);
  std::vector<cd> x = {{1.0, 0.5}, {-2.0, 0.0}, {0.0, 1.0}};
  const auto y = a.matvec(x);
  // <y, A x> = <A^H y, x>
  cd lhs = 0.0, rhs = 0.0;
  const auto aty = a.matvec_adjoint(y);
  for (std::size_t i = 0; i < y.size(); ++i) lhs += std::conj(y[i]) * y[i];
  for (std::size_t j = 0; j < x.size(); ++j) rhs += std::conj(aty[j]) * x[j];
  CHECK(std::abs(lhs - rhs) < 1e-10);
}
