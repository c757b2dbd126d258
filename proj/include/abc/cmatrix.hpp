#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "abc/kernels.hpp"

namespace abc {

using cd = std::complex<double>;

// Dense complex matrix, row-major. The workhorse value type of the
// library; everything from signature matrices to demixing taps is one
// of these.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static CMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  cd& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cd& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  cd* row(std::size_t i) { return data_.data() + i * cols_; }
  const cd* row(std::size_t i) const { return data_.data() + i * cols_; }
  cd* data() { return data_.data(); }
  const cd* data() const { return data_.data(); }

  CMatrix adjoint() const;
  CMatrix conjugate() const;
  CMatrix col(std::size_t j) const;  // as rows x 1

  double frobenius_norm() const;
  bool all_finite() const;

  // y = this * x  (x.size() == cols)
  std::vector<cd> matvec(const std::vector<cd>& x) const;
  // y = this^H * x (x.size() == rows)
  std::vector<cd> matvec_adjoint(const std::vector<cd>& x) const;

  CMatrix operator*(const CMatrix& rhs) const;
  CMatrix operator+(const CMatrix& rhs) const;
  CMatrix operator-(const CMatrix& rhs) const;
  CMatrix operator*(cd s) const;
  CMatrix& operator+=(const CMatrix& rhs);
  CMatrix& operator-=(const CMatrix& rhs);
  CMatrix& operator*=(cd s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cd> data_;
};

// Hermitian eigendecomposition result. Eigenvalues real, descending;
// eigenvector columns orthonormal.
struct EigResult {
  std::vector<double> values;
  CMatrix vectors;
};

// Cyclic complex Jacobi on the symmetrized input. Throws numeric_error
// if the sweep cap (100) is hit, config_error on non-square input.
EigResult hermitian_eig(const CMatrix& a);

// Entrywise 1/sqrt(v) for v > tol, else 0. Throws numeric_error on
// entries below -tol.
std::vector<double> pinv_diag(const std::vector<double>& values, double tol);

// Solve a*x = b for Hermitian positive definite a via Cholesky.
// Throws numeric_error reporting the smallest pivot when a is not PD.
CMatrix solve_hermitian(const CMatrix& a, const CMatrix& b);

// Solve a*x = b for general square a via partially pivoted LU.
CMatrix solve_general(const CMatrix& a, const CMatrix& b);

// Column orthonormalization (modified Gram-Schmidt with a second pass).
// Preserves column span; throws numeric_error on rank deficiency.
CMatrix orthonormalize(const CMatrix& u);

// Same, acting on rows. Used to re-project adapted demixing taps.
CMatrix orthonormalize_rows(const CMatrix& u);

// Standard numerical-rank tolerance: max(rows,cols) * eps * lambda_max.
double rank_tolerance(std::size_t rows, std::size_t cols, double lambda_max);

}  // namespace abc
