#include "abc/cmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "abc/errors.hpp"

namespace abc {

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

CMatrix CMatrix::conjugate() const {
  CMatrix m(rows_, cols_);
  for (std::size_t i = 0; i < rows_ * cols_; ++i)
    m.data()[i] = std::conj(data_[i]);
  return m;
}

CMatrix CMatrix::col(std::size_t j) const {
  CMatrix m(rows_, 1);
  for (std::size_t i = 0; i < rows_; ++i) m(i, 0) = (*this)(i, j);
  return m;
}

double CMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const cd& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

bool CMatrix::all_finite() const {
  for (const cd& v : data_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

std::vector<cd> CMatrix::matvec(const std::vector<cd>& x) const {
  std::vector<cd> y(rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    y[i] = kern::dotu(row(i), x.data(), cols_);
  return y;
}

std::vector<cd> CMatrix::matvec_adjoint(const std::vector<cd>& x) const {
  // y_j = sum_i conj(a_ij) x_i = conj(sum_i a_ij conj(x_i))
  std::vector<cd> y(cols_, cd{0.0, 0.0});
  for (std::size_t i = 0; i < rows_; ++i)
    kern::axpy(std::conj(x[i]), row(i), y.data(), cols_);
  for (cd& v : y) v = std::conj(v);
  return y;
}

CMatrix CMatrix::operator*(const CMatrix& rhs) const {
  if (cols_ != rhs.rows_)
    throw config_error("CMatrix: dimension mismatch in product");
  CMatrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const cd a = (*this)(i, k);
      if (a == cd{0.0, 0.0}) continue;
      kern::axpy(a, rhs.row(k), out.row(i), rhs.cols_);
    }
  }
  return out;
}

CMatrix CMatrix::operator+(const CMatrix& rhs) const {
  CMatrix out = *this;
  out += rhs;
  return out;
}

CMatrix CMatrix::operator-(const CMatrix& rhs) const {
  CMatrix out = *this;
  out -= rhs;
  return out;
}

CMatrix CMatrix::operator*(cd s) const {
  CMatrix out = *this;
  out *= s;
  return out;
}

CMatrix& CMatrix::operator+=(const CMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw config_error("CMatrix: dimension mismatch in sum");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw config_error("CMatrix: dimension mismatch in difference");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(cd s) {
  for (cd& v : data_) v *= s;
  return *this;
}

double rank_tolerance(std::size_t rows, std::size_t cols, double lambda_max) {
  return static_cast<double>(std::max(rows, cols)) *
         std::numeric_limits<double>::epsilon() * lambda_max;
}

namespace {

double offdiag_norm(const CMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

}  // namespace

EigResult hermitian_eig(const CMatrix& a_in) {
  if (a_in.rows() != a_in.cols())
    throw config_error("hermitian_eig: matrix is not square");
  const std::size_t n = a_in.rows();

  // Symmetrize: A <- (A + A^H)/2.
  CMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a(i, j) = 0.5 * (a_in(i, j) + std::conj(a_in(j, i)));

  CMatrix v = CMatrix::identity(n);
  const double scale = std::max(a.frobenius_norm(), 1e-300);
  const double stop = 1e-14 * scale;
  constexpr int kMaxSweeps = 100;

  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (offdiag_norm(a) <= stop) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cd apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag <= 1e-300) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const cd phase = apq / mag;  // e^{i phi}
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // Columns: [p q] <- [p q] * [[c, s*phase], [-s*conj(phase), c]]
        const cd sp = s * phase;
        const cd spc = s * std::conj(phase);
        for (std::size_t i = 0; i < n; ++i) {
          const cd aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - spc * aiq;
          a(i, q) = sp * aip + c * aiq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const cd apj = a(p, j), aqj = a(q, j);
          a(p, j) = c * apj - sp * aqj;
          a(q, j) = spc * apj + c * aqj;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const cd vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - spc * viq;
          v(i, q) = sp * vip + c * viq;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }
  if (sweep == kMaxSweeps && offdiag_norm(a) > stop) {
    std::ostringstream os;
    os << "hermitian_eig: no convergence after " << kMaxSweeps << " sweeps";
    throw numeric_error(os.str());
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i).real() > a(j, j).real();
  });

  EigResult res;
  res.values.resize(n);
  res.vectors = CMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    res.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) res.vectors(i, k) = v(i, order[k]);
  }
  return res;
}

std::vector<double> pinv_diag(const std::vector<double>& values, double tol) {
  std::vector<double> out(values.size(), 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < -tol) {
      std::ostringstream os;
      os << "pinv_diag: negative entry " << values[i] << " at index " << i;
      throw numeric_error(os.str());
    }
    if (values[i] > tol) out[i] = 1.0 / std::sqrt(values[i]);
  }
  return out;
}

namespace {

// In-place Cholesky A = L L^H. Returns smallest pivot encountered.
double cholesky(CMatrix& a) {
  const std::size_t n = a.rows();
  double min_pivot = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(a(j, k));
    min_pivot = std::min(min_pivot, d);
    if (d <= 0.0 || !std::isfinite(d)) {
      std::ostringstream os;
      os << "solve_hermitian: matrix not positive definite (smallest pivot "
         << d << ")";
      throw numeric_error(os.str());
    }
    const double dj = std::sqrt(d);
    a(j, j) = dj;
    for (std::size_t i = j + 1; i < n; ++i) {
      cd s = a(i, j);
      for (std::size_t k = 0; k < j; ++k)
        s -= a(i, k) * std::conj(a(j, k));
      a(i, j) = s / dj;
    }
  }
  return min_pivot;
}

}  // namespace

CMatrix solve_hermitian(const CMatrix& a_in, const CMatrix& b) {
  if (a_in.rows() != a_in.cols())
    throw config_error("solve_hermitian: matrix is not square");
  if (a_in.rows() != b.rows())
    throw config_error("solve_hermitian: rhs row mismatch");
  const std::size_t n = a_in.rows();

  CMatrix l(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      l(i, j) = 0.5 * (a_in(i, j) + std::conj(a_in(j, i)));
  cholesky(l);

  CMatrix x = b;
  const std::size_t m = b.cols();
  // Forward: L z = b
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < m; ++c) {
      cd s = x(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
      x(i, c) = s / l(i, i).real();
    }
  }
  // Backward: L^H x = z
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t c = 0; c < m; ++c) {
      cd s = x(ii, c);
      for (std::size_t k = ii + 1; k < n; ++k)
        s -= std::conj(l(k, ii)) * x(k, c);
      x(ii, c) = s / l(ii, ii).real();
    }
  }
  return x;
}

CMatrix solve_general(const CMatrix& a_in, const CMatrix& b) {
  if (a_in.rows() != a_in.cols())
    throw config_error("solve_general: matrix is not square");
  if (a_in.rows() != b.rows())
    throw config_error("solve_general: rhs row mismatch");
  const std::size_t n = a_in.rows();
  CMatrix a = a_in;
  CMatrix x = b;
  const std::size_t m = b.cols();
  std::vector<std::size_t> piv(n);
  std::iota(piv.begin(), piv.end(), std::size_t{0});

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pr = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(a(i, k));
      if (v > best) {
        best = v;
        pr = i;
      }
    }
    if (best < 1e-300) {
      std::ostringstream os;
      os << "solve_general: singular matrix (pivot " << best << " at column "
         << k << ")";
      throw numeric_error(os.str());
    }
    if (pr != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(pr, j));
      for (std::size_t j = 0; j < m; ++j) std::swap(x(k, j), x(pr, j));
    }
    const cd pivot = a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const cd f = a(i, k) / pivot;
      if (f == cd{0.0, 0.0}) continue;
      a(i, k) = f;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
      for (std::size_t j = 0; j < m; ++j) x(i, j) -= f * x(k, j);
    }
  }
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t c = 0; c < m; ++c) {
      cd s = x(ii, c);
      for (std::size_t k = ii + 1; k < n; ++k) s -= a(ii, k) * x(k, c);
      x(ii, c) = s / a(ii, ii);
    }
  }
  return x;
}

CMatrix orthonormalize(const CMatrix& u) {
  const std::size_t n = u.rows(), m = u.cols();
  if (m > n) throw config_error("orthonormalize: more columns than rows");
  CMatrix q = u;
  const double tol = 1e-12 * std::max(1.0, u.frobenius_norm());
  // MGS over columns, two passes against earlier columns.
  for (std::size_t j = 0; j < m; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        cd proj = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          proj += std::conj(q(i, k)) * q(i, j);
        for (std::size_t i = 0; i < n; ++i) q(i, j) -= proj * q(i, k);
      }
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += std::norm(q(i, j));
    nrm = std::sqrt(nrm);
    if (nrm <= tol) {
      std::ostringstream os;
      os << "orthonormalize: rank-deficient input (column " << j << ")";
      throw numeric_error(os.str());
    }
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= nrm;
  }
  return q;
}

CMatrix orthonormalize_rows(const CMatrix& u) {
  return orthonormalize(u.adjoint()).adjoint();
}

}  // namespace abc
