#include <immintrin.h>

#include "abc/kernels.hpp"

// AVX2/FMA variants. Two complex<double> lanes per 256-bit register.
// Accumulation order differs from the scalar kernels, so results agree
// only to rounding; the equivalence tests allow for that.
namespace abc::kern::detail {

namespace {

// Horizontal reduction of the product accumulators.
//
// acc_a holds elementwise x_r*y_r (even slots) and x_i*y_i (odd slots);
// acc_b holds elementwise x_r*y_i (even slots) and x_i*y_r (odd slots).
inline void reduce_products(__m256d acc_a, __m256d acc_b, double sign,
                            double* re, double* im) {
  alignas(32) double a[4], b[4];
  _mm256_store_pd(a, acc_a);
  _mm256_store_pd(b, acc_b);
  // sign = -1: unconjugated product; sign = +1: conjugated first factor.
  *re = (a[0] + sign * a[1]) + (a[2] + sign * a[3]);
  *im = (b[0] - sign * b[1]) + (b[2] - sign * b[3]);
}

}  // namespace

cd dotu_avx2(const cd* x, const cd* y, std::size_t n) {
  __m256d acc_a = _mm256_setzero_pd();
  __m256d acc_b = _mm256_setzero_pd();
  std::size_t i = 0;
  const auto* xp = reinterpret_cast<const double*>(x);
  const auto* yp = reinterpret_cast<const double*>(y);
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yp + 2 * i);
    const __m256d ys = _mm256_permute_pd(yv, 0x5);  // swap re/im per lane
    acc_a = _mm256_fmadd_pd(xv, yv, acc_a);
    acc_b = _mm256_fmadd_pd(xv, ys, acc_b);
  }
  double re, im;
  reduce_products(acc_a, acc_b, -1.0, &re, &im);
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr - xi * yi;
    im += xr * yi + xi * yr;
  }
  return {re, im};
}

cd dotc_avx2(const cd* x, const cd* y, std::size_t n) {
  __m256d acc_a = _mm256_setzero_pd();
  __m256d acc_b = _mm256_setzero_pd();
  std::size_t i = 0;
  const auto* xp = reinterpret_cast<const double*>(x);
  const auto* yp = reinterpret_cast<const double*>(y);
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yp + 2 * i);
    const __m256d ys = _mm256_permute_pd(yv, 0x5);
    acc_a = _mm256_fmadd_pd(xv, yv, acc_a);
    acc_b = _mm256_fmadd_pd(xv, ys, acc_b);
  }
  double re, im;
  reduce_products(acc_a, acc_b, 1.0, &re, &im);
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

void axpy_avx2(cd a, const cd* x, cd* y, std::size_t n) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  const auto* xp = reinterpret_cast<const double*>(x);
  auto* yp = reinterpret_cast<double*>(y);
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
    const __m256d xs = _mm256_permute_pd(xv, 0x5);
    // a*x = [ar*xr - ai*xi, ar*xi + ai*xr] per lane
    const __m256d prod = _mm256_addsub_pd(_mm256_mul_pd(ar, xv),
                                          _mm256_mul_pd(ai, xs));
    const __m256d yv = _mm256_loadu_pd(yp + 2 * i);
    _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(yv, prod));
  }
  const double are = a.real(), aim = a.imag();
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] += cd{are * xr - aim * xi, are * xi + aim * xr};
  }
}

}  // namespace abc::kern::detail
