#include "abc/kernels.hpp"

#include "abc/errors.hpp"

namespace abc::kern {

namespace detail {

cd dotu_scalar(const cd* x, const cd* y, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr - xi * yi;
    im += xr * yi + xi * yr;
  }
  return {re, im};
}

cd dotc_scalar(const cd* x, const cd* y, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

void axpy_scalar(cd a, const cd* x, cd* y, std::size_t n) {
  const double ar = a.real(), ai = a.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] += cd{ar * xr - ai * xi, ar * xi + ai * xr};
  }
}

}  // namespace detail

namespace {

struct Dispatch {
  cd (*dotu)(const cd*, const cd*, std::size_t);
  cd (*dotc)(const cd*, const cd*, std::size_t);
  void (*axpy)(cd, const cd*, cd*, std::size_t);
  Isa isa;
};

bool cpu_has_avx2() {
#if defined(ABCRX_BUILD_AVX2) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Dispatch make_dispatch(Isa isa) {
#if defined(ABCRX_BUILD_AVX2)
  if (isa == Isa::avx2) {
    return {detail::dotu_avx2, detail::dotc_avx2, detail::axpy_avx2, Isa::avx2};
  }
#endif
  (void)isa;
  return {detail::dotu_scalar, detail::dotc_scalar, detail::axpy_scalar,
          Isa::scalar};
}

Dispatch g_dispatch = make_dispatch(cpu_has_avx2() ? Isa::avx2 : Isa::scalar);

}  // namespace

Isa active_isa() { return g_dispatch.isa; }

bool avx2_supported() { return cpu_has_avx2(); }

void force_isa(Isa isa) {
  if (isa == Isa::avx2 && !cpu_has_avx2()) {
    throw config_error("kernels: AVX2 variant not available on this host");
  }
  g_dispatch = make_dispatch(isa);
}

cd dotu(const cd* x, const cd* y, std::size_t n) {
  return g_dispatch.dotu(x, y, n);
}

cd dotc(const cd* x, const cd* y, std::size_t n) {
  return g_dispatch.dotc(x, y, n);
}

void axpy(cd a, const cd* x, cd* y, std::size_t n) {
  g_dispatch.axpy(a, x, y, n);
}

}  // namespace abc::kern
