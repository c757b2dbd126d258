#pragma once

#include <complex>
#include <cstddef>

// Complex double-precision inner-loop kernels. Scalar reference
// implementations always exist; an AVX2/FMA variant is selected once at
// startup when the CPU supports it. Both variants are equivalence-tested
// against each other in the unit suite.
namespace abc::kern {

using cd = std::complex<double>;

enum class Isa { scalar, avx2 };

// The instruction set the dispatcher resolved to.
Isa active_isa();

// True when the AVX2 variant was compiled in and the CPU supports it.
bool avx2_supported();

// Override dispatch (tests compare scalar vs vector paths). Throws
// config_error when the requested variant is unavailable.
void force_isa(Isa isa);

// sum_i x[i] * y[i]
cd dotu(const cd* x, const cd* y, std::size_t n);

// sum_i conj(x[i]) * y[i]
cd dotc(const cd* x, const cd* y, std::size_t n);

// y[i] += a * x[i]
void axpy(cd a, const cd* x, cd* y, std::size_t n);

namespace detail {
cd dotu_scalar(const cd* x, const cd* y, std::size_t n);
cd dotc_scalar(const cd* x, const cd* y, std::size_t n);
void axpy_scalar(cd a, const cd* x, cd* y, std::size_t n);
#if defined(ABCRX_BUILD_AVX2)
cd dotu_avx2(const cd* x, const cd* y, std::size_t n);
cd dotc_avx2(const cd* x, const cd* y, std::size_t n);
void axpy_avx2(cd a, const cd* x, cd* y, std::size_t n);
#endif
}  // namespace detail

}  // namespace abc::kern
