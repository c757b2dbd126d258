#pragma once

#include <vector>

#include "abc/cmatrix.hpp"
#include "abc/sigmodel.hpp"

namespace abc {

// Whitening map fitted from a covariance estimate. Rows of `map` are the
// scaled top eigenvectors; applying it to a block yields the whitened
// vector of dimension subspace_dim.
struct WhiteningTransform {
  double noise_var_hat = 0.0;
  std::size_t subspace_dim = 0;
  CMatrix map;  // subspace_dim x G1
  EigResult eig;
};

// Raw second moment (1/M) sum r_n r_n^H, symmetrized.
CMatrix sample_covariance(const std::vector<std::vector<cd>>& blocks);

// Exact covariance H0 H0^H + H1 H1^H + q I, for tests that separate
// statistical error from algorithmic error.
CMatrix exact_covariance(const SignaturePair& sig, double noise_var);

// Eigendecompose, estimate the noise floor from the discarded
// eigenvalues, and build the whitening map over the taps*users-dim
// signal subspace.
WhiteningTransform fit_whitening(const CMatrix& raw_cov, std::size_t users,
                                 std::size_t taps);

std::vector<std::vector<cd>> whiten(const WhiteningTransform& wt,
                                    const std::vector<std::vector<cd>>& blocks);

}  // namespace abc
