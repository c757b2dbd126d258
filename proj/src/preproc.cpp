#include "abc/preproc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "abc/errors.hpp"

namespace abc {

CMatrix sample_covariance(const std::vector<std::vector<cd>>& blocks) {
  if (blocks.size() < 2)
    throw config_error("sample_covariance: need at least 2 blocks");
  const std::size_t g1 = blocks.front().size();
  CMatrix c(g1, g1);
  std::vector<cd> conj_r(g1);
  for (const auto& r : blocks) {
    if (r.size() != g1)
      throw config_error("sample_covariance: inconsistent block length");
    for (std::size_t i = 0; i < g1; ++i) conj_r[i] = std::conj(r[i]);
    for (std::size_t i = 0; i < g1; ++i)
      kern::axpy(r[i], conj_r.data(), c.row(i), g1);
  }
  const double inv_m = 1.0 / static_cast<double>(blocks.size());
  c *= inv_m;
  // Symmetrize.
  for (std::size_t i = 0; i < g1; ++i)
    for (std::size_t j = i; j < g1; ++j) {
      const cd v = 0.5 * (c(i, j) + std::conj(c(j, i)));
      c(i, j) = v;
      c(j, i) = std::conj(v);
    }
  return c;
}

CMatrix exact_covariance(const SignaturePair& sig, double noise_var) {
  const CMatrix hh = sig.stacked();
  CMatrix c = hh * hh.adjoint();
  for (std::size_t i = 0; i < c.rows(); ++i) c(i, i) += noise_var;
  return c;
}

WhiteningTransform fit_whitening(const CMatrix& raw_cov, std::size_t users,
                                 std::size_t taps) {
  const std::size_t g1 = raw_cov.rows();
  if (users == 0 || taps == 0 || users >= g1)
    throw config_error("fit_whitening: users/taps out of range for window");
  // The model subspace is taps*users wide, but it cannot exceed the
  // window (keep one eigenvalue for the noise estimate).
  const std::size_t dim = std::min(taps * users, g1 - 1);

  WhiteningTransform wt;
  wt.eig = hermitian_eig(raw_cov);
  wt.subspace_dim = dim;

  if (g1 > dim) {
    double s = 0.0;
    for (std::size_t i = dim; i < g1; ++i) s += wt.eig.values[i];
    wt.noise_var_hat = std::max(0.0, s / static_cast<double>(g1 - dim));
  } else {
    wt.noise_var_hat = 0.0;
  }

  const double lam_max = std::max(wt.eig.values.front(), 0.0);
  const double tol = rank_tolerance(g1, g1, std::max(lam_max, 1e-300));
  const double floor = std::max(tol, 1e-8 * lam_max);

  std::vector<double> shifted(dim);
  double top = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    shifted[i] = std::max(wt.eig.values[i] - wt.noise_var_hat, 0.0);
    top = std::max(top, shifted[i]);
  }
  if (top <= tol)
    throw numeric_error(
        "fit_whitening: signal subspace collapsed (retained eigenvalues do "
        "not exceed the noise floor)");

  // Dimensions whose signal power does not clear the noise floor carry
  // (amplified) noise only; trim them instead of inverting them. Keep at
  // least `users` rows so downstream separation has one output per user.
  const double thresh = std::max(floor, wt.noise_var_hat);
  std::size_t n_keep = 0;
  while (n_keep < dim && shifted[n_keep] > thresh) ++n_keep;
  n_keep = std::max(n_keep, std::min(users, dim));
  shifted.resize(n_keep);
  wt.subspace_dim = n_keep;

  const std::vector<double> gains = pinv_diag(shifted, floor);
  wt.map = CMatrix(n_keep, g1);
  for (std::size_t i = 0; i < n_keep; ++i)
    for (std::size_t j = 0; j < g1; ++j)
      wt.map(i, j) = gains[i] * std::conj(wt.eig.vectors(j, i));
  return wt;
}

std::vector<std::vector<cd>> whiten(const WhiteningTransform& wt,
                                    const std::vector<std::vector<cd>>& blocks) {
  std::vector<std::vector<cd>> out;
  out.reserve(blocks.size());
  for (const auto& r : blocks) {
    if (r.size() != wt.map.cols())
      throw config_error("whiten: block length does not match map");
    out.push_back(wt.map.matvec(r));
  }
  return out;
}

}  // namespace abc
