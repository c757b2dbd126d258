#include "abc/detectors_conventional.hpp"

#include <cmath>
#include <sstream>

#include "abc/errors.hpp"

namespace abc {

std::vector<cd> effective_chips(const CodeSet& codes, std::size_t user,
                                const ScramblingSequence* scramble) {
  if (user >= codes.users)
    throw config_error("effective_chips: user index out of range");
  const std::size_t g = codes.gain;
  const double norm = 1.0 / std::sqrt(static_cast<double>(g));
  std::vector<cd> chip(g);
  for (std::size_t t = 0; t < g; ++t) {
    chip[t] = static_cast<double>(codes.chips[user][t]) * norm;
    if (scramble) chip[t] *= scramble->values[t];
  }
  return chip;
}

std::vector<cd> mf_detect(const CodeSet& codes, std::size_t user,
                          const ReceivedFrame& rx,
                          const ScramblingSequence* scramble) {
  const std::size_t g = codes.gain;
  if (rx.window < g)
    throw config_error("mf_detect: block shorter than spreading gain");
  const std::vector<cd> chip = effective_chips(codes, user, scramble);
  std::vector<cd> y;
  y.reserve(rx.blocks.size());
  for (const auto& r : rx.blocks)
    y.push_back(kern::dotc(chip.data(), r.data(), g));
  return y;
}

void rake_combine(const ChannelProfile& chan_est, const std::vector<cd>& block,
                  std::size_t gain, std::vector<cd>& out) {
  out.assign(gain, cd{0.0, 0.0});
  for (std::size_t l = 0; l < chan_est.paths(); ++l) {
    const std::size_t d = static_cast<std::size_t>(chan_est.delays[l]);
    if (d + gain > block.size()) {
      std::ostringstream os;
      os << "rake: finger delay " << d << " exceeds processing window "
         << block.size();
      throw config_error(os.str());
    }
    kern::axpy(std::conj(chan_est.gains[l]), block.data() + d, out.data(),
               gain);
  }
}

std::vector<cd> rake_detect(const CodeSet& codes, std::size_t user,
                            const ChannelProfile& chan_est,
                            const ReceivedFrame& rx,
                            const ScramblingSequence* scramble) {
  const std::size_t g = codes.gain;
  const std::vector<cd> chip = effective_chips(codes, user, scramble);
  std::vector<cd> y;
  y.reserve(rx.blocks.size());
  std::vector<cd> combined;
  for (const auto& r : rx.blocks) {
    rake_combine(chan_est, r, g, combined);
    y.push_back(kern::dotc(chip.data(), combined.data(), g));
  }
  return y;
}

std::vector<cd> lmmse_detect(const SignaturePair& sig, std::size_t user,
                             const CMatrix& r_cov, const ReceivedFrame& rx) {
  if (user >= sig.h0.cols())
    throw config_error("lmmse_detect: user index out of range");
  if (r_cov.rows() != sig.g1 || rx.window != sig.g1)
    throw config_error("lmmse_detect: covariance/window dimension mismatch");
  const CMatrix w = solve_hermitian(r_cov, sig.h0.col(user));
  std::vector<cd> wv(sig.g1);
  for (std::size_t i = 0; i < sig.g1; ++i) wv[i] = w(i, 0);
  std::vector<cd> y;
  y.reserve(rx.blocks.size());
  for (const auto& r : rx.blocks)
    y.push_back(kern::dotc(wv.data(), r.data(), sig.g1));
  return y;
}

std::vector<cd> lmmse_eigen_detect(const SignaturePair& sig, std::size_t user,
                                   const EigResult& eig,
                                   std::size_t subspace_dim,
                                   const ReceivedFrame& rx) {
  if (user >= sig.h0.cols())
    throw config_error("lmmse_eigen_detect: user index out of range");
  const std::size_t g1 = sig.g1;
  if (subspace_dim == 0 || subspace_dim > g1)
    throw config_error("lmmse_eigen_detect: bad subspace dimension");
  const double tol =
      rank_tolerance(g1, g1, std::max(eig.values.front(), 1e-300));
  // w = V_s D_s^{-1} V_s^H h0_i
  std::vector<cd> h0i(g1);
  for (std::size_t i = 0; i < g1; ++i) h0i[i] = sig.h0(i, user);
  std::vector<cd> wv(g1, cd{0.0, 0.0});
  for (std::size_t s = 0; s < subspace_dim; ++s) {
    if (eig.values[s] <= tol) {
      std::ostringstream os;
      os << "lmmse_eigen_detect: near-zero eigenvalue " << eig.values[s]
         << " in retained subspace";
      throw numeric_error(os.str());
    }
    cd proj = 0.0;
    for (std::size_t i = 0; i < g1; ++i)
      proj += std::conj(eig.vectors(i, s)) * h0i[i];
    const cd scale = proj / eig.values[s];
    for (std::size_t i = 0; i < g1; ++i) wv[i] += scale * eig.vectors(i, s);
  }
  std::vector<cd> y;
  y.reserve(rx.blocks.size());
  for (const auto& r : rx.blocks)
    y.push_back(kern::dotc(wv.data(), r.data(), g1));
  return y;
}

}  // namespace abc
