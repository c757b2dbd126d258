#pragma once

#include <vector>

#include "abc/codes.hpp"
#include "abc/preproc.hpp"
#include "abc/sigmodel.hpp"

namespace abc {

// Per-user effective chip sequence (scrambled when a scrambling sequence
// is given), scaled by 1/sqrt(G). Shared by the MF/Rake chains.
std::vector<cd> effective_chips(const CodeSet& codes, std::size_t user,
                                const ScramblingSequence* scramble = nullptr);

// Single-user matched filter on the current-symbol window.
std::vector<cd> mf_detect(const CodeSet& codes, std::size_t user,
                          const ReceivedFrame& rx,
                          const ScramblingSequence* scramble = nullptr);

// Maximal-ratio combining of chip-delayed fingers with known gains.
std::vector<cd> rake_detect(const CodeSet& codes, std::size_t user,
                            const ChannelProfile& chan_est,
                            const ReceivedFrame& rx,
                            const ScramblingSequence* scramble = nullptr);

// Chip-rate finger combination: out[t] = sum_l conj(alpha_l) r[t + d_l],
// t in [0, G). The Rake chain before despreading; exposed so the
// adaptive Rake variants reduce to rake_detect bit-exactly.
void rake_combine(const ChannelProfile& chan_est, const std::vector<cd>& block,
                  std::size_t gain, std::vector<cd>& out);

// LMMSE via the normal equations: y_n = h0_i^H R^{-1} r_n. R may be the
// analytic covariance or a sample estimate.
std::vector<cd> lmmse_detect(const SignaturePair& sig, std::size_t user,
                             const CMatrix& r_cov, const ReceivedFrame& rx);

// Eigen form: R^{-1} replaced by V_s D_s^{-1} V_s^H over the leading
// subspace_dim eigenpairs (full dimension when subspace_dim == G1).
std::vector<cd> lmmse_eigen_detect(const SignaturePair& sig, std::size_t user,
                                   const EigResult& eig,
                                   std::size_t subspace_dim,
                                   const ReceivedFrame& rx);

}  // namespace abc
