#pragma once

#include <deque>
#include <vector>

#include "abc/cmatrix.hpp"
#include "abc/codes.hpp"
#include "abc/detectors_conventional.hpp"
#include "abc/sigmodel.hpp"

namespace abc {

enum class RakeAdaptKind { fastica, robustica, pca };

struct RakeAdaptConfig {
  double step = 0.01;       // mu (RICA) or gamma (PCA); unused by FastICA
  std::size_t batch = 50;   // sliding batch for the expectation operators
  bool whiten = true;       // ZCA pre-whitening of the window blocks
  std::string trace_csv;    // optional per-block diagnostics
};

// Adaptive matrix W inserted into the Rake chain, trained online by a
// FastICA, kurtosis-gradient (RobustICA) or PCA rule. W lives in the
// processing-window space (G1 x G1) and is held at Frobenius norm
// sqrt(G1) so that the identity is a fixed point of the normalization.
class AdaptiveRakeState {
 public:
  AdaptiveRakeState(RakeAdaptKind kind, std::size_t window,
                    const RakeAdaptConfig& cfg);

  RakeAdaptKind kind() const { return kind_; }
  const CMatrix& w() const { return w_; }
  CMatrix& w() { return w_; }

  // One training block (already channel-combined: z = H^H r). Updates W
  // from the sliding-batch expectations, then renormalizes.
  void update(const std::vector<cd>& z);

  // y = W z
  std::vector<cd> apply(const std::vector<cd>& z) const;

  void fastica_step(const std::vector<cd>& z) { update_as(RakeAdaptKind::fastica, z); }
  void rica_step(const std::vector<cd>& z) { update_as(RakeAdaptKind::robustica, z); }
  void pca_step(const std::vector<cd>& z) { update_as(RakeAdaptKind::pca, z); }

 private:
  void update_as(RakeAdaptKind kind, const std::vector<cd>& z);
  void normalize();

  RakeAdaptKind kind_;
  std::size_t window_;
  RakeAdaptConfig cfg_;
  CMatrix w_;
  std::deque<std::vector<cd>> zbatch_;
};

// Square G1 x G1 channel-combining operator: (H^H r)[t] =
// sum_l conj(alpha_l) r[t + d_l] (entries past the window drop).
CMatrix channel_combiner_adjoint(const ChannelProfile& chan, std::size_t g1);

// Rake detection chain with W inserted after channel combining. When `train` is set, W is updated
// on every block before detecting (single-pass online mode); blocks are
// ZCA-whitened first when cfg.whiten is set. With train=false and W = I
// the output equals rake_detect bit-for-bit.
std::vector<cd> rake_adaptive_detect(AdaptiveRakeState& state,
                                     const CodeSet& codes, std::size_t user,
                                     const ChannelProfile& chan_est,
                                     const ReceivedFrame& rx, bool train,
                                     const ScramblingSequence* scramble = nullptr);

// Shared-W variant: trains once over the frame (whitening per config),
// then detects every listed user with the trained W. Returns one soft
// sequence per user.
std::vector<std::vector<cd>> rake_adaptive_detect_all(
    AdaptiveRakeState& state, const CodeSet& codes,
    const ChannelProfile& chan_est, const ReceivedFrame& rx,
    const ScramblingSequence* scramble = nullptr);

}  // namespace abc
