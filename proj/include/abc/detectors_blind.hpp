#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "abc/cmatrix.hpp"

namespace abc {

enum class BlindStructure { ff, fb1, fb2 };

// Elementwise score for sub-Gaussian sources:
// g(y) = y - (tanh(Re y) + j tanh(Im y)).
cd score_subgaussian(cd y);

struct BlindConfig {
  double mu = 0.001;
  std::size_t taps = 1;     // lag order T; T+1 tap matrices
  std::size_t epochs = 10;  // passes over the frame
  std::size_t n_orth = 10;  // orthonormalize the stacked taps every N blocks
  bool decay = true;        // mu / epoch
  // Batch fixed-point iterations seeding a_0 before the adaptive passes;
  // 0 starts from the identity.
  std::size_t warm_iters = 50;
  std::string trace_csv;    // optional per-epoch diagnostics
};

// Adaptive separator state. Stores the applied tap matrices a[0..T]
// (each D x D): FF output y_n = sum_k a_k r_{n-k}^w, FB-I output
// y_n = a_0^{-1}(r_n^w - sum_{k>=1} a_k y_{n-k}), FB-II output
// y_n = a_0 r_n^w - sum_{k>=1} a_k y_{n-k}.
class DemixingState {
 public:
  DemixingState(BlindStructure structure, std::size_t dim, std::size_t taps,
                double mu);

  BlindStructure structure() const { return structure_; }
  std::size_t dim() const { return dim_; }
  std::size_t taps() const { return taps_; }
  double mu() const { return mu_; }
  void set_mu(double mu) { mu_ = mu; }
  std::uint64_t iteration() const { return iteration_; }

  const CMatrix& tap(std::size_t k) const { return a_[k]; }
  CMatrix& tap(std::size_t k) { return a_[k]; }

  // One block through the configured structure: returns y_n and, when
  // mu > 0, applies the stochastic natural-gradient update.
  std::vector<cd> step(const std::vector<cd>& rw);

  // Structure-specific steps (callable directly by tests).
  std::vector<cd> ff_step(const std::vector<cd>& rw);
  std::vector<cd> fb1_step(const std::vector<cd>& rw);
  std::vector<cd> fb2_step(const std::vector<cd>& rw);

  // Re-project the stacked taps [a_0 ... a_T] to orthonormal rows.
  void reorthonormalize();

  // Frobenius residual ||S S^H - I|| of the stacked taps.
  double unitarity_residual() const;

  // Clear input/output history (frame boundary).
  void reset_history();

  // Norm of the last applied update (trace diagnostics).
  double last_update_norm() const { return last_update_norm_; }

 private:
  void guard(const std::vector<cd>& y, const std::vector<cd>& rw) const;

  BlindStructure structure_;
  std::size_t dim_;
  std::size_t taps_;
  double mu_;
  std::uint64_t iteration_ = 0;
  double last_update_norm_ = 0.0;
  std::vector<CMatrix> a_;
  std::vector<std::vector<cd>> in_hist_;   // r_{n-1}..r_{n-T} (FF)
  std::vector<std::vector<cd>> out_hist_;  // y_{n-1}..y_{n-T} (FB)
};

// Separator outputs with permutation/phase ambiguity resolved against a
// reference (ground truth or pilots).
struct BlindOutput {
  CMatrix raw;      // D x M
  CMatrix aligned;  // K x M
  std::vector<std::size_t> assignment;  // aligned row -> raw row
  std::vector<cd> rotations;            // element of {1, j, -1, -j}
};

// Batch fixed-point rotation search on memoryless blocks: the symmetric
// (all-rows) iteration w_i <- E[g(y_i) x^H] - E[g'(y_i)] w_i followed by
// row orthonormalization, run for `iters` rounds from the identity.
CMatrix blind_fixed_point(const std::vector<std::vector<cd>>& whitened,
                          std::size_t iters);

// Full training run: fixed-point warm start of a_0, epochs adaptive
// passes with decaying step, then one frozen pass producing the raw
// outputs. epochs == 0 skips all training (identity separator).
BlindOutput run_blind(BlindStructure structure,
                      const std::vector<std::vector<cd>>& whitened,
                      const BlindConfig& cfg);

// Greedy max-|correlation| assignment of raw streams to reference rows
// plus per-stream QPSK phase derotation. Fills aligned/assignment/
// rotations of `out`.
void align_output(BlindOutput& out, const CMatrix& reference);

}  // namespace abc
