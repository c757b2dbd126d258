#include "abc/detectors_rake.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "abc/errors.hpp"
#include "abc/preproc.hpp"

namespace abc {

namespace {

bool is_exact_identity(const CMatrix& w) {
  for (std::size_t i = 0; i < w.rows(); ++i)
    for (std::size_t j = 0; j < w.cols(); ++j)
      if (w(i, j) != (i == j ? cd{1.0, 0.0} : cd{0.0, 0.0})) return false;
  return true;
}

// Split-complex cubic and its derivative for the FastICA rule.
cd cubic(cd y) {
  const double r = y.real(), i = y.imag();
  return {r * r * r, i * i * i};
}

double cubic_deriv(cd y) {
  const double r = y.real(), i = y.imag();
  return 3.0 * (r * r + i * i);
}

// Kurtosis gradient for unit-power circular signals.
cd kurt_grad(cd y) { return y * std::norm(y) - 2.0 * y; }

}  // namespace

AdaptiveRakeState::AdaptiveRakeState(RakeAdaptKind kind, std::size_t window,
                                     const RakeAdaptConfig& cfg)
    : kind_(kind), window_(window), cfg_(cfg),
      w_(CMatrix::identity(window)) {
  if (window == 0) throw config_error("AdaptiveRakeState: zero window");
  if (cfg.batch == 0) throw config_error("AdaptiveRakeState: zero batch");
}

void AdaptiveRakeState::normalize() {
  const double n = w_.frobenius_norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw divergence_error("adaptive Rake: W norm collapsed or non-finite");
  w_ *= std::sqrt(static_cast<double>(window_)) / n;
}

std::vector<cd> AdaptiveRakeState::apply(const std::vector<cd>& z) const {
  return w_.matvec(z);
}

void AdaptiveRakeState::update(const std::vector<cd>& z) {
  update_as(kind_, z);
}

void AdaptiveRakeState::update_as(RakeAdaptKind kind,
                                  const std::vector<cd>& z) {
  if (z.size() != window_)
    throw config_error("adaptive Rake: block dimension mismatch");
  zbatch_.push_back(z);
  if (zbatch_.size() > cfg_.batch) zbatch_.pop_front();
  const double inv_b = 1.0 / static_cast<double>(zbatch_.size());
  const std::size_t g = window_;

  switch (kind) {
    case RakeAdaptKind::fastica: {
      // W <- E[g(y) z^H] - diag(E[g'(y)]) W, g split cubic.
      CMatrix next(g, g);
      std::vector<double> gp(g, 0.0);
      std::vector<cd> conj_z(g);
      for (const auto& zb : zbatch_) {
        const std::vector<cd> y = w_.matvec(zb);
        for (std::size_t j = 0; j < g; ++j) conj_z[j] = std::conj(zb[j]);
        for (std::size_t i = 0; i < g; ++i) {
          kern::axpy(cubic(y[i]) * inv_b, conj_z.data(), next.row(i), g);
          gp[i] += cubic_deriv(y[i]) * inv_b;
        }
      }
      for (std::size_t i = 0; i < g; ++i)
        kern::axpy(cd{-gp[i], 0.0}, w_.row(i), next.row(i), g);
      w_ = next;
      break;
    }
    case RakeAdaptKind::robustica: {
      // W <- W + mu (I - E[g(y) g(y)^H]) W
      const std::vector<cd> y = w_.matvec(z);
      std::vector<cd> gy(g);
      for (std::size_t i = 0; i < g; ++i) gy[i] = kurt_grad(y[i]);
      CMatrix outer(g, g);
      for (const auto& zb : zbatch_) {
        const std::vector<cd> yb = w_.matvec(zb);
        std::vector<cd> gb(g), gbc(g);
        for (std::size_t i = 0; i < g; ++i) {
          gb[i] = kurt_grad(yb[i]);
          gbc[i] = std::conj(gb[i]);
        }
        for (std::size_t i = 0; i < g; ++i)
          kern::axpy(gb[i] * inv_b, gbc.data(), outer.row(i), g);
      }
      CMatrix delta = w_ - outer * w_;
      delta *= cfg_.step;
      w_ += delta;
      break;
    }
    case RakeAdaptKind::pca: {
      // W <- W + gamma (I - E[y y^H]) W
      CMatrix outer(g, g);
      for (const auto& zb : zbatch_) {
        const std::vector<cd> yb = w_.matvec(zb);
        std::vector<cd> yc(g);
        for (std::size_t i = 0; i < g; ++i) yc[i] = std::conj(yb[i]);
        for (std::size_t i = 0; i < g; ++i)
          kern::axpy(yb[i] * inv_b, yc.data(), outer.row(i), g);
      }
      CMatrix delta = w_ - outer * w_;
      delta *= cfg_.step;
      w_ += delta;
      break;
    }
  }
  if (!w_.all_finite())
    throw divergence_error("adaptive Rake: non-finite W after update");
  normalize();
}

CMatrix channel_combiner_adjoint(const ChannelProfile& chan, std::size_t g1) {
  CMatrix hh(g1, g1);
  for (std::size_t l = 0; l < chan.paths(); ++l) {
    const std::size_t d = static_cast<std::size_t>(chan.delays[l]);
    const cd a = std::conj(chan.gains[l]);
    for (std::size_t t = 0; t + d < g1; ++t) hh(t, t + d) += a;
  }
  return hh;
}

namespace {

cd despread(const std::vector<cd>& chip, const std::vector<cd>& v,
            std::size_t g) {
  return kern::dotc(chip.data(), v.data(), g);
}

CMatrix zca_whitener(const ReceivedFrame& rx) {
  const CMatrix cov = sample_covariance(rx.blocks);
  const EigResult eig = hermitian_eig(cov);
  const double tol =
      rank_tolerance(cov.rows(), cov.cols(), std::max(eig.values.front(), 1e-300));
  const std::vector<double> gains = pinv_diag(eig.values, tol);
  // V diag(1/sqrt(lambda)) V^H
  const std::size_t n = cov.rows();
  CMatrix scaled(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      scaled(i, j) = eig.vectors(i, j) * gains[j];
  return scaled * eig.vectors.adjoint();
}

}  // namespace

std::vector<cd> rake_adaptive_detect(AdaptiveRakeState& state,
                                     const CodeSet& codes, std::size_t user,
                                     const ChannelProfile& chan_est,
                                     const ReceivedFrame& rx, bool train,
                                     const ScramblingSequence* scramble) {
  const std::size_t g = codes.gain;
  const std::vector<cd> chip = effective_chips(codes, user, scramble);

  if (!train && is_exact_identity(state.w())) {
    // Frozen identity W: the chain is exactly the Rake detector.
    return rake_detect(codes, user, chan_est, rx, scramble);
  }

  if (state.w().rows() != rx.window)
    throw config_error("rake_adaptive_detect: W/window dimension mismatch");
  const CMatrix hh = channel_combiner_adjoint(chan_est, rx.window);
  // Pre-whitening happens once, before the adaptation loop.
  CMatrix whitener;
  if (train) whitener = zca_whitener(rx);

  std::vector<cd> y;
  y.reserve(rx.blocks.size());
  for (const auto& r : rx.blocks) {
    const std::vector<cd> rb = train ? whitener.matvec(r) : r;
    const std::vector<cd> combined = hh.matvec(rb);
    if (train) state.update(combined);
    const std::vector<cd> v = state.apply(combined);
    y.push_back(despread(chip, v, g));
  }
  return y;
}

std::vector<std::vector<cd>> rake_adaptive_detect_all(
    AdaptiveRakeState& state, const CodeSet& codes,
    const ChannelProfile& chan_est, const ReceivedFrame& rx,
    const ScramblingSequence* scramble) {
  const std::size_t g = codes.gain;
  const std::size_t k = codes.users;
  std::vector<std::vector<cd>> chips;
  chips.reserve(k);
  for (std::size_t u = 0; u < k; ++u)
    chips.push_back(effective_chips(codes, u, scramble));

  const CMatrix whitener = zca_whitener(rx);
  const CMatrix hh = channel_combiner_adjoint(chan_est, rx.window);
  std::vector<std::vector<cd>> out(k);
  for (const auto& r : rx.blocks) {
    const std::vector<cd> rw = whitener.matvec(r);
    const std::vector<cd> combined = hh.matvec(rw);
    state.update(combined);
    const std::vector<cd> v = state.apply(combined);
    for (std::size_t u = 0; u < k; ++u)
      out[u].push_back(despread(chips[u], v, g));
  }
  return out;
}

}  // namespace abc
