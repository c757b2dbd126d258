#include "abc/detectors_blind.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "abc/errors.hpp"

namespace abc {

cd score_subgaussian(cd y) {
  return {y.real() - std::tanh(y.real()), y.imag() - std::tanh(y.imag())};
}

DemixingState::DemixingState(BlindStructure structure, std::size_t dim,
                             std::size_t taps, double mu)
    : structure_(structure), dim_(dim), taps_(taps), mu_(mu) {
  if (dim == 0) throw config_error("DemixingState: zero dimension");
  a_.push_back(CMatrix::identity(dim));
  for (std::size_t k = 0; k < taps; ++k) a_.push_back(CMatrix(dim, dim));
  reset_history();
}

void DemixingState::reset_history() {
  in_hist_.assign(taps_, std::vector<cd>(dim_, cd{0.0, 0.0}));
  out_hist_.assign(taps_, std::vector<cd>(dim_, cd{0.0, 0.0}));
}

void DemixingState::guard(const std::vector<cd>& y,
                          const std::vector<cd>& rw) const {
  double ny = 0.0, nr = 0.0;
  for (const cd& v : y) ny += std::norm(v);
  for (const cd& v : rw) nr += std::norm(v);
  if (!std::isfinite(ny)) {
    std::ostringstream os;
    os << "blind separator diverged (non-finite output) at iteration "
       << iteration_;
    throw divergence_error(os.str());
  }
  if (ny > 1e6 * std::max(nr, 1e-30)) {
    std::ostringstream os;
    os << "blind separator diverged (feedback instability) at iteration "
       << iteration_;
    throw divergence_error(os.str());
  }
}

std::vector<cd> DemixingState::step(const std::vector<cd>& rw) {
  switch (structure_) {
    case BlindStructure::ff:
      return ff_step(rw);
    case BlindStructure::fb1:
      return fb1_step(rw);
    case BlindStructure::fb2:
      return fb2_step(rw);
  }
  throw config_error("DemixingState: unknown structure");
}

namespace {

void push_history(std::vector<std::vector<cd>>& hist,
                  const std::vector<cd>& v) {
  if (hist.empty()) return;
  for (std::size_t k = hist.size(); k-- > 1;) hist[k] = hist[k - 1];
  hist[0] = v;
}

}  // namespace

std::vector<cd> DemixingState::ff_step(const std::vector<cd>& rw) {
  if (rw.size() != dim_) throw config_error("ff_step: block dimension");
  // y_n = a_0 r_n + sum_k a_k r_{n-k}
  std::vector<cd> y = a_[0].matvec(rw);
  for (std::size_t k = 1; k <= taps_; ++k) {
    const std::vector<cd> part = a_[k].matvec(in_hist_[k - 1]);
    for (std::size_t i = 0; i < dim_; ++i) y[i] += part[i];
  }
  guard(y, rw);

  if (mu_ != 0.0) {
    // a_k <- a_k - mu g(y) r_{n-k}^H: stochastic gradient descent on the
    // per-component log-cosh contrast, row-orthonormalized outside.
    std::vector<cd> gbar(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      gbar[i] = score_subgaussian(y[i]);
    double upd = 0.0;
    for (std::size_t k = 0; k <= taps_; ++k) {
      const std::vector<cd>& x = (k == 0) ? rw : in_hist_[k - 1];
      for (std::size_t i = 0; i < dim_; ++i) {
        const cd coef = -mu_ * gbar[i];
        upd += std::norm(coef) * kern::dotc(x.data(), x.data(), dim_).real();
        // row i of a_k -= mu gbar_i x^H
        cd* row = a_[k].row(i);
        for (std::size_t j = 0; j < dim_; ++j)
          row[j] += coef * std::conj(x[j]);
      }
    }
    last_update_norm_ = std::sqrt(upd);
    if (!a_[0].all_finite()) {
      std::ostringstream os;
      os << "ff_step: non-finite update at iteration " << iteration_
         << " (step size too large)";
      throw divergence_error(os.str());
    }
  }

  push_history(in_hist_, rw);
  push_history(out_hist_, y);
  ++iteration_;
  return y;
}

std::vector<cd> DemixingState::fb1_step(const std::vector<cd>& rw) {
  if (rw.size() != dim_) throw config_error("fb1_step: block dimension");
  // y_n = a_0^{-1} (r_n - sum_{k>=1} a_k y_{n-k})
  std::vector<cd> rhs = rw;
  for (std::size_t k = 1; k <= taps_; ++k) {
    const std::vector<cd> part = a_[k].matvec(out_hist_[k - 1]);
    for (std::size_t i = 0; i < dim_; ++i) rhs[i] -= part[i];
  }
  CMatrix b(dim_, 1);
  for (std::size_t i = 0; i < dim_; ++i) b(i, 0) = rhs[i];
  CMatrix sol;
  try {
    sol = solve_general(a_[0], b);
  } catch (const numeric_error& e) {
    std::ostringstream os;
    os << "fb1_step: leading tap became singular at iteration " << iteration_
       << " (" << e.what() << ")";
    throw divergence_error(os.str());
  }
  std::vector<cd> y(dim_);
  for (std::size_t i = 0; i < dim_; ++i) y[i] = sol(i, 0);
  guard(y, rw);

  if (mu_ != 0.0) {
    // The inverse structure scores the whitened input instead of the
    // output: a_0 <- a_0 - mu g(r_n^w) y_n^H,
    // a_k <- a_k - mu g(r_n^w) y_{n-k}^H.
    std::vector<cd> gbar(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      gbar[i] = score_subgaussian(rw[i]);
    double upd = 0.0;
    for (std::size_t k = 0; k <= taps_; ++k) {
      const std::vector<cd>& x = (k == 0) ? y : out_hist_[k - 1];
      for (std::size_t i = 0; i < dim_; ++i) {
        const cd coef = -mu_ * gbar[i];
        upd += std::norm(coef) * kern::dotc(x.data(), x.data(), dim_).real();
        cd* row = a_[k].row(i);
        for (std::size_t j = 0; j < dim_; ++j)
          row[j] += coef * std::conj(x[j]);
      }
    }
    last_update_norm_ = std::sqrt(upd);
  }

  push_history(in_hist_, rw);
  push_history(out_hist_, y);
  ++iteration_;
  return y;
}

std::vector<cd> DemixingState::fb2_step(const std::vector<cd>& rw) {
  if (rw.size() != dim_) throw config_error("fb2_step: block dimension");
  // y_n = a_0 r_n - sum_{k>=1} a_k y_{n-k}
  std::vector<cd> y = a_[0].matvec(rw);
  for (std::size_t k = 1; k <= taps_; ++k) {
    const std::vector<cd> part = a_[k].matvec(out_hist_[k - 1]);
    for (std::size_t i = 0; i < dim_; ++i) y[i] -= part[i];
  }
  guard(y, rw);

  if (mu_ != 0.0) {
    // a_0 <- a_0 - mu g(y) r_n^H, a_k <- a_k + mu g(y) y_{n-k}^H. The
    // sign flips on the feedback taps because they enter the recursion
    // negated; both are descent directions for the same contrast.
    std::vector<cd> gbar(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      gbar[i] = score_subgaussian(y[i]);
    double upd = 0.0;
    for (std::size_t k = 0; k <= taps_; ++k) {
      const std::vector<cd>& x = (k == 0) ? rw : out_hist_[k - 1];
      const double s = (k == 0) ? -mu_ : mu_;
      for (std::size_t i = 0; i < dim_; ++i) {
        const cd coef = s * gbar[i];
        upd += std::norm(coef) * kern::dotc(x.data(), x.data(), dim_).real();
        cd* row = a_[k].row(i);
        for (std::size_t j = 0; j < dim_; ++j)
          row[j] += coef * std::conj(x[j]);
      }
    }
    last_update_norm_ = std::sqrt(upd);
    if (!a_[0].all_finite()) {
      std::ostringstream os;
      os << "fb2_step: non-finite update at iteration " << iteration_;
      throw divergence_error(os.str());
    }
  }

  push_history(in_hist_, rw);
  push_history(out_hist_, y);
  ++iteration_;
  return y;
}

void DemixingState::reorthonormalize() {
  CMatrix stacked(dim_, (taps_ + 1) * dim_);
  for (std::size_t k = 0; k <= taps_; ++k)
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        stacked(i, k * dim_ + j) = a_[k](i, j);
  const CMatrix q = orthonormalize_rows(stacked);
  for (std::size_t k = 0; k <= taps_; ++k)
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        a_[k](i, j) = q(i, k * dim_ + j);
}

double DemixingState::unitarity_residual() const {
  CMatrix stacked(dim_, (taps_ + 1) * dim_);
  for (std::size_t k = 0; k <= taps_; ++k)
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        stacked(i, k * dim_ + j) = a_[k](i, j);
  CMatrix gram = stacked * stacked.adjoint();
  for (std::size_t i = 0; i < dim_; ++i) gram(i, i) -= 1.0;
  return gram.frobenius_norm();
}

CMatrix blind_fixed_point(const std::vector<std::vector<cd>>& whitened,
                          std::size_t iters) {
  if (whitened.empty()) throw config_error("blind_fixed_point: no blocks");
  const std::size_t d = whitened.front().size();
  const std::size_t m = whitened.size();
  CMatrix w = CMatrix::identity(d);
  std::vector<cd> y;
  for (std::size_t it = 0; it < iters; ++it) {
    CMatrix next(d, d);
    std::vector<double> beta(d, 0.0);
    for (const auto& x : whitened) {
      y = w.matvec(x);
      for (std::size_t i = 0; i < d; ++i) {
        const cd g = score_subgaussian(y[i]);
        const double tr = std::tanh(y[i].real()), ti = std::tanh(y[i].imag());
        // g'(u) = tanh^2(u), averaged over the two components
        beta[i] += 0.5 * (tr * tr + ti * ti);
        cd* row = next.row(i);
        for (std::size_t j = 0; j < d; ++j) row[j] += g * std::conj(x[j]);
      }
    }
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        next(i, j) = next(i, j) * inv_m - (beta[i] * inv_m) * w(i, j);
    try {
      w = orthonormalize_rows(next);
    } catch (const numeric_error&) {
      return w;  // degenerate iterate: keep the last orthonormal one
    }
  }
  return w;
}

BlindOutput run_blind(BlindStructure structure,
                      const std::vector<std::vector<cd>>& whitened,
                      const BlindConfig& cfg) {
  if (whitened.empty()) throw config_error("run_blind: no whitened blocks");
  const std::size_t dim = whitened.front().size();
  const std::size_t m = whitened.size();

  DemixingState state(structure, dim, cfg.taps, cfg.mu);
  if (cfg.epochs > 0 && cfg.warm_iters > 0)
    state.tap(0) = blind_fixed_point(whitened, cfg.warm_iters);

  std::ofstream trace;
  if (!cfg.trace_csv.empty()) {
    trace.open(cfg.trace_csv);
    trace << "epoch,mean_update_norm,unitarity_residual\n";
  }

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    state.set_mu(cfg.decay ? cfg.mu / static_cast<double>(epoch) : cfg.mu);
    state.reset_history();
    double upd_sum = 0.0;
    for (std::size_t n = 0; n < m; ++n) {
      try {
        state.step(whitened[n]);
      } catch (const divergence_error& e) {
        std::ostringstream os;
        os << e.what() << " (epoch " << epoch << ", block " << n << ")";
        throw divergence_error(os.str());
      }
      upd_sum += state.last_update_norm();
      if (cfg.n_orth > 0 && (n + 1) % cfg.n_orth == 0)
        state.reorthonormalize();
    }
    state.reorthonormalize();
    if (trace.is_open())
      trace << epoch << ',' << upd_sum / static_cast<double>(m) << ','
            << state.unitarity_residual() << '\n';
  }

  // Frozen pass: every symbol estimated by the converged separator.
  state.set_mu(0.0);
  state.reset_history();
  BlindOutput out;
  out.raw = CMatrix(dim, m);
  for (std::size_t n = 0; n < m; ++n) {
    const std::vector<cd> y = state.step(whitened[n]);
    for (std::size_t i = 0; i < dim; ++i) out.raw(i, n) = y[i];
  }
  return out;
}

void align_output(BlindOutput& out, const CMatrix& reference) {
  const std::size_t d = out.raw.rows();
  const std::size_t k = reference.rows();
  const std::size_t m = std::min(out.raw.cols(), reference.cols());
  if (d < k)
    throw config_error("align_output: fewer raw streams than references");

  // Cross-correlation magnitudes between raw streams and references.
  CMatrix corr(d, k);
  std::vector<double> raw_norm(d), ref_norm(k);
  for (std::size_t i = 0; i < d; ++i)
    raw_norm[i] = std::sqrt(
        std::max(kern::dotc(out.raw.row(i), out.raw.row(i), m).real(), 1e-30));
  for (std::size_t j = 0; j < k; ++j)
    ref_norm[j] = std::sqrt(std::max(
        kern::dotc(reference.row(j), reference.row(j), m).real(), 1e-30));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < k; ++j)
      corr(i, j) = kern::dotc(out.raw.row(i), reference.row(j), m) /
                   (raw_norm[i] * ref_norm[j]);

  out.assignment.assign(k, d);
  out.rotations.assign(k, cd{1.0, 0.0});
  std::vector<bool> raw_used(d, false), ref_used(k, false);
  for (std::size_t pick = 0; pick < k; ++pick) {
    double best = -1.0;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < d; ++i) {
      if (raw_used[i]) continue;
      for (std::size_t j = 0; j < k; ++j) {
        if (ref_used[j]) continue;
        const double v = std::abs(corr(i, j));
        if (v > best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    }
    raw_used[bi] = true;
    ref_used[bj] = true;
    out.assignment[bj] = bi;
    // QPSK phase group: rotation maximizing Re<rot*raw, ref>. corr holds
    // <raw, ref>_c = sum conj(raw) ref; Re<rot raw, ref> = Re(conj(rot) c).
    static const cd group[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    double bestre = -1e300;
    cd bestrot{1.0, 0.0};
    for (const cd& rot : group) {
      const double re = (std::conj(rot) * corr(bi, bj)).real();
      if (re > bestre) {
        bestre = re;
        bestrot = rot;
      }
    }
    out.rotations[bj] = bestrot;
  }

  out.aligned = CMatrix(k, out.raw.cols());
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t n = 0; n < out.raw.cols(); ++n)
      out.aligned(j, n) = out.rotations[j] * out.raw(out.assignment[j], n);
}

}  // namespace abc
